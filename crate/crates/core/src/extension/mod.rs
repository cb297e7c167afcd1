//! The Fourier extension operator of the parabola, its FFT-accelerated
//! evaluation on grids, norms over balls, mollified pushforwards and
//! grid-averaged extensions.

pub mod averaged;
pub mod field;
pub mod io;
pub mod norms;
pub mod pushforward;

pub use averaged::averaged_extension;
pub use field::{extend_field, extend_field_direct, extend_point, fourier_1d, Amplitude, ExtensionField, XiGrid};
pub use norms::{extension_ball_norms, lq_norm_ball, SUP_EXPONENT};
pub use pushforward::{mollified_pushforward, pushforward_sup_bound};
