//! Numerical building blocks for studying the Fourier extension operator of
//! the parabola: wavelet systems, the extension operator itself, cap
//! geometry, Dirichlet-type kernels and periodic stationary phase.

pub mod cutoff;
pub mod error;
pub mod extension;
pub mod feffgeom;
pub mod jet;
pub mod phase;
pub mod quadrature;
pub mod raster;
pub mod sampled;
pub mod spectral;
pub mod wavelets;

pub use error::{Error, Result};
pub use sampled::{DyadicInterval, SampledFunction};
pub use raster::RasterField;
