//! Haar and Alpert wavelet systems, the smoothed Alpert frame, and
//! projections on translated dyadic grids.

pub mod alpert;
pub mod coeffs;
pub mod frame;
pub mod haar;
pub mod projection;

pub use alpert::{alpert_mother, alpert_wavelet, moments, smooth_alpert_wavelet, LevelTable, WaveletShape};
pub use coeffs::{CoeffKey, Species, System, WaveletCoeffs};
pub use haar::{haar_transform, haar_wavelet, project_pt, project_qs};
pub use frame::{eigen_band, frame_bounds, level_gram};
pub use projection::{perturbed_projection, perturbed_projection_species, synthesize};
