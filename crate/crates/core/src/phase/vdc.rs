use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, Adaptive};

use super::amplitude::PeriodicAmplitude;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VdcEstimate {
    pub value: Complex64,
    /// |value|·ξ₂^{1/2}
    pub bound_ratio: f64,
}

/// Initial panel count: two per period of the amplitude and one per π of
/// phase ξ₂y² across the window.
pub(crate) fn panel_count(amp: &PeriodicAmplitude, phase_span: f64) -> usize {
    let periods = 2.0 * amp.periods_in_window();
    let oscillations = phase_span / std::f64::consts::PI;
    (periods.max(oscillations).ceil() as usize).max(8)
}

/// ∫ amp(y) e^{iξ₂y²} dy over the amplitude window.
pub fn vdc_estimate(amp: &PeriodicAmplitude, xi2: f64) -> Result<VdcEstimate> {
    if !(xi2 > 0.0 && xi2.is_finite()) {
        return Err(Error::Parameter(format!("ξ₂ = {xi2} must be positive")));
    }
    let (a, b) = amp.window;
    let span = xi2 * (b * b - a * a).abs().max(a.abs().max(b.abs()).powi(2));
    let panels = panel_count(amp, span);
    let opts = Adaptive { abs_tol: 1e-13, rel_tol: 1e-10, initial_panels: panels, max_segments: 4 * panels + 20_000 };
    let value = adaptive(|y| amp.value(y) * Complex64::from_polar(1.0, xi2 * y * y), a, b, opts)?.value;
    Ok(VdcEstimate { value, bound_ratio: value.norm() * xi2.sqrt() })
}
