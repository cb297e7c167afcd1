use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cutoff::SmoothWindow;
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::quadrature::GaussLegendre;

/// y ↦ P(y)·ψ(y) where P(y) = Σ_k c_k e^{2πiky/ε} has period ε and ψ is an
/// optional smooth envelope; integrals are taken over `window`. Without a
/// period P is the constant c_0.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicAmplitude {
    harmonics: Vec<(i64, Complex64)>,
    period: Option<f64>,
    pub window: (f64, f64),
    pub envelope: Option<SmoothWindow>,
}

impl PeriodicAmplitude {
    pub fn new(
        harmonics: Vec<(i64, Complex64)>,
        period: Option<f64>,
        window: (f64, f64),
        envelope: Option<SmoothWindow>,
    ) -> Result<Self> {
        if !(window.0 < window.1) {
            return Err(Error::Parameter(format!("empty window {window:?}")));
        }
        match period {
            Some(e) if !(e > 0.0 && e.is_finite()) => {
                return Err(Error::Parameter(format!("period {e} must be positive")));
            }
            None if harmonics.iter().any(|&(k, _)| k != 0) => {
                return Err(Error::Parameter("nonzero harmonics need a period".into()));
            }
            _ => {}
        }
        Ok(Self { harmonics, period, window, envelope })
    }

    /// The envelope alone (no periodic factor).
    pub fn envelope_only(window: (f64, f64), envelope: SmoothWindow) -> Result<Self> {
        Self::new(vec![(0, Complex64::new(1.0, 0.0))], None, window, Some(envelope))
    }

    /// Trigonometric interpolant of samples taken at jε/K, j = 0..K, over one
    /// period.
    pub fn from_samples(
        samples: &[Complex64],
        period: f64,
        window: (f64, f64),
        envelope: Option<SmoothWindow>,
    ) -> Result<Self> {
        let k = samples.len();
        if k == 0 {
            return Err(Error::Parameter("no samples".into()));
        }
        let coeff = |h: i64| -> Complex64 {
            samples
                .iter()
                .enumerate()
                .map(|(j, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * ((j as i64 * h).rem_euclid(k as i64)) as f64 / k as f64))
                .sum::<Complex64>()
                / k as f64
        };
        let half = (k / 2) as i64;
        let mut harmonics = Vec::with_capacity(k + 1);
        for h in -half..=half {
            let c = coeff(h);
            // the Nyquist term is split between ±K/2
            let c = if k % 2 == 0 && h.abs() == half && half > 0 { c * 0.5 } else { c };
            harmonics.push((h, c));
        }
        Self::new(harmonics, Some(period), window, envelope)
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn harmonics(&self) -> &[(i64, Complex64)] {
        &self.harmonics
    }

    /// Value, first and second derivative of the periodic factor.
    pub fn profile_jet(&self, y: f64) -> [Complex64; 3] {
        let Some(e) = self.period else {
            let c = self.harmonics.iter().map(|h| h.1).sum();
            return [c, Complex64::default(), Complex64::default()];
        };
        let t = (y / e).rem_euclid(1.0);
        let mut out = [Complex64::default(); 3];
        for &(k, c) in &self.harmonics {
            let omega = 2.0 * PI * k as f64 / e;
            let z = c * Complex64::from_polar(1.0, 2.0 * PI * ((k as f64 * t).rem_euclid(1.0)));
            out[0] += z;
            out[1] += z * Complex64::new(0.0, omega);
            out[2] -= z * omega * omega;
        }
        out
    }

    pub fn profile(&self, y: f64) -> Complex64 {
        self.profile_jet(y)[0]
    }

    pub fn value(&self, y: f64) -> Complex64 {
        let p = self.profile(y);
        match &self.envelope {
            Some(w) => p * w.value(y),
            None => p,
        }
    }

    pub fn jet(&self, y: f64) -> Jet2 {
        let [p0, p1, p2] = self.profile_jet(y);
        let p = Jet2::new(p0, p1, p2);
        match &self.envelope {
            Some(w) => p * w.jet2(y),
            None => p,
        }
    }

    /// τ_w: the periodic factor moved to y ↦ P(y + w); the envelope stays.
    pub fn translated(&self, w: f64) -> Self {
        let Some(e) = self.period else { return self.clone() };
        let r = w / e;
        let harmonics = self
            .harmonics
            .iter()
            .map(|&(k, c)| (k, c * Complex64::from_polar(1.0, 2.0 * PI * (k as f64 * r).rem_euclid(1.0))))
            .collect();
        Self { harmonics, ..self.clone() }
    }

    /// Avg|P| = (1/ε)∫_0^ε |P|; |c_0| without a period.
    pub fn average_abs(&self) -> f64 {
        let Some(e) = self.period else { return self.profile(0.0).norm() };
        let gl = GaussLegendre::new(16);
        gl.integrate_composite(&[0.0, e], 64, |y| self.profile(y).norm()) / e
    }

    /// max over one period of ε^j |P^{(j)}| for j = 0, 1, 2, from central
    /// differences with step ε/256 on 1024 points.
    pub fn stability_constants(&self) -> [f64; 3] {
        let e = self.period.unwrap_or(1.0);
        let h = e / 256.0;
        let mut out = [0.0f64; 3];
        for j in 0..1024 {
            let y = e * j as f64 / 1024.0;
            let (a, b, c) = (self.profile(y - h), self.profile(y), self.profile(y + h));
            out[0] = out[0].max(b.norm());
            out[1] = out[1].max(e * ((c - a) / (2.0 * h)).norm());
            out[2] = out[2].max(e * e * ((c - b * 2.0 + a) / (h * h)).norm());
        }
        out
    }

    /// Fails unless every constant from [`stability_constants`](Self::stability_constants)
    /// is within the declared bound.
    pub fn check_stable(&self, bounds: [f64; 3]) -> Result<()> {
        let got = self.stability_constants();
        for j in 0..3 {
            if got[j] > bounds[j] {
                return Err(Error::Validation(format!(
                    "derivative {j} at scale ε is {} above the declared {}",
                    got[j], bounds[j]
                )));
            }
        }
        Ok(())
    }

    /// Number of periods in the window (0 without a period).
    pub fn periods_in_window(&self) -> f64 {
        self.period.map_or(0.0, |e| (self.window.1 - self.window.0) / e)
    }
}
