use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cutoff::SmoothWindow;
use crate::error::{Error, Result};
use crate::quadrature::{CompensatedSum, GaussLegendre};
use crate::sampled::SampledFunction;
use crate::spectral::{amplitude_samples, dirichlet, gamma_lambda, DirichletSpec};

use super::amplitude::PeriodicAmplitude;
use super::main_term::{FrequencyModulus, FrequencyRegion, MainTermContext, MainTermInput};

/// The averaged quadratic exponential sum in its three forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutsideAverage {
    /// 2^{λs}∫_0^{2^{-λs}} Σ_μ Ã(w+μ+y) e^{-i(μ+y)a} e^{iξ₂(μ+y)²} dy
    pub averaged_sum: Complex64,
    /// Σ_μ 2^{λs}∫_μ^{μ+2^{-λs}} Ã(w+y) e^{-iya} e^{iξ₂y²} dy
    pub sum_of_integrals: Complex64,
    /// 2^{λs}∫_{-1}^{1} Ã(w+y) e^{-iya} e^{iξ₂y²} dy
    pub single_integral: Complex64,
}

impl OutsideAverage {
    /// Largest pairwise difference relative to the largest modulus.
    pub fn spread(&self) -> f64 {
        let v = [self.averaged_sum, self.sum_of_integrals, self.single_integral];
        let scale = v.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let diff = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| (v[i] - v[j]).norm())
            .fold(0.0f64, f64::max);
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

/// Gauss–Legendre panels per cell of width 2^{-λs}, enough for the period
/// 2^{-s}, the harmonics of Ã and the phase ay + ξ₂y² on [-1, 1].
fn cell_panels(a_tilde: &PeriodicAmplitude, a: f64, xi2: f64, cell: f64) -> usize {
    let kmax = a_tilde.harmonics().iter().map(|h| h.0.unsigned_abs()).max().unwrap_or(0) as f64;
    let periods = a_tilde.period().map_or(0.0, |e| cell / e) * kmax.max(1.0);
    let rate = (a.abs() + 2.0 * xi2.abs()) * cell / std::f64::consts::PI;
    (2.0 * periods + rate).ceil().max(2.0) as usize
}

pub fn outside_average(a_tilde: &PeriodicAmplitude, w: f64, a: f64, xi2: f64, lambda: f64, s: u32) -> Result<OutsideAverage> {
    let ls = lambda * s as f64;
    if (ls - ls.round()).abs() > 1e-9 || ls.round() < 0.0 || ls.round() > s as f64 {
        return Err(Error::Parameter(format!("λs = {ls} must be an integer in [0, {s}]")));
    }
    let want = (-(s as f64)).exp2();
    if a_tilde.period().map_or(true, |e| (e - want).abs() > 1e-15 * want) {
        return Err(Error::Parameter(format!("amplitude period must be 2^-{s}")));
    }
    let cell = (-ls.round()).exp2();
    let grid = gamma_lambda(lambda, s);
    let panels = cell_panels(a_tilde, a, xi2, cell);
    let gl = GaussLegendre::new(16);
    let step = cell / panels as f64;
    let nodes: Vec<(f64, f64)> =
        (0..panels).flat_map(|p| gl.mapped(step * p as f64, step * (p + 1) as f64).collect::<Vec<_>>()).collect();
    let integrand = |y: f64| a_tilde.value(w + y) * Complex64::from_polar(1.0, -y * a + xi2 * y * y);
    let norm = cell.recip();

    let mut averaged = CompensatedSum::default();
    for &(y, wt) in &nodes {
        let mut inner = CompensatedSum::default();
        for &mu in &grid {
            inner.add(integrand(mu + y));
        }
        averaged.add(inner.value() * wt);
    }
    let mut sum = CompensatedSum::default();
    for &mu in &grid {
        let mut part = CompensatedSum::default();
        for &(y, wt) in &nodes {
            part.add(integrand(mu + y) * wt);
        }
        sum.add(part.value());
    }
    let single_panels = panels * grid.len();
    let single_step = 2.0 / single_panels as f64;
    let mut single = CompensatedSum::default();
    for p in 0..single_panels {
        let lo = -1.0 + single_step * p as f64;
        for (y, wt) in gl.mapped(lo, lo + single_step) {
            single.add(integrand(y) * wt);
        }
    }
    Ok(OutsideAverage {
        averaged_sum: averaged.value() * norm,
        sum_of_integrals: sum.value() * norm,
        single_integral: single.value() * norm,
    })
}

/// |Σ_μ Main(0; m, μ, ξ)| against |D_M(2^{-s}(ξ₁ - m̃))|·Avg|Ã_m|·2^{-s}2^{λs}ξ₂^{-1/2}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvgTransBound {
    pub m: u64,
    pub xi: (f64, f64),
    pub lhs: f64,
    /// The majorant without its constant.
    pub majorant: f64,
}

impl AvgTransBound {
    pub fn ratio(&self) -> Option<f64> {
        (self.majorant > 0.0).then(|| self.lhs / self.majorant)
    }

    /// lhs ≤ C·majorant, with 0 ≤ 0 counting as satisfied.
    pub fn holds(&self, c: f64) -> bool {
        self.lhs <= c * self.majorant || self.lhs == 0.0
    }
}

/// Parameters shared by a family of [`avg_trans_bound`] evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvgTransSetup {
    pub s: u32,
    pub delta: f64,
    pub lambda: f64,
    pub eta: f64,
    pub translates: usize,
    pub modulus: FrequencyModulus,
}

/// Periodic extensions Ã_m of the amplitudes A_m^f, m = 1..2^s, sampled at
/// `translates` inside translates per period 2^{-s}.
pub fn periodic_amplitudes(f: &SampledFunction, setup: &AvgTransSetup) -> Result<Vec<PeriodicAmplitude>> {
    let rows = amplitude_samples(f, setup.s, setup.eta, setup.translates)?;
    let n = rows.first().map_or(0, Vec::len);
    let period = (-(setup.s as f64)).exp2();
    (0..n)
        .map(|m| {
            let samples: Vec<Complex64> = rows.iter().map(|r| r[m]).collect();
            PeriodicAmplitude::from_samples(&samples, period, (-1.0, 1.0), None)
        })
        .collect()
}

/// Evaluates the Main(0) bound for each (m, ξ) query; ψ is the multiplier
/// window of the packets and μ runs over Γ_{λs}.
pub fn avg_trans_bound(
    amplitudes: &[PeriodicAmplitude],
    queries: &[(u64, (f64, f64))],
    setup: &AvgTransSetup,
) -> Result<Vec<AvgTransBound>> {
    let region = FrequencyRegion::new(setup.s, setup.delta)?;
    let grid = gamma_lambda(setup.lambda, setup.s);
    queries
        .par_iter()
        .map(|&(m, xi)| {
            if !region.contains(xi) {
                return Err(Error::Parameter(format!("ξ = {xi:?} outside Ω_{{{},{}}}", setup.s, setup.delta)));
            }
            let amp = amplitudes
                .get((m as usize).wrapping_sub(1))
                .ok_or_else(|| Error::Parameter(format!("frequency index {m} outside 1..={}", amplitudes.len())))?;
            let base = MainTermInput {
                order: 0,
                m,
                mu: 0.0,
                xi,
                s: setup.s,
                lambda: setup.lambda,
                eta: setup.eta,
                modulus: setup.modulus,
            };
            let ctx = MainTermContext::new(&base, amp, SmoothWindow::multiplier())?;
            let mut total = CompensatedSum::default();
            for &mu in &grid {
                total.add(ctx.main_term(&MainTermInput { mu, ..base }).factored);
            }
            let h = (-(setup.s as f64)).exp2();
            let order = base.half_cell();
            let kernel = if order == 0 {
                1.0
            } else {
                dirichlet(&DirichletSpec { order, derivative: 0, scale: h }, base.detuning()).norm()
            };
            let majorant = kernel * amp.average_abs() * h * (setup.lambda * setup.s as f64).exp2() / xi.1.sqrt();
            Ok(AvgTransBound { m, xi, lhs: total.value().norm(), majorant })
        })
        .collect()
}

/// Smallest C with lhs ≤ C·majorant over the records.
pub fn calibrate(records: &[AvgTransBound]) -> f64 {
    records.iter().filter_map(AvgTransBound::ratio).fold(0.0, f64::max)
}

/// Fraction of records violating lhs ≤ C·majorant.
pub fn violation_rate(records: &[AvgTransBound], c: f64) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().filter(|r| !r.holds(c)).count() as f64 / records.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn constant(s: u32) -> PeriodicAmplitude {
        PeriodicAmplitude::new(vec![(0, 1.0.into())], Some((-(s as f64)).exp2()), (-1.0, 1.0), None).unwrap()
    }

    #[test]
    fn constant_amplitude_gives_window_length() {
        let v = outside_average(&constant(4), 0.0, 0.0, 0.0, 0.5, 4).unwrap();
        for z in [v.averaged_sum, v.sum_of_integrals, v.single_integral] {
            assert!((z - Complex64::from(8.0)).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn three_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let h = (-3..=3).map(|k| (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect();
            let amp = PeriodicAmplitude::new(h, Some(1.0 / 16.0), (-1.0, 1.0), None).unwrap();
            let v = outside_average(&amp, rng.gen_range(-0.1..0.1), rng.gen_range(-50.0..50.0), rng.gen_range(0.0..40.0), 0.5, 4)
                .unwrap();
            assert!(v.spread() < 1e-9, "{v:?}");
        }
    }

    #[test]
    fn non_stationary_decay() {
        let env = SmoothWindow::new(-0.9, -0.5, 0.5, 0.9).unwrap();
        let a = |freq: f64| {
            let amp = PeriodicAmplitude::new(vec![(0, 1.0.into())], Some(1.0 / 16.0), (-1.0, 1.0), Some(env)).unwrap();
            outside_average(&amp, 0.0, freq, 0.0, 0.5, 4).unwrap().single_integral.norm()
        };
        assert!(a(400.0) * 400.0 < a(40.0) * 40.0);
    }

    #[test]
    fn zero_function_has_zero_sides() {
        let setup = AvgTransSetup { s: 3, delta: 0.1, lambda: 1.0 / 3.0, eta: 1.0 / 64.0, translates: 4, modulus: FrequencyModulus::Odd };
        let f = SampledFunction::<f64>::zeros(0.0, 1.0, 1 << 10).unwrap();
        let amps = periodic_amplitudes(&f, &setup).unwrap();
        let r = avg_trans_bound(&amps, &[(2, (5.0, 4.0))], &setup).unwrap();
        assert_eq!((r[0].lhs, r[0].majorant), (0.0, 0.0));
        assert!(r[0].holds(1.0));
    }

    #[test]
    fn rejects_frequency_outside_region() {
        let setup = AvgTransSetup { s: 3, delta: 0.1, lambda: 1.0 / 3.0, eta: 1.0 / 64.0, translates: 4, modulus: FrequencyModulus::Odd };
        let amps = vec![constant(3); 8];
        assert!(avg_trans_bound(&amps, &[(1, (0.0, 0.5))], &setup).is_err());
    }
}
