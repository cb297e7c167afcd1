use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cutoff::SmoothWindow;
use crate::error::{Error, Result};
use crate::quadrature::{CompensatedSum, GaussLegendre};
use crate::spectral::{dirichlet, DirichletSpec};

use super::amplitude::PeriodicAmplitude;
use super::digamma::Digamma;

/// Modulus L in the translation m̃ = 2π 2^{2s} m / L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyModulus {
    /// L = N + 1
    Padded,
    /// L = 2N + 1
    Odd,
}

impl FrequencyModulus {
    pub fn value(self, s: u32) -> f64 {
        let n = (s as f64).exp2();
        match self {
            Self::Padded => n + 1.0,
            Self::Odd => 2.0 * n + 1.0,
        }
    }

    pub fn translation(self, m: u64, s: u32) -> f64 {
        2.0 * PI * (2.0 * s as f64).exp2() * m as f64 / self.value(s)
    }
}

/// Ω_{s,δ} = {|ξ₁| ≤ 2^{s/(1-δ)}, 2^{2δs} ≤ ξ₂ ≤ 2^s}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRegion {
    pub s: u32,
    pub delta: f64,
}

impl FrequencyRegion {
    pub fn new(s: u32, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::Parameter(format!("δ = {delta} outside (0, 1/2]")));
        }
        Ok(Self { s, delta })
    }

    pub fn xi1_max(&self) -> f64 {
        (self.s as f64 / (1.0 - self.delta)).exp2()
    }

    pub fn xi2_range(&self) -> (f64, f64) {
        ((2.0 * self.delta * self.s as f64).exp2(), (self.s as f64).exp2())
    }

    pub fn contains(&self, xi: (f64, f64)) -> bool {
        let (lo, hi) = self.xi2_range();
        xi.0.abs() <= self.xi1_max() && (lo..=hi).contains(&xi.1)
    }

    /// Maps (u, v) ∈ [0, 1)² onto Ω.
    pub fn point(&self, u: f64, v: f64) -> (f64, f64) {
        let (lo, hi) = self.xi2_range();
        ((2.0 * u - 1.0) * self.xi1_max(), lo + v * (hi - lo))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainTermInput {
    /// Taylor order ℓ ∈ {0, 1, 2}.
    pub order: u32,
    pub m: u64,
    /// Base point on the grid 2^{-λs}Z.
    pub mu: f64,
    pub xi: (f64, f64),
    pub s: u32,
    pub lambda: f64,
    pub eta: f64,
    pub modulus: FrequencyModulus,
}

impl MainTermInput {
    /// Half-width of the centered Taylor cell: k ∈ {-M..M} with
    /// M = ⌊2^{(1-λ)s}/2⌋.
    pub fn half_cell(&self) -> u64 {
        (((1.0 - self.lambda) * self.s as f64).exp2() / 2.0 + 1e-9).floor() as u64
    }

    /// ξ₁ - m̃.
    pub fn detuning(&self) -> f64 {
        self.xi.0 - self.modulus.translation(self.m, self.s)
    }

    fn validate(&self) -> Result<()> {
        if self.order > 2 {
            return Err(Error::Parameter(format!("Taylor order {} above 2", self.order)));
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::Parameter(format!("λ = {} outside (0, 1]", self.lambda)));
        }
        let k = self.mu * (self.lambda * self.s as f64).exp2();
        if (k - k.round()).abs() > 1e-9 || !(-1.0..1.0).contains(&self.mu) {
            return Err(Error::Parameter(format!("base point {} is not on the grid 2^(-λs)Z ∩ [-1, 1)", self.mu)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainTerm {
    pub direct: Complex64,
    pub factored: Complex64,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Quadrature in w over one period [-2^{-s-1}, 2^{-s-1}].
fn w_nodes(s: u32) -> Vec<(f64, f64)> {
    let h = (-(s as f64)).exp2();
    let gl = GaussLegendre::new(16);
    let panels = 8;
    let step = h / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let a = -0.5 * h + step * p as f64;
            gl.mapped(a, a + step).collect::<Vec<_>>()
        })
        .collect()
}

fn check_amplitude(a: &PeriodicAmplitude, s: u32) -> Result<()> {
    let want = (-(s as f64)).exp2();
    match a.period() {
        Some(e) if (e - want).abs() <= 1e-15 * want => Ok(()),
        _ => Err(Error::Parameter(format!("amplitude period must be 2^-{s}"))),
    }
}

pub(crate) struct MainTermContext {
    pub digamma: Digamma,
    nodes: Vec<(f64, f64)>,
    amp: Vec<Complex64>,
}

impl MainTermContext {
    pub fn new(inp: &MainTermInput, a_tilde: &PeriodicAmplitude, psi: SmoothWindow) -> Result<Self> {
        check_amplitude(a_tilde, inp.s)?;
        let digamma = Digamma::new(inp.xi, inp.s, inp.eta, psi)?;
        let nodes = w_nodes(inp.s);
        let amp = nodes.iter().map(|&(w, _)| a_tilde.value(w)).collect();
        Ok(Self { digamma, nodes, amp })
    }

    /// ∫ c_ℓ ∂^ℓϜ(w+μ) Ã(w) e^{-iθ(w+μ)} dw with θ = ξ₁ - m̃.
    fn integral(&self, inp: &MainTermInput) -> Complex64 {
        let theta = inp.detuning();
        let c = 1.0 / factorial(inp.order);
        let mut acc = CompensatedSum::default();
        for (&(w, wt), &a) in self.nodes.iter().zip(&self.amp) {
            let f = self.digamma.jet(w + inp.mu).derivative(inp.order as usize);
            acc.add(f * a * Complex64::from_polar(wt * c, -theta * (w + inp.mu)));
        }
        acc.value()
    }

    pub fn main_term(&self, inp: &MainTermInput) -> MainTerm {
        let theta = inp.detuning();
        let m = inp.half_cell() as i64;
        let h = (-(inp.s as f64)).exp2();
        let c = 1.0 / factorial(inp.order);
        // direct: the u-sum under the integral
        let mut direct = CompensatedSum::default();
        for (&(w, wt), &a) in self.nodes.iter().zip(&self.amp) {
            let f = self.digamma.jet(w + inp.mu).derivative(inp.order as usize);
            let mut inner = CompensatedSum::default();
            for k in -m..=m {
                let u = h * k as f64;
                inner.add(f * Complex64::from_polar(c * u.powi(inp.order as i32), -theta * u));
            }
            direct.add(inner.value() * a * Complex64::from_polar(wt, -theta * (w + inp.mu)));
        }
        // factored: 2^{-sℓ} D(θ 2^{-s}) times the remaining integral
        let factored = if m == 0 {
            if inp.order == 0 {
                self.integral(inp)
            } else {
                Complex64::default()
            }
        } else {
            let spec = DirichletSpec { order: m as u64, derivative: inp.order, scale: h };
            h.powi(inp.order as i32) * dirichlet(&spec, -theta) * self.integral(inp)
        };
        MainTerm { direct: direct.value(), factored }
    }

    /// ∫ Σ_k Ϝ(w+μ+u_k) e^{-iθu_k} Ã(w) e^{-iθ(w+μ)} dw, the term before
    /// Taylor expansion.
    fn unexpanded(&self, inp: &MainTermInput) -> Complex64 {
        let theta = inp.detuning();
        let m = inp.half_cell() as i64;
        let h = (-(inp.s as f64)).exp2();
        let mut acc = CompensatedSum::default();
        for (&(w, wt), &a) in self.nodes.iter().zip(&self.amp) {
            let mut inner = CompensatedSum::default();
            for k in -m..=m {
                let u = h * k as f64;
                inner.add(self.digamma.value(w + inp.mu + u) * Complex64::from_polar(1.0, -theta * u));
            }
            acc.add(inner.value() * a * Complex64::from_polar(wt, -theta * (w + inp.mu)));
        }
        acc.value()
    }
}

/// Main(ℓ; m, μ, ξ) by summing the Taylor cell under the integral and by
/// pulling the Dirichlet factor out of it. Λ is read as Ã(w)e^{-i(ξ₁-m̃)(w+μ)}.
pub fn main_term(inp: &MainTermInput, a_tilde: &PeriodicAmplitude, psi: SmoothWindow) -> Result<MainTerm> {
    inp.validate()?;
    Ok(MainTermContext::new(inp, a_tilde, psi)?.main_term(inp))
}

/// |unexpanded − Σ_{ℓ≤2} Main(ℓ)| at one base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorRemainder {
    pub unexpanded: Complex64,
    pub expansion: Complex64,
    pub remainder: f64,
    pub relative: Option<f64>,
}

pub fn taylor_remainder(inp: &MainTermInput, a_tilde: &PeriodicAmplitude, psi: SmoothWindow) -> Result<TaylorRemainder> {
    inp.validate()?;
    let ctx = MainTermContext::new(inp, a_tilde, psi)?;
    let expansion: Complex64 = (0..=2).map(|order| ctx.main_term(&MainTermInput { order, ..*inp }).factored).sum();
    let unexpanded = ctx.unexpanded(inp);
    let remainder = (unexpanded - expansion).norm();
    Ok(TaylorRemainder {
        unexpanded,
        expansion,
        remainder,
        relative: (unexpanded.norm() > 0.0).then(|| remainder / unexpanded.norm()),
    })
}
