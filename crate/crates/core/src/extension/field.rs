use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

/// Sample values accepted by the extension operator.
pub trait Amplitude: Copy + Default + Send + Sync {
    const IS_REAL: bool;
    fn complex(self) -> Complex64;
}

impl Amplitude for f64 {
    const IS_REAL: bool = true;
    fn complex(self) -> Complex64 {
        self.into()
    }
}

impl Amplitude for Complex64 {
    const IS_REAL: bool = false;
    fn complex(self) -> Complex64 {
        self
    }
}

/// Uniform grid of ξ = (ξ₁, ξ₂); node i of an axis is lo + i·(hi - lo)/(n - 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiGrid {
    pub xi1: (f64, f64),
    pub xi2: (f64, f64),
    pub n1: usize,
    pub n2: usize,
}

impl XiGrid {
    pub fn new(xi1: (f64, f64), xi2: (f64, f64), n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::Parameter("empty frequency grid".into()));
        }
        for (lo, hi, n) in [(xi1.0, xi1.1, n1), (xi2.0, xi2.1, n2)] {
            if !(lo.is_finite() && hi.is_finite()) || hi < lo || (n == 1 && hi != lo) {
                return Err(Error::Parameter(format!("invalid axis [{lo}, {hi}] with {n} nodes")));
            }
        }
        Ok(Self { xi1, xi2, n1, n2 })
    }

    /// Square grid of spacing `step` over [-half, half]², half a multiple of step.
    pub fn centered(half: f64, step: f64) -> Result<Self> {
        let n = (2.0 * half / step).round() as usize + 1;
        Self::new((-half, half), (-half, half), n, n)
    }

    pub fn step1(&self) -> f64 {
        step(self.xi1, self.n1)
    }

    pub fn step2(&self) -> f64 {
        step(self.xi2, self.n2)
    }

    pub fn node1(&self, i: usize) -> f64 {
        self.xi1.0 + i as f64 * self.step1()
    }

    pub fn node2(&self, i: usize) -> f64 {
        self.xi2.0 + i as f64 * self.step2()
    }

    pub fn max_radius(&self) -> f64 {
        let a = self.xi1.0.abs().max(self.xi1.1.abs());
        let b = self.xi2.0.abs().max(self.xi2.1.abs());
        a.hypot(b)
    }

    pub fn is_symmetric(&self) -> bool {
        self.xi1.0 == -self.xi1.1 && self.xi2.0 == -self.xi2.1
    }

    pub fn cells(&self) -> usize {
        self.n1 * self.n2
    }
}

fn step((lo, hi): (f64, f64), n: usize) -> f64 {
    if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    }
}

/// Ef on a grid; `values[i2 * n1 + i1]` is Ef(node1(i1), node2(i2)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionField {
    pub grid: XiGrid,
    pub values: Vec<Complex64>,
}

impl ExtensionField {
    pub fn get(&self, i1: usize, i2: usize) -> Complex64 {
        self.values[i2 * self.grid.n1 + i1]
    }

    pub fn row(&self, i2: usize) -> &[Complex64] {
        &self.values[i2 * self.grid.n1..(i2 + 1) * self.grid.n1]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }
}

fn check_aliasing<T>(f: &SampledFunction<T>, radius: f64) -> Result<()> {
    let h = 1.0 / f.samples_per_unit as f64;
    if h * radius > 0.25 {
        return Err(Error::Aliasing(format!(
            "|ξ| = {radius} needs more than {} samples per unit (have {})",
            (4.0 * radius).ceil(),
            f.samples_per_unit
        )));
    }
    Ok(())
}

/// Ef(ξ) = ∫ e^{-i(ξ₁x + ξ₂x²)} f(x) dx by the midpoint rule over the sample window.
pub fn extend_point<T: Amplitude>(f: &SampledFunction<T>, xi: (f64, f64)) -> Result<Complex64> {
    check_aliasing(f, xi.0.hypot(xi.1))?;
    let mut acc = Complex64::default();
    for (j, v) in f.values.iter().enumerate() {
        let x = f.node(j);
        acc += v.complex() * Complex64::from_polar(1.0, -(xi.0 * x + xi.1 * x * x));
    }
    Ok(acc * f.spacing())
}

/// Chirp-z evaluation of Σ_j g_j e^{-i(a + i·d)·j·h} for i = 0..n, via
/// Bluestein's identity ij = (i² + j² - (i-j)²)/2.
pub(crate) struct ChirpZ {
    n_in: usize,
    n_out: usize,
    len: usize,
    in_chirp: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl ChirpZ {
    pub fn new(n_in: usize, n_out: usize, dh: f64) -> Self {
        let len = (n_in + n_out - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let chirp = |k: i64| Complex64::from_polar(1.0, -0.5 * dh * (k * k) as f64);
        let in_chirp = (0..n_in.max(n_out) as i64).map(chirp).collect();
        let mut kernel = vec![Complex64::default(); len];
        for k in 0..n_out {
            kernel[k] = chirp(k as i64).conj();
        }
        for k in 1..n_in {
            kernel[len - k] = chirp(k as i64).conj();
        }
        fwd.process(&mut kernel);
        let scale = 1.0 / len as f64;
        let kernel_hat = kernel.into_iter().map(|v| v * scale).collect();
        Self { n_in, n_out, len, in_chirp, kernel_hat, fwd, inv }
    }

    pub fn transform(&self, input: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(input.len(), self.n_in);
        let mut buf = vec![Complex64::default(); self.len];
        for (j, &g) in input.iter().enumerate() {
            buf[j] = g * self.in_chirp[j];
        }
        self.fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inv.process(&mut buf);
        (0..self.n_out).map(|i| buf[i] * self.in_chirp[i]).collect()
    }
}

/// Evaluator for whole ξ₂ rows of a fixed grid.
pub(crate) struct RowEngine<'a, T> {
    f: &'a SampledFunction<T>,
    grid: XiGrid,
    czt: ChirpZ,
    start_phase: Vec<Complex64>,
    row_phase: Vec<Complex64>,
}

impl<'a, T: Amplitude> RowEngine<'a, T> {
    pub fn new(f: &'a SampledFunction<T>, grid: XiGrid) -> Result<Self> {
        check_aliasing(f, grid.max_radius())?;
        let n = f.len();
        let h = f.spacing();
        let (a, d) = (grid.xi1.0, grid.step1());
        let x0 = f.node(0);
        let czt = ChirpZ::new(n, grid.n1, d * h);
        let start_phase = (0..n).map(|j| Complex64::from_polar(h, -a * (j as f64) * h)).collect();
        let row_phase = (0..grid.n1).map(|i| Complex64::from_polar(1.0, -(a + i as f64 * d) * x0)).collect();
        Ok(Self { f, grid, czt, start_phase, row_phase })
    }

    pub fn row(&self, i2: usize) -> Vec<Complex64> {
        let xi2 = self.grid.node2(i2);
        let g: Vec<Complex64> = self
            .f
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let x = self.f.node(j);
                v.complex() * Complex64::from_polar(1.0, -xi2 * x * x) * self.start_phase[j]
            })
            .collect();
        let mut out = self.czt.transform(&g);
        for (o, p) in out.iter_mut().zip(&self.row_phase) {
            *o *= p;
        }
        out
    }
}

/// Ef on every node of the grid: one chirp-z transform per ξ₂ row.
pub fn extend_field<T: Amplitude>(f: &SampledFunction<T>, grid: XiGrid) -> Result<ExtensionField> {
    let engine = RowEngine::new(f, grid)?;
    let rows: Vec<Vec<Complex64>> = (0..grid.n2).into_par_iter().map(|i2| engine.row(i2)).collect();
    Ok(ExtensionField { grid, values: rows.concat() })
}

/// Direct evaluation of every grid node (reference path).
pub fn extend_field_direct<T: Amplitude>(f: &SampledFunction<T>, grid: XiGrid) -> Result<ExtensionField> {
    check_aliasing(f, grid.max_radius())?;
    let values = (0..grid.n2)
        .into_par_iter()
        .flat_map_iter(|i2| {
            (0..grid.n1).map(move |i1| extend_point(f, (grid.node1(i1), grid.node2(i2))).expect("guard checked"))
        })
        .collect();
    Ok(ExtensionField { grid, values })
}

/// The 1-D transform ∫ e^{-iξx} f(x) dx at ξ_k = 2πk/(L h), k = -L/2..L/2,
/// from a single zero-padded FFT of length L.
pub fn fourier_1d<T: Amplitude>(f: &SampledFunction<T>, len: usize) -> Result<Vec<(f64, Complex64)>> {
    if !len.is_power_of_two() || len < f.len() {
        return Err(Error::Parameter(format!("FFT length {len} must be a power of two at least {}", f.len())));
    }
    let h = f.spacing();
    let mut buf = vec![Complex64::default(); len];
    for (b, v) in buf.iter_mut().zip(&f.values) {
        *b = v.complex();
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let x0 = f.node(0);
    let half = (len / 2) as i64;
    Ok((-half..=half)
        .map(|k| {
            let xi = 2.0 * std::f64::consts::PI * k as f64 / (len as f64 * h);
            let v = buf[k.rem_euclid(len as i64) as usize];
            (xi, v * Complex64::from_polar(h, -xi * x0))
        })
        .collect())
}
