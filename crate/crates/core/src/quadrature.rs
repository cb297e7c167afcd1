//! Quadrature rules shared by every module: Gauss–Legendre panels and a
//! globally adaptive Gauss–Kronrod (7/15) integrator for real or complex
//! integrands.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the three-term recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<T: QuadValue>(&self, a: f64, b: f64, f: impl Fn(f64) -> T) -> T {
        let mut acc = T::default();
        for (x, w) in self.mapped(a, b) {
            acc = acc + f(x) * w;
        }
        acc
    }

    /// Composite rule: each consecutive pair of `breaks` split into `panels`
    /// equal sub-panels.
    pub fn integrate_composite<T: QuadValue>(
        &self,
        breaks: &[f64],
        panels: usize,
        f: impl Fn(f64) -> T,
    ) -> T {
        let mut acc = T::default();
        for win in breaks.windows(2) {
            let (a, b) = (win[0], win[1]);
            if b <= a {
                continue;
            }
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                let lo = a + h * p as f64;
                let hi = if p + 1 == panels { b } else { lo + h };
                acc = acc + self.integrate(lo, hi, &f);
            }
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<T: QuadValue>(a: f64, b: f64, f: &impl Fn(f64) -> T) -> (T, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let k = k * half;
    let g = g * half;
    (k, (k - g).magnitude())
}

/// Settings for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Equal panels the interval is split into before adapting; set it to
    /// roughly the number of oscillations so no panel is sampled coarsely.
    pub initial_panels: usize,
    pub max_segments: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-12, initial_panels: 1, max_segments: 20_000 }
    }
}

/// Integral estimate with its accumulated Kronrod error bound.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub segments: usize,
}

/// Globally adaptive G7K15: the segment with the largest error estimate is
/// bisected until the total error meets the tolerance.
pub fn adaptive<T: QuadValue>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    opts: Adaptive,
) -> Result<Estimate<T>> {
    if a == b {
        return Ok(Estimate { value: T::default(), error: 0.0, segments: 0 });
    }
    let panels = opts.initial_panels.max(1);
    let h = (b - a) / panels as f64;
    let mut segs: Vec<(f64, f64, T, f64)> = (0..panels)
        .map(|p| {
            let lo = a + h * p as f64;
            let hi = if p + 1 == panels { b } else { lo + h };
            let (v, e) = kronrod15(lo, hi, &f);
            (lo, hi, v, e)
        })
        .collect();
    loop {
        let total: T = segs.iter().fold(T::default(), |acc, s| acc + s.2);
        let err: f64 = segs.iter().map(|s| s.3).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err <= tol {
            segs.sort_by(|x, y| x.0.total_cmp(&y.0));
            let value = segs.iter().fold(T::default(), |acc, s| acc + s.2);
            return Ok(Estimate { value, error: err, segments: segs.len() });
        }
        if segs.len() >= opts.max_segments {
            return Err(Error::Accuracy(format!(
                "error estimate {err:.3e} above tolerance {tol:.3e} after {} segments on [{a}, {b}]",
                segs.len()
            )));
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3).then(y.0.cmp(&x.0)))
            .expect("at least one segment");
        let (lo, hi, _, _) = segs.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Accuracy(format!("segment [{lo}, {hi}] cannot be bisected further")));
        }
        let (v1, e1) = kronrod15(lo, mid, &f);
        let (v2, e2) = kronrod15(mid, hi, &f);
        segs.push((lo, mid, v1, e1));
        segs.push((mid, hi, v2, e2));
    }
}

/// Kahan–Babuška compensated sum of complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}
