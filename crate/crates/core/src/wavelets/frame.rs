use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::sampled::DyadicInterval;

use super::alpert::{alpert_wavelet, WaveletShape};
use super::coeffs::Species;

const FAMILY_SIZE: usize = 12;
const FAMILY_SEED: u64 = 0x5eed_f4a3;
const NODES_PER_CELL: usize = 6;

/// Gauss–Legendre nodes and weights on cells of width 1/cells_per_unit
/// covering [a, b]; cell edges sit on multiples of the width.
pub(crate) struct NodeSet {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub a: f64,
    pub cells_per_unit: f64,
}

impl NodeSet {
    pub fn new(a: f64, b: f64, cells_per_unit: f64, order: usize) -> Self {
        let gl = GaussLegendre::new(order);
        let first = (a * cells_per_unit).floor() as i64;
        let last = (b * cells_per_unit).ceil() as i64;
        let width = 1.0 / cells_per_unit;
        let mut x = Vec::new();
        let mut w = Vec::new();
        for c in first..last {
            let lo = c as f64 * width;
            for (xi, wi) in gl.mapped(lo, lo + width) {
                x.push(xi);
                w.push(wi);
            }
        }
        Self { x, w, a: first as f64 * width, cells_per_unit }
    }

    /// Index range of nodes inside [lo, hi], rounded outward to whole cells.
    pub fn range(&self, lo: f64, hi: f64, order: usize) -> std::ops::Range<usize> {
        let c0 = ((lo - self.a) * self.cells_per_unit).floor().max(0.0) as usize;
        let c1 = ((hi - self.a) * self.cells_per_unit).ceil().max(0.0) as usize;
        (c0 * order).min(self.x.len())..(c1 * order).min(self.x.len())
    }
}

fn cells_per_unit(s: u32, eta: f64) -> f64 {
    let base = (s as f64 + 4.0).exp2();
    if eta == 0.0 {
        return base;
    }
    base.max(((s as f64 + 2.0).exp2() / eta).log2().ceil().exp2())
}

/// Random combination of pure Alpert wavelets at one level.
struct TestFunction {
    level: u32,
    h: Vec<f64>,
    k: Vec<f64>,
}

impl TestFunction {
    fn eval(&self, x: f64) -> f64 {
        let n = 1u64 << self.level;
        let idx = (x * n as f64).floor();
        if idx < 0.0 || idx >= n as f64 {
            return 0.0;
        }
        let i = DyadicInterval { level: self.level, index: idx as u64 + 1, shift: 0.0 };
        self.h[idx as usize] * alpert_wavelet(&i, Species::H, x) + self.k[idx as usize] * alpert_wavelet(&i, Species::K, x)
    }
}

fn test_family(s: u32) -> Vec<TestFunction> {
    (0..FAMILY_SIZE)
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(FAMILY_SEED);
            rng.set_stream(j as u64);
            let level = s.saturating_sub((j % 3) as u32);
            let n = 1usize << level;
            let h = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let k = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            TestFunction { level, h, k }
        })
        .collect()
}

/// Empirical bounds of ‖Sf‖_p/‖f‖_p, Sf = (Σ_I |⟨f,w_I^η⟩ w_I^η|²)^{1/2} with
/// I over levels 0..=s of the standard grid and both species, over a fixed
/// randomized family of combinations of Alpert wavelets at levels s-2..=s.
/// η = 0 uses the pure Alpert system.
pub fn frame_bounds(s: u32, eta: f64, p: f64) -> Result<(f64, f64)> {
    if p != 2.0 && p != 4.0 {
        return Err(Error::Parameter(format!("frame bounds are measured for p = 2 or 4, got {p}")));
    }
    if s > 8 {
        return Err(Error::Parameter(format!("level {s} above the supported maximum 8")));
    }
    let shapes: Vec<WaveletShape> =
        Species::BOTH.iter().map(|&sp| WaveletShape::new(sp, eta)).collect::<Result<_>>()?;
    let nodes = NodeSet::new(-0.125, 1.125, cells_per_unit(s, eta), NODES_PER_CELL);
    // values of every wavelet on its node range, shared by the family
    let mut wavelets = Vec::new();
    for level in 0..=s {
        for index in 1..=(1u64 << level) {
            let i = DyadicInterval { level, index, shift: 0.0 };
            let half = 0.5 * i.length() * (1.0 + eta);
            let r = nodes.range(i.center() - half, i.center() + half, NODES_PER_CELL);
            for shape in &shapes {
                let vals: Vec<f64> = nodes.x[r.clone()].iter().map(|&x| shape.eval(&i, x)).collect();
                wavelets.push((r.start, vals));
            }
        }
    }
    let ratios: Vec<f64> = test_family(s)
        .par_iter()
        .filter_map(|tf| {
            let f: Vec<f64> = nodes.x.iter().map(|&x| tf.eval(x)).collect();
            let norm_f = lp(&f, &nodes.w, p);
            if norm_f == 0.0 {
                return None;
            }
            let mut sq = vec![0.0; f.len()];
            for (start, vals) in &wavelets {
                let c: f64 = vals.iter().enumerate().map(|(k, v)| v * f[start + k] * nodes.w[start + k]).sum();
                for (k, v) in vals.iter().enumerate() {
                    sq[start + k] += (c * v).powi(2);
                }
            }
            let sf: Vec<f64> = sq.iter().map(|v| v.sqrt()).collect();
            Some(lp(&sf, &nodes.w, p) / norm_f)
        })
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    Ok((lo, hi))
}

fn lp(v: &[f64], w: &[f64], p: f64) -> f64 {
    v.iter().zip(w).map(|(a, b)| a.abs().powf(p) * b).sum::<f64>().powf(1.0 / p)
}

/// Gram matrix of the level-s wavelets of one grid, ordered (index, species)
/// with the species listed in `species`.
pub fn level_gram(s: u32, eta: f64, shift: f64, species: &[Species]) -> Result<DMatrix<f64>> {
    let shapes: Vec<WaveletShape> = species.iter().map(|&sp| WaveletShape::new(sp, eta)).collect::<Result<_>>()?;
    let n = 1usize << s;
    let cpu = cells_per_unit(s, eta);
    let nodes = NodeSet::new(shift - 0.125, 1.125 + shift, cpu, NODES_PER_CELL);
    let len = (-(s as f64)).exp2();
    let half = 0.5 * len * (1.0 + eta);
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::with_capacity(n * shapes.len());
    for idx in 1..=n as u64 {
        let i = DyadicInterval { level: s, index: idx, shift };
        let r = nodes.range(i.center() - half, i.center() + half, NODES_PER_CELL);
        for shape in &shapes {
            rows.push((r.start, nodes.x[r.clone()].iter().map(|&x| shape.eval(&i, x)).collect()));
        }
    }
    let dim = rows.len();
    let mut g = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in a..dim {
            let (sa, va) = &rows[a];
            let (sb, vb) = &rows[b];
            let lo = (*sa).max(*sb);
            let hi = (sa + va.len()).min(sb + vb.len());
            let v: f64 = (lo..hi).map(|j| va[j - sa] * vb[j - sb] * nodes.w[j]).sum();
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    Ok(g)
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eigen_band(g: &DMatrix<f64>) -> (f64, f64) {
    let e = SymmetricEigen::new(g.clone()).eigenvalues;
    (e.min(), e.max())
}
