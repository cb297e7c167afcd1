use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

use super::sequence::{coeff_sequence, DftBasis};

/// Both sides of a sequence inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeqBound {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
}

impl SeqBound {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, ratio: (rhs > 0.0).then(|| lhs / rhs) }
    }
}

/// A_m(v_j) = ⟨a^{f, D+v_j}, φ^m⟩ for v_j = j 2^{-s}/K, j = 0..K, m = 1..2^s;
/// row j holds the values for translate v_j.
pub fn amplitude_samples(f: &SampledFunction, s: u32, eta: f64, translates: usize) -> Result<Vec<Vec<Complex64>>> {
    if translates == 0 {
        return Err(Error::Parameter("at least one translate required".into()));
    }
    let basis = DftBasis::for_level(s)?;
    let width = (-(s as f64)).exp2();
    (0..translates)
        .into_par_iter()
        .map(|j| {
            let v = width * j as f64 / translates as f64;
            let c = coeff_sequence(f, s, eta, v)?;
            let t = basis.transform(&c.values)?;
            Ok(t[..basis.len()].to_vec())
        })
        .collect()
}

/// Avg|Ã_m| ≈ (1/K) Σ_j |A_m(v_j)| for m = 1..2^s.
pub fn averaged_amplitudes(samples: &[Vec<Complex64>]) -> Vec<f64> {
    let k = samples.len() as f64;
    let n = samples.first().map_or(0, Vec::len);
    (0..n).map(|m| samples.iter().map(|row| row[m].norm()).sum::<f64>() / k).collect()
}

/// Σ_m (Avg|Ã_m|)^4 against ‖f‖_4^4.
pub fn seq_inequality(f: &SampledFunction, s: u32, eta: f64, translates: usize) -> Result<SeqBound> {
    let avg = averaged_amplitudes(&amplitude_samples(f, s, eta, translates)?);
    let lhs = avg.iter().map(|a| a.powi(4)).sum();
    Ok(SeqBound::new(lhs, f.lp_norm(4.0).powi(4)))
}

/// The exponent-2 version on one grid: Σ over all L = 2N + 1 coefficients of
/// |⟨f̄_s, φ^m⟩|^2 (equal to ‖f̄_s‖^2), the same sum over m = 1..N only, and
/// ‖f‖_2^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeqL2 {
    pub full: f64,
    pub literal: f64,
    pub sequence_norm_sqr: f64,
    pub function_norm_sqr: f64,
}

pub fn seq_l2(f: &SampledFunction, s: u32, eta: f64, shift: f64) -> Result<SeqL2> {
    let c = coeff_sequence(f, s, eta, shift)?;
    let t = DftBasis::for_level(s)?.transform(&c.values)?;
    Ok(SeqL2 {
        full: t.iter().map(|v| v.norm_sqr()).sum(),
        literal: t[..c.len()].iter().map(|v| v.norm_sqr()).sum(),
        sequence_norm_sqr: c.norm_sqr(),
        function_norm_sqr: f.lp_norm(2.0).powi(2),
    })
}

/// max_{m ≤ N} |⟨f̄_s, φ^m⟩| against ‖f‖_∞.
pub fn seq_linf(f: &SampledFunction, s: u32, eta: f64, shift: f64) -> Result<SeqBound> {
    let c = coeff_sequence(f, s, eta, shift)?;
    let t = DftBasis::for_level(s)?.transform(&c.values)?;
    let lhs = t[..c.len()].iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(SeqBound::new(lhs, f.sup_norm()))
}
