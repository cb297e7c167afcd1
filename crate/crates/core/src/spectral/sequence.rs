use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::cutoff::SmoothWindow;
use crate::error::{Error, Result};
use crate::sampled::SampledFunction;
use crate::wavelets::projection::{check_inputs, tables, WINDOW};
use crate::wavelets::Species;

/// ⟨f, h_{I_n}^η⟩ for the 2^s intervals I_n of D_s + v, n = 1..2^s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffSequence {
    pub values: Vec<Complex64>,
    pub s: u32,
    pub shift: f64,
}

impl CoeffSequence {
    pub fn new(values: Vec<Complex64>, s: u32, shift: f64) -> Result<Self> {
        if values.len() != 1usize << s {
            return Err(Error::Parameter(format!("{} entries for level {s}", values.len())));
        }
        Ok(Self { values, s, shift })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

pub fn coeff_sequence(f: &SampledFunction, s: u32, eta: f64, shift: f64) -> Result<CoeffSequence> {
    check_inputs(f, s, eta, shift)?;
    let g = f.rewindow(WINDOW.0, WINDOW.1)?;
    let (_, table) = tables(s, eta, shift, &[Species::H], f.samples_per_unit)?.pop().expect("one table");
    let values = (1..=(1u64 << s)).map(|n| table.inner(&g, n).into()).collect();
    CoeffSequence::new(values, s, shift)
}

/// Vectors φ^m_n = e^{2πi nm/L}/√L, n = 1..N, with odd modulus L = 2N + 1.
/// For m = 1..L they are the restrictions of a unitary basis of sequences
/// on Z_L; the first N of them are the ones used for re-expansion.
#[derive(Clone)]
pub struct DftBasis {
    n: usize,
    modulus: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DftBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftBasis").field("n", &self.n).field("modulus", &self.modulus).finish()
    }
}

impl DftBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("empty sequence space".into()));
        }
        let modulus = 2 * n + 1;
        let mut planner = FftPlanner::new();
        Ok(Self { n, modulus, forward: planner.plan_fft_forward(modulus), inverse: planner.plan_fft_inverse(modulus) })
    }

    pub fn for_level(s: u32) -> Result<Self> {
        Self::new(1usize << s)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    /// φ^m_n for n = 1..N (index n - 1).
    pub fn vector(&self, m: usize) -> Vec<Complex64> {
        (1..=self.n).map(|n| self.entry(m, n)).collect()
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        let l = self.modulus as u128;
        let r = (n as u128 * m as u128 % l) as f64;
        Complex64::from_polar((self.modulus as f64).sqrt().recip(), 2.0 * std::f64::consts::PI * r / self.modulus as f64)
    }

    /// ⟨a, φ^m⟩ = Σ_n a_n conj(φ^m_n), by direct summation.
    pub fn coefficient(&self, a: &[Complex64], m: usize) -> Complex64 {
        a.iter().enumerate().map(|(j, &v)| v * self.entry(m, j + 1).conj()).sum()
    }

    /// ⟨a, φ^m⟩ for m = 1..L (index m - 1) through one FFT of the sequence
    /// zero-padded to Z_L.
    pub fn transform(&self, a: &[Complex64]) -> Result<Vec<Complex64>> {
        if a.len() != self.n {
            return Err(Error::Parameter(format!("sequence of length {} for basis of length {}", a.len(), self.n)));
        }
        let mut buf = vec![Complex64::default(); self.modulus];
        buf[1..=self.n].copy_from_slice(a);
        self.forward.process(&mut buf);
        let scale = (self.modulus as f64).sqrt().recip();
        Ok((1..=self.modulus).map(|m| buf[m % self.modulus] * scale).collect())
    }

    /// Σ_m c_m φ^m on all of Z_L; entries 1..N are the sequence, the rest is
    /// the padding.
    pub fn synthesize_padded(&self, c: &[Complex64]) -> Result<Vec<Complex64>> {
        if c.len() != self.modulus {
            return Err(Error::Parameter(format!("{} coefficients for modulus {}", c.len(), self.modulus)));
        }
        let mut buf = vec![Complex64::default(); self.modulus];
        for (k, &v) in c.iter().enumerate() {
            buf[(k + 1) % self.modulus] = v;
        }
        self.inverse.process(&mut buf);
        let scale = (self.modulus as f64).sqrt().recip();
        Ok(buf.into_iter().map(|v| v * scale).collect())
    }
}

/// Coefficients against the first N vectors, the full set of L coefficients,
/// and the residual of reconstructing the sequence from the full set.
#[derive(Debug, Clone, PartialEq)]
pub struct Reexpansion {
    pub coefficients: Vec<Complex64>,
    pub full: Vec<Complex64>,
    pub residual: f64,
}

pub fn reexpand(a: &CoeffSequence) -> Result<Reexpansion> {
    let basis = DftBasis::new(a.len())?;
    let full = basis.transform(&a.values)?;
    let back = basis.synthesize_padded(&full)?;
    let mut residual = back[0].norm();
    for (j, v) in back.iter().enumerate().skip(1) {
        let want = if j <= a.len() { a.values[j - 1] } else { Complex64::default() };
        residual = residual.max((v - want).norm());
    }
    Ok(Reexpansion { coefficients: full[..a.len()].to_vec(), full, residual })
}

/// Requirements on the multiplier ψ: equal to 1 on the support of f and
/// supported in (3/4)U = [1/8, 7/8].
pub fn check_multiplier(psi: &SmoothWindow) -> Result<()> {
    let (c, d) = psi.support();
    let (a, b) = psi.plateau();
    if c < 0.125 || d > 0.875 {
        return Err(Error::Precondition(format!("multiplier support ({c}, {d}) leaves [1/8, 7/8]")));
    }
    if a > 1.0 / 3.0 || b < 2.0 / 3.0 {
        return Err(Error::Precondition(format!("multiplier plateau [{a}, {b}] does not cover [1/3, 2/3]")));
    }
    Ok(())
}

/// Σ_n c_n φ^m_n ψ(a_n) h_{I_n}^η on [-1/2, 3/2], a_n the left endpoint of I_n.
pub fn packet_from_sequence(
    c: &CoeffSequence,
    eta: f64,
    m: usize,
    psi: &SmoothWindow,
    samples_per_unit: u64,
) -> Result<SampledFunction<Complex64>> {
    check_multiplier(psi)?;
    let basis = DftBasis::new(c.len())?;
    let (_, table) = tables(c.s, eta, c.shift, &[Species::H], samples_per_unit)?.pop().expect("one table");
    let len = ((WINDOW.1 - WINDOW.0) * samples_per_unit as f64).round() as usize;
    let mut out = vec![Complex64::default(); len];
    let width = (-(c.s as f64)).exp2();
    for (j, &v) in c.values.iter().enumerate() {
        let n = j + 1;
        let left = width * j as f64 + c.shift;
        let w = v * basis.entry(m, n) * psi.value(left);
        if w == Complex64::default() {
            continue;
        }
        for (k, h) in table.entries(n as u64) {
            out[k] += w * h;
        }
    }
    SampledFunction::new(out, WINDOW.0, WINDOW.1, samples_per_unit)
}

/// The packet g^ψ_m of f at level s on the grid D + v.
pub fn packet(
    f: &SampledFunction,
    s: u32,
    eta: f64,
    shift: f64,
    m: usize,
    psi: &SmoothWindow,
) -> Result<SampledFunction<Complex64>> {
    check_multiplier(psi)?;
    let c = coeff_sequence(f, s, eta, shift)?;
    packet_from_sequence(&c, eta, m, psi, f.samples_per_unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelets::synthesize;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sequence(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    #[test]
    fn zero_function_gives_zero_sequence() {
        let f = SampledFunction::<f64>::zeros(0.0, 1.0, 1 << 10).unwrap();
        let c = coeff_sequence(&f, 3, 0.05, 0.0).unwrap();
        assert!(c.values.iter().all(|v| *v == Complex64::default()));
        let r = reexpand(&c).unwrap();
        assert!(r.full.iter().all(|v| *v == Complex64::default()));
    }

    #[test]
    fn single_wavelet_gives_unit_vector() {
        let (s, spu) = (4u32, 1u64 << 20);
        let mut coeffs = vec![0.0; 16];
        coeffs[6] = 1.0;
        let f = synthesize(&coeffs, Species::H, s, 0.0, 0.0, spu).unwrap().rewindow(0.0, 1.0).unwrap();
        let c = coeff_sequence(&f, s, 0.0, 0.0).unwrap();
        for (j, v) in c.values.iter().enumerate() {
            let want = if j == 6 { 1.0 } else { 0.0 };
            assert!((v.re - want).abs() < 1e-8, "n={}: {v}", j + 1);
        }
    }

    #[test]
    fn sequence_matches_direct_inner_products() {
        let (s, eta, spu) = (4u32, 1.0 / 32.0, 1u64 << 12);
        let w = SmoothWindow::new(0.34, 0.4, 0.6, 0.66).unwrap();
        let f = SampledFunction::from_fn(0.0, 1.0, spu, |x| w.value(x) * (9.0 * x).sin()).unwrap();
        let c = coeff_sequence(&f, s, eta, 0.01).unwrap();
        let shape = crate::wavelets::WaveletShape::new(Species::H, eta).unwrap();
        for n in 1..=16u64 {
            let iv = crate::sampled::DyadicInterval::new(s, n, 0.01).unwrap();
            let direct: f64 = f.nodes().zip(&f.values).map(|(x, v)| v * shape.eval(&iv, x)).sum::<f64>() * f.spacing();
            assert!((c.values[n as usize - 1].re - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn unit_vector_has_flat_transform() {
        let basis = DftBasis::new(8).unwrap();
        let mut a = vec![Complex64::default(); 8];
        a[0] = 1.0.into();
        let t = basis.transform(&a).unwrap();
        for v in &t {
            assert!((v.norm() - 17f64.sqrt().recip()).abs() < 1e-15);
        }
    }

    #[test]
    fn literal_vectors_have_half_norm() {
        let basis = DftBasis::new(16).unwrap();
        let v = basis.vector(3);
        let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((n2 - 16.0 / 33.0).abs() < 1e-14);
    }

    #[test]
    fn fft_matches_direct_coefficients() {
        let basis = DftBasis::new(32).unwrap();
        let a = random_sequence(32, 7);
        let t = basis.transform(&a).unwrap();
        for m in [1usize, 5, 32, 64, 65] {
            assert!((t[m - 1] - basis.coefficient(&a, m)).norm() < 1e-12);
        }
    }

    #[test]
    fn last_vector_is_constant() {
        let basis = DftBasis::new(8).unwrap();
        for v in basis.vector(17) {
            assert!((v - Complex64::new(17f64.sqrt().recip(), 0.0)).norm() < 1e-15);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn full_transform_is_unitary(level in 0u32..=10, seed in any::<u64>()) {
            let n = 1usize << level;
            let a = random_sequence(n, seed);
            let c = CoeffSequence::new(a.clone(), level, 0.0).unwrap();
            let r = reexpand(&c).unwrap();
            let e: f64 = r.full.iter().map(|v| v.norm_sqr()).sum();
            let norm = c.norm_sqr();
            prop_assert!((e - norm).abs() < 1e-10 * norm.max(1.0));
            prop_assert!(r.residual < 1e-12);
        }
    }

    #[test]
    fn packets_reassemble_projection() {
        let (s, eta, spu) = (3u32, 1.0 / 32.0, 1u64 << 10);
        let w = SmoothWindow::new(0.34, 0.4, 0.6, 0.66).unwrap();
        let f = SampledFunction::from_fn(0.0, 1.0, spu, |x| w.value(x) * (1.0 + 5.0 * x * x)).unwrap();
        let psi = SmoothWindow::new(0.15, 0.25, 0.75, 0.85).unwrap();
        let c = coeff_sequence(&f, s, eta, 0.0).unwrap();
        let r = reexpand(&c).unwrap();
        let unit = CoeffSequence::new(vec![Complex64::new(1.0, 0.0); 8], s, 0.0).unwrap();
        let mut sum = vec![Complex64::default(); 2 * spu as usize];
        for (k, coef) in r.full.iter().enumerate() {
            let g = packet_from_sequence(&unit, eta, k + 1, &psi, spu).unwrap();
            for (o, v) in sum.iter_mut().zip(&g.values) {
                *o += coef * v;
            }
        }
        let re: Vec<f64> = c.values.iter().map(|v| v.re).collect();
        let want = synthesize(&re, Species::H, s, eta, 0.0, spu).unwrap();
        let err = sum.iter().zip(&want.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn single_wavelet_packet_has_constant_modulus() {
        let (s, _, spu) = (3u32, 1.0 / 32.0, 1u64 << 10);
        let mut coeffs = vec![0.0; 8];
        coeffs[3] = 1.0;
        let f = synthesize(&coeffs, Species::H, s, 0.0, 0.0, spu).unwrap().rewindow(0.0, 1.0).unwrap();
        let psi = SmoothWindow::new(0.15, 0.25, 0.75, 0.85).unwrap();
        let norms: Vec<f64> =
            (1..=17).map(|m| packet(&f, s, 0.0, 0.0, m, &psi).unwrap().lp_norm(2.0)).collect();
        for n in &norms {
            assert!((n - norms[0]).abs() < 1e-12 * norms[0]);
        }
    }

    #[test]
    fn multiplier_preconditions() {
        let f = SampledFunction::<f64>::zeros(0.0, 1.0, 1 << 10).unwrap();
        let wide = SmoothWindow::new(0.05, 0.2, 0.8, 0.95).unwrap();
        assert!(matches!(packet(&f, 3, 0.03, 0.0, 1, &wide), Err(Error::Precondition(_))));
        let narrow = SmoothWindow::new(0.3, 0.4, 0.6, 0.7).unwrap();
        assert!(matches!(packet(&f, 3, 0.03, 0.0, 1, &narrow), Err(Error::Precondition(_))));
    }
}
