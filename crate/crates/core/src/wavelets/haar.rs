use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

use super::coeffs::{Species, System, WaveletCoeffs};

/// Value of the L²-normalized Haar function h_I at x.
pub fn haar_wavelet(level: u32, index: u64, x: f64) -> f64 {
    let len = (-(level as f64)).exp2();
    let left = len * (index - 1) as f64;
    let mid = left + 0.5 * len;
    let amp = len.sqrt().recip();
    if x < left || x >= left + len {
        0.0
    } else if x < mid {
        amp
    } else {
        -amp
    }
}

/// Cell sums over the 2^level intervals of [0,1].
fn cell_sums(f: &SampledFunction, level: u32) -> Vec<f64> {
    let range = f.index_range(0.0, 1.0);
    let per_cell = (f.samples_per_unit >> level) as usize;
    f.values[range].chunks(per_cell).map(|c| c.iter().sum()).collect()
}

/// ⟨f, h_I⟩ for every dyadic I ⊆ [0,1] with level ≤ t_max.
///
/// Inner products are exact for the midpoint rule: h_I is constant on every
/// sample cell once samples_per_unit ≥ 2^{t_max+1}; the transform runs the
/// usual fine-to-coarse cascade of cell sums.
pub fn haar_transform(f: &SampledFunction, t_max: u32) -> Result<WaveletCoeffs> {
    let needed = 1u64.checked_shl(t_max + 2).unwrap_or(u64::MAX);
    if f.samples_per_unit < needed {
        return Err(Error::Resolution(format!(
            "{} samples per unit, level {t_max} needs at least {needed}",
            f.samples_per_unit
        )));
    }
    if f.left > 0.0 || f.right < 1.0 {
        return Err(Error::Precondition(format!("sample window [{}, {}) does not contain [0,1]", f.left, f.right)));
    }
    f.check_support(0.0, 1.0)?;
    let mean = f.integral();
    if mean.abs() > 1e-10 {
        return Err(Error::Precondition(format!("mean over [0,1] is {mean:e}; subtract it first")));
    }
    let h = f.spacing();
    let mut coeffs = WaveletCoeffs::new(System::Haar, 0.0, f.samples_per_unit);
    let mut sums = cell_sums(f, t_max + 1);
    for level in (0..=t_max).rev() {
        let amp = (level as f64 / 2.0).exp2();
        let parents: Vec<f64> = sums.chunks(2).map(|p| p[0] + p[1]).collect();
        for (n, pair) in sums.chunks(2).enumerate() {
            coeffs.insert(level, n as u64 + 1, Species::H, (pair[0] - pair[1]) * h * amp);
        }
        sums = parents;
    }
    Ok(coeffs)
}

/// Sample level-t averages implied by the coefficients of levels < t.
fn averages(coeffs: &WaveletCoeffs, t: u32) -> Vec<f64> {
    let mut avg = vec![0.0];
    for level in 0..t {
        let amp = (level as f64 / 2.0).exp2();
        let c = coeffs.level_values(level, Species::H);
        avg = avg
            .iter()
            .zip(&c)
            .flat_map(|(&a, &ci)| [a + ci * amp, a - ci * amp])
            .collect();
    }
    avg
}

fn expand(avg: &[f64], samples_per_unit: u64) -> Result<SampledFunction> {
    let per_cell = samples_per_unit as usize / avg.len();
    let values = avg.iter().flat_map(|&a| std::iter::repeat_n(a, per_cell)).collect();
    SampledFunction::new(values, 0.0, 1.0, samples_per_unit)
}

/// Q_s f: the sum of ⟨f,h_I⟩h_I over all I with |I| > 2^{-s}, i.e. the average
/// of the mean-zero f over each level-s interval. Sampled on [0,1] at the
/// resolution of the original samples.
pub fn project_qs(coeffs: &WaveletCoeffs, s: u32) -> Result<SampledFunction> {
    let available = coeffs.max_level().unwrap_or(0);
    if s > available {
        return Err(Error::Range { requested: s, available });
    }
    expand(&averages(coeffs, s), coeffs.samples_per_unit)
}

/// P_t f = Σ_{|I| = 2^{-t}} ⟨f,h_I⟩h_I.
pub fn project_pt(coeffs: &WaveletCoeffs, t: u32) -> Result<SampledFunction> {
    let available = coeffs.max_level().unwrap_or(0);
    if t > available {
        return Err(Error::Range { requested: t, available });
    }
    let amp = (t as f64 / 2.0).exp2();
    let avg: Vec<f64> = coeffs
        .level_values(t, Species::H)
        .iter()
        .flat_map(|&c| [c * amp, -c * amp])
        .collect();
    expand(&avg, coeffs.samples_per_unit)
}
