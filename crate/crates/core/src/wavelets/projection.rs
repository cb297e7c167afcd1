use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

use super::alpert::{LevelTable, WaveletShape};
use super::coeffs::{Species, System, WaveletCoeffs};

/// Support required of inputs to the perturbed projections.
pub const SUPPORT: (f64, f64) = (1.0 / 3.0, 2.0 / 3.0);
/// Sample window of projected functions; holds every level-s wavelet of a
/// grid shifted by at most 2^{-s}.
pub const WINDOW: (f64, f64) = (-0.5, 1.5);

pub(crate) fn check_inputs(f: &SampledFunction, s: u32, eta: f64, shift: f64) -> Result<()> {
    if s > 20 {
        return Err(Error::Parameter(format!("level {s} too large")));
    }
    if !(0.0..=0.125).contains(&eta) {
        return Err(Error::Parameter(format!("smoothing width {eta} outside [0, 1/8]")));
    }
    let len = (-(s as f64)).exp2();
    if shift.abs() > len {
        return Err(Error::Parameter(format!("grid shift {shift} exceeds 2^-{s}")));
    }
    if f.samples_per_unit < 1u64 << (s + 4) {
        return Err(Error::Resolution(format!(
            "{} samples per unit; level {s} needs at least {}",
            f.samples_per_unit,
            1u64 << (s + 4)
        )));
    }
    f.check_support(SUPPORT.0, SUPPORT.1)
}

fn system(eta: f64) -> System {
    if eta == 0.0 {
        System::Alpert
    } else {
        System::SmoothAlpert { eta }
    }
}

/// Level-s tables for the requested species on the projection window.
pub(crate) fn tables(
    s: u32,
    eta: f64,
    shift: f64,
    species: &[Species],
    samples_per_unit: u64,
) -> Result<Vec<(Species, LevelTable)>> {
    let len = ((WINDOW.1 - WINDOW.0) * samples_per_unit as f64).round() as usize;
    species
        .iter()
        .map(|&sp| {
            let shape = WaveletShape::new(sp, eta)?;
            Ok((sp, LevelTable::new(&shape, s, shift, WINDOW.0, len, samples_per_unit)?))
        })
        .collect()
}

/// Coefficients ⟨f, w_I^η⟩ over the level-s intervals of the grid shifted by
/// `shift`, for the given species, and the resulting projection sampled on
/// [-1/2, 3/2].
pub fn perturbed_projection_species(
    f: &SampledFunction,
    s: u32,
    eta: f64,
    shift: f64,
    species: &[Species],
) -> Result<(WaveletCoeffs, SampledFunction)> {
    check_inputs(f, s, eta, shift)?;
    let g = f.rewindow(WINDOW.0, WINDOW.1)?;
    let mut coeffs = WaveletCoeffs::new(system(eta), shift, f.samples_per_unit);
    let mut out = vec![0.0; g.len()];
    for (sp, table) in tables(s, eta, shift, species, f.samples_per_unit)? {
        for n in 1..=(1u64 << s) {
            let c = table.inner(&g, n);
            coeffs.insert(s, n, sp, c);
            table.accumulate(&mut out, n, c);
        }
    }
    let proj = SampledFunction::new(out, WINDOW.0, WINDOW.1, f.samples_per_unit)?;
    Ok((coeffs, proj))
}

/// P̃_s f = Σ_I Σ_{w∈{h,k}} ⟨f, w_I^η⟩ w_I^η over the level-s intervals of D + v.
pub fn perturbed_projection(
    f: &SampledFunction,
    s: u32,
    eta: f64,
    shift: f64,
) -> Result<(WaveletCoeffs, SampledFunction)> {
    perturbed_projection_species(f, s, eta, shift, &Species::BOTH)
}

/// Σ_I c_I w_I^η sampled on [-1/2, 3/2] for level-s coefficients of one species.
pub fn synthesize(
    coeffs: &[f64],
    species: Species,
    s: u32,
    eta: f64,
    shift: f64,
    samples_per_unit: u64,
) -> Result<SampledFunction> {
    if coeffs.len() != 1usize << s {
        return Err(Error::Parameter(format!("{} coefficients for level {s}", coeffs.len())));
    }
    let (_, table) = tables(s, eta, shift, &[species], samples_per_unit)?.pop().expect("one table");
    let mut out = vec![0.0; ((WINDOW.1 - WINDOW.0) * samples_per_unit as f64).round() as usize];
    for (n, &c) in coeffs.iter().enumerate() {
        table.accumulate(&mut out, n as u64 + 1, c);
    }
    SampledFunction::new(out, WINDOW.0, WINDOW.1, samples_per_unit)
}
