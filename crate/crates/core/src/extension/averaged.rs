use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sampled::SampledFunction;
use crate::wavelets::perturbed_projection;

use super::field::{extend_field, ExtensionField, XiGrid};

/// (1/K) Σ_j E(P̃_s^{v_j} f) with v_j = j·2^{-s}/K.
pub fn averaged_extension(f: &SampledFunction, s: u32, eta: f64, translates: usize, grid: XiGrid) -> Result<ExtensionField> {
    if translates == 0 {
        return Err(Error::Parameter("at least one translate is required".into()));
    }
    let len = (-(s as f64)).exp2();
    let mut acc = vec![Complex64::default(); grid.cells()];
    for j in 0..translates {
        let v = j as f64 * len / translates as f64;
        let (_, proj) = perturbed_projection(f, s, eta, v)?;
        let field = extend_field(&proj, grid)?;
        for (a, b) in acc.iter_mut().zip(&field.values) {
            *a += b;
        }
    }
    let k = translates as f64;
    Ok(ExtensionField { grid, values: acc.into_iter().map(|v| v / k).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::SmoothWindow;

    fn smooth_f(spu: u64) -> SampledFunction {
        let w = SmoothWindow::new(0.34, 0.45, 0.55, 0.66).unwrap();
        SampledFunction::from_fn(0.0, 1.0, spu, |x| w.value(x) * (20.0 * x).cos()).unwrap()
    }

    #[test]
    fn single_translate_is_plain_projection() {
        let f = smooth_f(1 << 10);
        let grid = XiGrid::new((-40.0, 40.0), (-20.0, 20.0), 9, 5).unwrap();
        let avg = averaged_extension(&f, 3, 1.0 / 64.0, 1, grid).unwrap();
        let (_, p) = perturbed_projection(&f, 3, 1.0 / 64.0, 0.0).unwrap();
        assert_eq!(avg.values, extend_field(&p, grid).unwrap().values);
    }

    #[test]
    fn zero_input() {
        let f = SampledFunction::<f64>::zeros(0.0, 1.0, 1 << 10).unwrap();
        let grid = XiGrid::new((-4.0, 4.0), (-2.0, 2.0), 3, 3).unwrap();
        let avg = averaged_extension(&f, 3, 1.0 / 64.0, 4, grid).unwrap();
        assert!(avg.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn translate_refinement_converges() {
        let f = smooth_f(1 << 12);
        let grid = XiGrid::new((-60.0, 60.0), (-30.0, 30.0), 13, 7).unwrap();
        let fields: Vec<ExtensionField> =
            [1, 2, 4, 8, 16].iter().map(|&k| averaged_extension(&f, 4, 1.0 / 64.0, k, grid).unwrap()).collect();
        let diffs: Vec<f64> = fields
            .windows(2)
            .map(|w| w[0].values.iter().zip(&w[1].values).fold(0.0f64, |m, (a, b)| m.max((a - b).norm())))
            .collect();
        for d in diffs.windows(2) {
            assert!(d[1] < d[0], "{diffs:?}");
        }
    }
}
