use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

use super::dirichlet::{dirichlet, order_for, DirichletSpec};

/// A sampled function with a declared effective support [a, b).
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedFunction {
    pub f: SampledFunction<Complex64>,
    pub support: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecouplingReport {
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
    pub n_functions: usize,
    pub disjointness_flag: bool,
}

impl DecouplingReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Half-open intervals that pairwise share no interior point.
pub fn supports_disjoint(supports: &[(f64, f64)]) -> bool {
    let mut s = supports.to_vec();
    s.sort_by(|x, y| x.0.total_cmp(&y.0));
    s.windows(2).all(|w| w[0].1 <= w[1].0)
}

/// ‖Σ f_m‖_p^p and Σ ‖f_m‖_p^p on the common sample grid, whether or not
/// the declared supports are disjoint.
pub fn decouple_measure(functions: &[TaggedFunction], p: f64) -> Result<DecouplingReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("exponent {p} outside (1, ∞)")));
    }
    let first = functions.first().ok_or_else(|| Error::Parameter("no functions to decouple".into()))?;
    for t in functions {
        if !t.f.same_grid(&first.f) {
            return Err(Error::Parameter("functions are sampled on different grids".into()));
        }
        if !(t.support.0 < t.support.1) {
            return Err(Error::Parameter(format!("empty effective support {:?}", t.support)));
        }
    }
    let h = first.f.spacing();
    let mut lhs = 0.0;
    for j in 0..first.f.len() {
        let v: Complex64 = functions.iter().map(|t| t.f.values[j]).sum();
        lhs += v.norm().powf(p);
    }
    lhs *= h;
    let rhs: f64 = functions.iter().map(|t| t.f.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * h).sum();
    let supports: Vec<_> = functions.iter().map(|t| t.support).collect();
    Ok(DecouplingReport {
        p,
        lhs,
        rhs,
        ratio: (rhs > 0.0).then(|| lhs / rhs),
        n_functions: functions.len(),
        disjointness_flag: supports_disjoint(&supports),
    })
}

/// As [`decouple_measure`], failing when the effective supports overlap.
pub fn decouple_check(functions: &[TaggedFunction], p: f64) -> Result<DecouplingReport> {
    let report = decouple_measure(functions, p)?;
    if !report.disjointness_flag {
        return Err(Error::Validation(format!(
            "effective supports overlap; measured {}",
            report.to_json()
        )));
    }
    Ok(report)
}

/// ξ ↦ D_M(2^{-s}(ξ - c_j)) for c_j = j·spacing, j = 0..count, with
/// M = 2^{(1-λ)s} and effective supports [c_j - spacing/2, c_j + spacing/2).
/// The window extends count·spacing beyond the outer centers.
pub fn translated_dirichlet_family(s: u32, lambda: f64, count: usize, spacing: f64) -> Result<Vec<TaggedFunction>> {
    if count == 0 {
        return Err(Error::Parameter("empty family".into()));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::Parameter(format!("spacing {spacing} must be positive")));
    }
    let spec = DirichletSpec::dilated(order_for(lambda, s), s)?;
    let step = spacing;
    let pad = count as f64 * step;
    let left = (-pad).floor();
    let right = ((count - 1) as f64 * step + pad).ceil();
    let spu = ((32.0 / step).ceil() as u64).next_power_of_two();
    if ((right - left) * spu as f64) * count as f64 > 2f64.powi(27) {
        return Err(Error::Resource(format!("{count} kernels on [{left}, {right}) at {spu} samples per unit")));
    }
    (0..count)
        .map(|j| {
            let c = j as f64 * step;
            let f = SampledFunction::from_fn(left, right, spu, |x| dirichlet(&spec, x - c))?;
            Ok(TaggedFunction { f, support: ((j as f64 - 0.5) * step, (j as f64 + 0.5) * step) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(left: f64, right: f64, a: f64, b: f64) -> TaggedFunction {
        let f = SampledFunction::from_fn(left, right, 64, |x| {
            if (a..b).contains(&x) {
                Complex64::new((x - a) * (b - x), 0.3)
            } else {
                Complex64::default()
            }
        })
        .unwrap();
        TaggedFunction { f, support: (a, b) }
    }

    #[test]
    fn disjoint_supports_are_exact() {
        let fs = vec![bump(0.0, 4.0, 0.0, 1.0), bump(0.0, 4.0, 1.0, 2.5), bump(0.0, 4.0, 3.0, 4.0)];
        let r = decouple_check(&fs, 4.0).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-14 * r.rhs);
        assert!(r.disjointness_flag);
    }

    #[test]
    fn single_function_ratio_one() {
        let r = decouple_check(&[bump(0.0, 2.0, 0.5, 1.5)], 3.0).unwrap();
        assert_eq!(r.ratio, Some(1.0));
    }

    #[test]
    fn overlap_is_flagged() {
        let fs = vec![bump(0.0, 4.0, 0.0, 2.0), bump(0.0, 4.0, 1.0, 3.0)];
        assert!(matches!(decouple_check(&fs, 4.0), Err(Error::Validation(_))));
        let r = decouple_measure(&fs, 4.0).unwrap();
        assert!(!r.disjointness_flag);
        assert!(r.lhs > r.rhs);
    }

    #[test]
    fn translated_kernels_decouple_stably() {
        let step = (0.3f64 * 6.0).exp2();
        let ratio = |n, spacing| {
            decouple_check(&translated_dirichlet_family(6, 0.3, n, spacing).unwrap(), 4.0).unwrap().ratio.unwrap()
        };
        // main lobes overlap at spacing 2^{λs}; the ratio saturates near 42
        let (r8, r16) = (ratio(8, step), ratio(16, step));
        assert!(r16 < 48.0 && r16 / r8 < 1.1, "{r8} {r16}");
        let wide = ratio(16, 2.0 * std::f64::consts::PI * step);
        assert!(wide < 2.0, "{wide}");
    }

    #[test]
    fn report_json_fields() {
        let r = decouple_check(&[bump(0.0, 2.0, 0.5, 1.5)], 2.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for k in ["p", "lhs", "rhs", "ratio", "n_functions", "disjointness_flag"] {
            assert!(v.get(k).is_some(), "{k}");
        }
    }
}
