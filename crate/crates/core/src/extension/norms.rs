use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

use super::field::{Amplitude, ExtensionField, RowEngine, XiGrid};

/// Exponents at or above this are treated as the sup norm.
pub const SUP_EXPONENT: f64 = 1e6;

fn check_coverage(grid: &XiGrid, radius: f64) -> Result<()> {
    let (d1, d2) = (grid.step1(), grid.step2());
    let covered = grid.xi1.0 - 0.5 * d1 <= -radius
        && grid.xi1.1 + 0.5 * d1 >= radius
        && grid.xi2.0 - 0.5 * d2 <= -radius
        && grid.xi2.1 + 0.5 * d2 >= radius;
    if !covered {
        return Err(Error::Coverage(format!(
            "B(0, {radius}) is not inside [{}, {}] x [{}, {}]",
            grid.xi1.0, grid.xi1.1, grid.xi2.0, grid.xi2.1
        )));
    }
    Ok(())
}

/// Per-row accumulator: Σ |v|^q over nodes inside the ball, or the max for sup.
fn row_sum(row: &[Complex64], grid: &XiGrid, xi2: f64, q: f64, radius: f64) -> f64 {
    let r2 = radius * radius;
    let mut acc = 0.0;
    for (i1, v) in row.iter().enumerate() {
        let xi1 = grid.node1(i1);
        if xi1 * xi1 + xi2 * xi2 <= r2 {
            let a = v.norm();
            if q >= SUP_EXPONENT {
                acc = f64::max(acc, a);
            } else {
                acc += a.powf(q);
            }
        }
    }
    acc
}

fn finish(row_sums: &[f64], grid: &XiGrid, q: f64) -> f64 {
    if q >= SUP_EXPONENT {
        return row_sums.iter().copied().fold(0.0, f64::max);
    }
    let total: f64 = row_sums.iter().sum();
    let cell = grid.step1().max(f64::MIN_POSITIVE) * grid.step2().max(f64::MIN_POSITIVE);
    (total * cell).powf(1.0 / q)
}

/// (Σ_{cells with center in B(0,r)} |v|^q · cell area)^{1/q}; q ≥ 1e6 is the sup.
pub fn lq_norm_ball(field: &ExtensionField, q: f64, radius: f64) -> Result<f64> {
    if q < 1.0 {
        return Err(Error::Parameter(format!("exponent {q} below 1")));
    }
    check_coverage(&field.grid, radius)?;
    let sums: Vec<f64> = (0..field.grid.n2)
        .map(|i2| row_sum(field.row(i2), &field.grid, field.grid.node2(i2), q, radius))
        .collect();
    Ok(finish(&sums, &field.grid, q))
}

/// ‖Ef‖_{L^q(B(0,r))} for several exponents at once without storing the
/// field: rows are evaluated in parallel and reduced in row order. For real
/// f on a symmetric grid only rows with ξ₂ ≥ 0 are evaluated, using
/// |Ef(-ξ)| = |Ef(ξ)|.
pub fn extension_ball_norms<T: Amplitude>(
    f: &SampledFunction<T>,
    grid: XiGrid,
    radius: f64,
    exponents: &[f64],
) -> Result<Vec<f64>> {
    if let Some(&q) = exponents.iter().find(|&&q| q < 1.0) {
        return Err(Error::Parameter(format!("exponent {q} below 1")));
    }
    check_coverage(&grid, radius)?;
    let engine = RowEngine::new(f, grid)?;
    let mirror = T::IS_REAL && grid.is_symmetric() && grid.n2 % 2 == 1;
    let mid = grid.n2 / 2;
    let rows: Vec<usize> = if mirror { (mid..grid.n2).collect() } else { (0..grid.n2).collect() };
    let per_row: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|&i2| {
            let xi2 = grid.node2(i2);
            if xi2.abs() > radius {
                return vec![0.0; exponents.len()];
            }
            let row = engine.row(i2);
            exponents.iter().map(|&q| row_sum(&row, &grid, xi2, q, radius)).collect()
        })
        .collect();
    Ok(exponents
        .iter()
        .enumerate()
        .map(|(k, &q)| {
            let mut sums: Vec<f64> = Vec::with_capacity(grid.n2);
            for (r, &i2) in rows.iter().enumerate() {
                let v = per_row[r][k];
                sums.push(v);
                if mirror && i2 != mid {
                    sums.push(v);
                }
            }
            finish(&sums, &grid, q)
        })
        .collect())
}
