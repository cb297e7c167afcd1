use rayon::prelude::*;

use crate::cutoff::{bump_mass_2d, mollifier_2d};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::raster::RasterField;
use crate::sampled::DyadicInterval;

/// Minimum raster cells per 2^{-2s}.
pub const MIN_CELLS_PER_SCALE: f64 = 8.0;

/// G = φ_s ∗ Φ_*(a·1_I), φ_s(z) = (2^{4s}/c²) φ(z/(c 2^{-2s})), rasterized at
/// `cells_per_unit`: G(z) = a ∫_I φ_s(z - (x, x²)) dx at each cell center.
pub fn mollified_pushforward(
    amplitude: f64,
    interval: &DyadicInterval,
    s: u32,
    c: f64,
    cells_per_unit: f64,
) -> Result<RasterField> {
    if !(c > 0.0) {
        return Err(Error::Parameter(format!("mollifier constant {c} must be positive")));
    }
    let scale = (-2.0 * s as f64).exp2();
    if cells_per_unit * scale < MIN_CELLS_PER_SCALE {
        return Err(Error::Resolution(format!(
            "{cells_per_unit} cells per unit is coarser than {MIN_CELLS_PER_SCALE} per 2^-{}",
            2 * s
        )));
    }
    let radius = c * scale;
    let (l, r) = (interval.left(), interval.right());
    let (ylo, yhi) = if l <= 0.0 && r >= 0.0 { (0.0, (l * l).max(r * r)) } else { ((l * l).min(r * r), (l * l).max(r * r)) };
    let mut raster = RasterField::covering(l - radius, r + radius, ylo - radius, yhi + radius, cells_per_unit);
    if amplitude == 0.0 {
        return Ok(raster);
    }
    let gl = GaussLegendre::new(8);
    let panel = radius / 4.0;
    let norm = amplitude / (radius * radius);
    let nx = raster.nx;
    let grid = raster.clone();
    raster.cells.par_chunks_mut(nx).enumerate().for_each(|(iy, row)| {
        for (ix, cell) in row.iter_mut().enumerate() {
            let (zx, zy) = grid.center(ix, iy);
            // only x with |zx - x| < radius can reach z
            let a = (zx - radius).max(l);
            let b = (zx + radius).min(r);
            if b <= a {
                continue;
            }
            let panels = ((b - a) / panel).ceil().max(1.0) as usize;
            let v = gl.integrate_composite(&[a, b], panels, |x| {
                mollifier_2d((zx - x) / radius, (zy - x * x) / radius)
            });
            *cell = norm * v;
        }
    });
    Ok(raster)
}

/// Upper bound 2^{2s}·(2 sup φ / c)·|a| for the pushforward: the segment of the
/// curve inside a ball of radius c2^{-2s} has x-extent at most 2c2^{-2s}.
pub fn pushforward_sup_bound(amplitude: f64, s: u32, c: f64) -> f64 {
    let sup_phi = (-1.0f64).exp() / bump_mass_2d();
    (2.0 * s as f64).exp2() * 2.0 * sup_phi / c * amplitude.abs()
}

/// Distance from z to the curve piece {(x, x²) : x ∈ [l, r]}.
pub fn distance_to_cap(z: (f64, f64), l: f64, r: f64) -> f64 {
    // minimize (x - zx)² + (x² - zy)² over [l, r]: cubic stationarity plus ends
    let d = |x: f64| (x - z.0).hypot(x * x - z.1);
    let mut best = d(l).min(d(r));
    let samples = 64;
    let mut prev = l;
    for k in 1..=samples {
        let x = l + (r - l) * k as f64 / samples as f64;
        // golden-section refinement on each sub-interval
        let (mut a, mut b) = (prev, x);
        for _ in 0..60 {
            let m1 = a + 0.381_966_011_250_105_1 * (b - a);
            let m2 = b - 0.381_966_011_250_105_1 * (b - a);
            if d(m1) < d(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        best = best.min(d(0.5 * (a + b)));
        prev = x;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_gives_zero_raster() {
        let i = DyadicInterval::new(2, 3, 0.0).unwrap();
        let r = mollified_pushforward(0.0, &i, 2, 1.0, 256.0).unwrap();
        assert!(r.cells.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn resolution_guard() {
        let i = DyadicInterval::new(2, 3, 0.0).unwrap();
        assert!(matches!(mollified_pushforward(1.0, &i, 2, 1.0, 64.0), Err(Error::Resolution(_))));
    }

    #[test]
    fn mass_sup_and_support() {
        let s = 2;
        let i = DyadicInterval::new(s, 3, 0.0).unwrap();
        let r = mollified_pushforward(1.0, &i, s, 1.0, 8.0 * 16.0).unwrap();
        assert!((r.mass() / i.length() - 1.0).abs() < 1e-3, "{}", r.mass());
        assert!(r.max() <= pushforward_sup_bound(1.0, s, 1.0));
        let radius = 1.0 / 16.0;
        for iy in 0..r.ny {
            for ix in 0..r.nx {
                if r.get(ix, iy) > 0.0 {
                    assert!(distance_to_cap(r.center(ix, iy), i.left(), i.right()) < radius + 1e-12);
                }
            }
        }
    }
}
