use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::overlap::MAX_HEATMAP_CELLS;
use super::polygon::{intersection_area, minkowski_sum, ConvexPolygon};
use super::rect::cap_rectangle;

/// Both sides of ∫|Σ_{m,n} G_m∗G_n|^p ≤ C_p Σ_{m,n} ∫|G_m∗G_n|^p for
/// G_m = a_m 1_{R_m}, sampled at raster cell centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstDecoupling {
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
    pub cells: usize,
}

struct Pair {
    weight: f64,
    multiplicity: f64,
    a: ConvexPolygon,
    neg_b: ConvexPolygon,
    sum: ConvexPolygon,
}

const BATCH: usize = 64;

/// Coarsest admissible raster: 2 cells per 2^{-2s}, i.e. 2C cells across the
/// short side of a cap rectangle.
pub const MIN_DECOUPLING_CELLS_PER_SCALE: f64 = 2.0;

/// `caps` lists (m, a_m); every ordered pair (m, n) enters once, computed as
/// m ≤ n with multiplicity 2 off the diagonal. The raster has
/// `cells_per_scale` cells per 2^{-2s}.
pub fn first_decoupling(caps: &[(u64, f64)], s: u32, c: f64, p: f64, cells_per_scale: f64) -> Result<FirstDecoupling> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("exponent {p} below 1")));
    }
    if cells_per_scale < MIN_DECOUPLING_CELLS_PER_SCALE {
        return Err(Error::Resolution(format!(
            "{cells_per_scale} cells per 2^-2s; at least {MIN_DECOUPLING_CELLS_PER_SCALE} required"
        )));
    }
    let rects: Vec<(f64, ConvexPolygon)> =
        caps.iter().map(|&(m, a)| Ok((a, cap_rectangle(m, s, c)?.polygon()))).collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for i in 0..rects.len() {
        for j in i..rects.len() {
            let (a, b) = (&rects[i], &rects[j]);
            pairs.push(Pair {
                weight: a.0 * b.0,
                multiplicity: if i == j { 1.0 } else { 2.0 },
                a: a.1.clone(),
                neg_b: b.1.reflect(),
                sum: minkowski_sum(&a.1, &b.1)?,
            });
        }
    }
    if pairs.is_empty() {
        return Ok(FirstDecoupling { p, lhs: 0.0, rhs: 0.0, ratio: None, cells: 0 });
    }
    let (x0, x1, y0, y1) = pairs.iter().map(|q| q.sum.bbox()).fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |a, b| (a.0.min(b.0), a.1.max(b.1), a.2.min(b.2), a.3.max(b.3)),
    );
    let cpu = cells_per_scale * (2.0 * s as f64).exp2();
    let full = Grid::covering(x0, x1, y0, y1, cpu);
    if full.ny > MAX_HEATMAP_CELLS {
        return Err(Error::Resource(format!("raster column of {} cells exceeds the budget of {MAX_HEATMAP_CELLS}", full.ny)));
    }
    // vertical strips of at most MAX_HEATMAP_CELLS cells, each pair clipped
    // to the strip columns
    let strip = (MAX_HEATMAP_CELLS / full.ny).max(1);
    let cell_area = (cpu * cpu).recip();
    let (mut lhs, mut rhs) = (0.0, 0.0);
    let mut start = 0;
    while start < full.nx {
        let cols = start..(start + strip).min(full.nx);
        let mut buf = vec![0.0; cols.len() * full.ny];
        let active: Vec<&Pair> = pairs
            .iter()
            .filter(|q| {
                let (bx0, bx1, _, _) = q.sum.bbox();
                let (c0, c1) = column_span(&full, bx0, bx1);
                c0 < cols.end && c1 >= cols.start
            })
            .collect();
        for batch in active.chunks(BATCH) {
            let parts: Vec<(Vec<(usize, f64)>, f64)> =
                batch.par_iter().map(|q| pair_samples(q, &full, cols.clone(), p)).collect();
            for (q, (samples, pow)) in batch.iter().zip(parts) {
                rhs += q.multiplicity * pow * cell_area;
                for (idx, v) in samples {
                    buf[idx] += q.multiplicity * v;
                }
            }
        }
        lhs += buf.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell_area;
        start = cols.end;
    }
    let cells = full.nx * full.ny;
    Ok(FirstDecoupling { p, lhs, rhs, ratio: (rhs > 0.0).then(|| lhs / rhs), cells })
}

/// Raster geometry without storage: cells of side 1/cells_per_unit snapped
/// to multiples of the cell size.
struct Grid {
    x0: f64,
    y0: f64,
    cells_per_unit: f64,
    nx: usize,
    ny: usize,
}

impl Grid {
    fn covering(xmin: f64, xmax: f64, ymin: f64, ymax: f64, cells_per_unit: f64) -> Self {
        let ix0 = (xmin * cells_per_unit).floor();
        let iy0 = (ymin * cells_per_unit).floor();
        let nx = ((xmax * cells_per_unit).ceil() - ix0).max(1.0) as usize;
        let ny = ((ymax * cells_per_unit).ceil() - iy0).max(1.0) as usize;
        Self { x0: ix0 / cells_per_unit, y0: iy0 / cells_per_unit, cells_per_unit, nx, ny }
    }

    fn center(&self, ix: usize, iy: usize) -> (f64, f64) {
        let h = 1.0 / self.cells_per_unit;
        (self.x0 + (ix as f64 + 0.5) * h, self.y0 + (iy as f64 + 0.5) * h)
    }
}

/// Columns of the raster whose centers lie in [x0, x1], as an inclusive pair
/// (empty when c0 > c1).
fn column_span(raster: &Grid, x0: f64, x1: f64) -> (usize, usize) {
    let cpu = raster.cells_per_unit;
    let c0 = ((x0 - raster.x0) * cpu - 0.5).ceil().max(0.0) as usize;
    let c1 = ((x1 - raster.x0) * cpu - 0.5).floor();
    if c1 < 0.0 {
        return (1, 0);
    }
    (c0, (c1 as usize).min(raster.nx - 1))
}

/// Values a_m a_n |R_m ∩ (z - R_n)| at the cell centers z inside R_m + R_n
/// within the column range, indexed relative to the range, and the sum of
/// their p-th powers.
fn pair_samples(q: &Pair, raster: &Grid, cols: std::ops::Range<usize>, p: f64) -> (Vec<(usize, f64)>, f64) {
    let cpu = raster.cells_per_unit;
    let (bx0, bx1, _, _) = q.sum.bbox();
    let (c0, c1) = column_span(raster, bx0, bx1);
    let mut out = Vec::new();
    let mut pow = 0.0;
    for col in c0.max(cols.start)..=c1.min(cols.end.saturating_sub(1)) {
        let (x, _) = raster.center(col, 0);
        let Some((lo, hi)) = q.sum.vertical_section(x) else { continue };
        let r0 = ((lo - raster.y0) * cpu - 0.5).ceil().max(0.0) as usize;
        let r1 = ((hi - raster.y0) * cpu - 0.5).floor();
        if r1 < 0.0 {
            continue;
        }
        for row in r0..=(r1 as usize).min(raster.ny - 1) {
            let z = raster.center(col, row);
            let v = q.weight * intersection_area(&q.a, &q.neg_b.translate(z));
            if v != 0.0 {
                pow += v.abs().powf(p);
                out.push(((col - cols.start) * raster.ny + row, v));
            }
        }
    }
    (out, pow)
}
