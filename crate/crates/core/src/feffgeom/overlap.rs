use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::RasterField;

use super::polygon::{clip, minkowski_sum, signed_area, ConvexPolygon};
use super::rect::cap_rectangle;

/// Default raster cells per 2^{-2s}.
pub const DEFAULT_CELLS_PER_SCALE: f64 = 16.0;
/// Coarsest admissible raster: 8 cells per 2^{-2s}.
pub const MIN_CELLS_PER_SCALE: f64 = 8.0;
/// Largest raster the heatmap may allocate.
pub const MAX_HEATMAP_CELLS: usize = 1 << 24;

/// R_m + R_n for every ordered pair (m, n), 1 ≤ m, n ≤ 2^s.
pub fn sum_polygons(s: u32, c: f64) -> Result<Vec<ConvexPolygon>> {
    let caps: Vec<ConvexPolygon> = (1..=(1u64 << s)).map(|m| cap_rectangle(m, s, c).map(|r| r.polygon())).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(caps.len() * caps.len());
    for a in &caps {
        for b in &caps {
            out.push(minkowski_sum(a, b)?);
        }
    }
    Ok(out)
}

fn check_resolution(s: u32, cells_per_unit: f64) -> Result<()> {
    let scale = (-2.0 * s as f64).exp2();
    if cells_per_unit * scale < MIN_CELLS_PER_SCALE {
        return Err(Error::Resolution(format!(
            "{cells_per_unit} cells per unit is coarser than 2^-{}/{MIN_CELLS_PER_SCALE}",
            2 * s
        )));
    }
    Ok(())
}

/// Maximum over raster cell centers of the number of polygons containing the
/// center. Columns are swept independently: each polygon contributes one
/// y-interval per column it crosses.
pub fn max_cover(polys: &[ConvexPolygon], cells_per_unit: f64) -> u32 {
    if polys.is_empty() {
        return 0;
    }
    let (x0, _, y0, _) = polys.iter().map(|p| p.bbox()).fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |a, b| (a.0.min(b.0), a.1.max(b.1), a.2.min(b.2), a.3.max(b.3)),
    );
    let h = 1.0 / cells_per_unit;
    let (x0, y0) = ((x0 * cells_per_unit).floor() * h, (y0 * cells_per_unit).floor() * h);
    let mut events: Vec<(i64, i64, i32)> = polys
        .par_iter()
        .flat_map_iter(|p| {
            let (bx0, bx1, _, _) = p.bbox();
            let c0 = ((bx0 - x0) * cells_per_unit - 0.5).ceil() as i64;
            let c1 = ((bx1 - x0) * cells_per_unit - 0.5).floor() as i64;
            (c0.max(0)..=c1).flat_map(move |col| {
                let x = x0 + (col as f64 + 0.5) * h;
                p.vertical_section(x)
                    .and_then(|(lo, hi)| {
                        let r0 = ((lo - y0) * cells_per_unit - 0.5).ceil() as i64;
                        let r1 = ((hi - y0) * cells_per_unit - 0.5).floor() as i64;
                        (r1 >= r0).then_some([(col, r0, 1), (col, r1 + 1, -1)])
                    })
                    .into_iter()
                    .flatten()
            })
        })
        .collect();
    events.par_sort_unstable();
    let mut best = 0i32;
    let mut depth = 0i32;
    let mut col = i64::MIN;
    for &(c, _, d) in &events {
        if c != col {
            col = c;
            depth = 0;
        }
        depth += d;
        best = best.max(depth);
    }
    best as u32
}

/// max over raster cells of #{(m, n) : the cell center lies in R_m + R_n}.
pub fn overlap_count(s: u32, c: f64, cells_per_unit: f64) -> Result<u32> {
    if s > 8 {
        return Err(Error::Parameter(format!("level {s} above the supported maximum 8")));
    }
    check_resolution(s, cells_per_unit)?;
    Ok(max_cover(&sum_polygons(s, c)?, cells_per_unit))
}

/// Largest number of polygons whose common intersection has positive area,
/// by exhaustive search over subsets.
pub fn arrangement_depth(polys: &[ConvexPolygon]) -> Result<u32> {
    if polys.len() > 20 {
        return Err(Error::Resource(format!("{} polygons is too many for exhaustive search", polys.len())));
    }
    let scale = polys.iter().map(|p| p.area()).fold(0.0, f64::max);
    let mut best = 0u32;
    for mask in 1u32..(1 << polys.len()) {
        let k = mask.count_ones();
        if k <= best {
            continue;
        }
        let mut region: Option<Vec<_>> = None;
        for (i, p) in polys.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            region = Some(match region {
                None => p.vertices().to_vec(),
                Some(r) => clip(&r, p.vertices()),
            });
        }
        if region.is_some_and(|r| signed_area(&r) > 1e-12 * scale) {
            best = k;
        }
    }
    Ok(best)
}

/// Coverage counts on a raster for plotting.
pub fn overlap_heatmap(s: u32, c: f64, cells_per_unit: f64) -> Result<RasterField> {
    let polys = sum_polygons(s, c)?;
    let (x0, x1, y0, y1) = polys.iter().map(|p| p.bbox()).fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |a, b| (a.0.min(b.0), a.1.max(b.1), a.2.min(b.2), a.3.max(b.3)),
    );
    let mut raster = RasterField::covering(x0, x1, y0, y1, cells_per_unit);
    if raster.cells.len() > MAX_HEATMAP_CELLS {
        return Err(Error::Resource(format!(
            "heatmap of {} cells exceeds the budget of {MAX_HEATMAP_CELLS}",
            raster.cells.len()
        )));
    }
    for p in &polys {
        let (bx0, bx1, _, _) = p.bbox();
        let c0 = ((bx0 - raster.x0) * cells_per_unit - 0.5).ceil().max(0.0) as usize;
        let c1 = (((bx1 - raster.x0) * cells_per_unit - 0.5).floor() as usize).min(raster.nx - 1);
        for col in c0..=c1 {
            let (x, _) = raster.center(col, 0);
            if let Some((lo, hi)) = p.vertical_section(x) {
                let r0 = ((lo - raster.y0) * cells_per_unit - 0.5).ceil().max(0.0) as usize;
                let r1 = ((hi - raster.y0) * cells_per_unit - 0.5).floor();
                if r1 < 0.0 {
                    continue;
                }
                for row in r0..=(r1 as usize).min(raster.ny - 1) {
                    raster.cells[row * raster.nx + col] += 1.0;
                }
            }
        }
    }
    Ok(raster)
}
