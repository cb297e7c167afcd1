//! Uniform 2-D rasters of real values.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cells of side 1/cells_per_unit with lower-left corner (x0, y0); row-major,
/// row index along y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterField {
    pub x0: f64,
    pub y0: f64,
    pub cells_per_unit: f64,
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<f64>,
}

impl RasterField {
    pub fn zeros(x0: f64, y0: f64, cells_per_unit: f64, nx: usize, ny: usize) -> Self {
        Self { x0, y0, cells_per_unit, nx, ny, cells: vec![0.0; nx * ny] }
    }

    /// Raster snapped to multiples of the cell size that covers the box.
    pub fn covering(xmin: f64, xmax: f64, ymin: f64, ymax: f64, cells_per_unit: f64) -> Self {
        let ix0 = (xmin * cells_per_unit).floor();
        let iy0 = (ymin * cells_per_unit).floor();
        let nx = ((xmax * cells_per_unit).ceil() - ix0).max(1.0) as usize;
        let ny = ((ymax * cells_per_unit).ceil() - iy0).max(1.0) as usize;
        Self::zeros(ix0 / cells_per_unit, iy0 / cells_per_unit, cells_per_unit, nx, ny)
    }

    pub fn cell_area(&self) -> f64 {
        (self.cells_per_unit * self.cells_per_unit).recip()
    }

    pub fn center(&self, ix: usize, iy: usize) -> (f64, f64) {
        let h = 1.0 / self.cells_per_unit;
        (self.x0 + (ix as f64 + 0.5) * h, self.y0 + (iy as f64 + 0.5) * h)
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.cells[iy * self.nx + ix]
    }

    pub fn set(&mut self, ix: usize, iy: usize, v: f64) {
        self.cells[iy * self.nx + ix] = v;
    }

    pub fn mass(&self) -> f64 {
        self.cells.iter().sum::<f64>() * self.cell_area()
    }

    pub fn max(&self) -> f64 {
        self.cells.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        (self.cells.iter().map(|v| v.abs().powf(p)).sum::<f64>() * self.cell_area()).powf(1.0 / p)
    }

    /// Portable float map: grayscale, little-endian, rows bottom to top.
    pub fn write_pfm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "Pf\n{} {}\n-1.0\n", self.nx, self.ny)?;
        for v in &self.cells {
            out.write_all(&(*v as f32).to_le_bytes())?;
        }
        out.flush()
    }

    pub fn save_pfm(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_pfm(std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }

    pub fn read_pfm(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Format(format!("pfm: {m}"));
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header is not text"))?.to_owned());
        }
        pos += 1;
        if fields[0] != "Pf" {
            return Err(bad("not a grayscale float map"));
        }
        let nx: usize = fields[1].parse().map_err(|_| bad("width"))?;
        let ny: usize = fields[2].parse().map_err(|_| bad("height"))?;
        let scale: f64 = fields[3].parse().map_err(|_| bad("scale"))?;
        if scale >= 0.0 {
            return Err(bad("big-endian maps are not supported"));
        }
        let data = &bytes[pos.min(bytes.len())..];
        if data.len() != nx * ny * 4 {
            return Err(bad("pixel data length"));
        }
        let cells = data.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64).collect();
        Ok(Self { x0: 0.0, y0: 0.0, cells_per_unit: 1.0, nx, ny, cells })
    }
}
