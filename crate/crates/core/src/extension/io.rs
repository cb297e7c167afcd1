use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::field::{ExtensionField, XiGrid};

const MAGIC: &[u8; 8] = b"EXTFLD01";

/// Binary layout: magic, then ξ₁ lo/hi, n1, ξ₂ lo/hi, n2 (f64 and u64,
/// little-endian), then row-major (re, im) pairs.
pub fn write_binary<W: Write>(field: &ExtensionField, mut out: W) -> std::io::Result<()> {
    let g = &field.grid;
    out.write_all(MAGIC)?;
    out.write_all(&g.xi1.0.to_le_bytes())?;
    out.write_all(&g.xi1.1.to_le_bytes())?;
    out.write_all(&(g.n1 as u64).to_le_bytes())?;
    out.write_all(&g.xi2.0.to_le_bytes())?;
    out.write_all(&g.xi2.1.to_le_bytes())?;
    out.write_all(&(g.n2 as u64).to_le_bytes())?;
    for v in &field.values {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    out.flush()
}

pub fn read_binary<R: Read>(mut input: R) -> Result<ExtensionField> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(|e| Error::Format(e.to_string()))?;
    if bytes.len() < 56 || &bytes[..8] != MAGIC {
        return Err(Error::Format("not an extension field file".into()));
    }
    let word = |k: usize| -> [u8; 8] { bytes[8 + 8 * k..16 + 8 * k].try_into().expect("8 bytes") };
    let f = |k| f64::from_le_bytes(word(k));
    let u = |k| u64::from_le_bytes(word(k)) as usize;
    let grid = XiGrid::new((f(0), f(1)), (f(3), f(4)), u(2), u(5))?;
    let body = &bytes[56..];
    if body.len() != grid.cells() * 16 {
        return Err(Error::Format(format!("expected {} values, found {} bytes", grid.cells(), body.len())));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    Ok(ExtensionField { grid, values })
}

/// CSV with columns xi1, xi2, re, im in storage order.
pub fn write_csv<W: Write>(field: &ExtensionField, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["xi1", "xi2", "re", "im"]).map_err(err)?;
    for i2 in 0..field.grid.n2 {
        for i1 in 0..field.grid.n1 {
            let v = field.get(i1, i2);
            w.write_record([
                field.grid.node1(i1).to_string(),
                field.grid.node2(i2).to_string(),
                v.re.to_string(),
                v.im.to_string(),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

pub fn save(field: &ExtensionField, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let out = std::io::BufWriter::new(file);
    if path.extension().is_some_and(|e| e == "csv") {
        write_csv(field, out)
    } else {
        write_binary(field, out).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExtensionField {
        let grid = XiGrid::new((-1.0, 1.0), (0.0, 3.0), 3, 2).unwrap();
        let values = (0..6).map(|k| Complex64::new(k as f64 * 0.1, -(k as f64))).collect();
        ExtensionField { grid, values }
    }

    #[test]
    fn binary_round_trip() {
        let f = sample();
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 56 + 6 * 16);
        assert_eq!(read_binary(&buf[..]).unwrap(), f);
        assert!(read_binary(&buf[..40]).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "xi1,xi2,re,im");
        assert_eq!(lines[1], "-1,0,0,-0");
        assert_eq!(lines[4], "-1,3,0.30000000000000004,-3");
        assert_eq!(lines.len(), 7);
    }
}
