use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One line of the bound-tracking report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub op: String,
    pub s: u32,
    pub params: serde_json::Value,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
}

impl BoundRecord {
    pub fn new(op: impl Into<String>, s: u32, params: serde_json::Value, lhs: f64, rhs: f64) -> Self {
        Self { op: op.into(), s, params, lhs, rhs, ratio: (rhs > 0.0).then(|| lhs / rhs) }
    }
}

/// Writes one JSON object per line.
pub fn write_bound_records(records: &[BoundRecord], out: &mut impl Write) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut *out, r).map_err(|e| Error::Format(e.to_string()))?;
        out.write_all(b"\n").map_err(|e| Error::Format(e.to_string()))?;
    }
    Ok(())
}
