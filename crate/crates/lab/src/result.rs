use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub const SCHEMA: &str = "extlab.sweep/1";

/// One measured statistic. `value` is None when the statistic is undefined
/// (for instance a ratio with zero denominator).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    /// Sub-case key: family, spacing, pair, ...
    pub cell: String,
    pub s: Option<u32>,
    pub q: Option<f64>,
    pub statistic: String,
    pub value: Option<f64>,
    /// The inequality the row measures.
    pub anchor: String,
}

/// Rows of one experiment run; deterministic given (config, seed). Wall-clock
/// timings are kept out of the serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema: String,
    pub experiment: String,
    pub config_hash: String,
    pub provenance: String,
    pub rows: Vec<Row>,
    pub violations: Vec<String>,
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl SweepResult {
    pub fn new(experiment: &str, config_hash: &str) -> Self {
        Self {
            schema: SCHEMA.into(),
            experiment: experiment.into(),
            config_hash: config_hash.into(),
            provenance: format!("extlab {} cfg:{config_hash}", env!("CARGO_PKG_VERSION")),
            rows: Vec::new(),
            violations: Vec::new(),
            timings: Vec::new(),
        }
    }

    pub fn push(&mut self, cell: impl Into<String>, s: Option<u32>, q: Option<f64>, statistic: &str, value: Option<f64>, anchor: &str) {
        self.rows.push(Row {
            experiment: self.experiment.clone(),
            cell: cell.into(),
            s,
            q,
            statistic: statistic.into(),
            value,
            anchor: anchor.into(),
        });
    }

    pub fn find(&self, cell: &str, s: Option<u32>, statistic: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.cell == cell && r.s == s && r.statistic == statistic)
    }

    /// Sorts rows by (cell, s, q, statistic) so output does not depend on the
    /// order cells finished in.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            (a.cell.as_str(), a.s, a.statistic.as_str())
                .cmp(&(b.cell.as_str(), b.s, b.statistic.as_str()))
                .then(a.q.unwrap_or(f64::NEG_INFINITY).total_cmp(&b.q.unwrap_or(f64::NEG_INFINITY)))
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

const COLUMNS: [&str; 7] = ["experiment", "cell", "s", "q", "statistic", "value", "anchor"];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with `#` header lines carrying the metadata and violations, then a
/// column header and one line per row. Empty fields are nulls.
pub fn write_csv(result: &SweepResult, out: impl Write) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    let io = |e: std::io::Error| LabError::io("<csv>", e);
    writeln!(out, "# schema: {}", result.schema).map_err(io)?;
    writeln!(out, "# experiment: {}", result.experiment).map_err(io)?;
    writeln!(out, "# config_hash: {}", result.config_hash).map_err(io)?;
    writeln!(out, "# provenance: {}", result.provenance).map_err(io)?;
    writeln!(
        out,
        "# columns: experiment name; cell (sub-case key); level s; exponent q; statistic; value (empty = undefined); anchor (inequality measured)"
    )
    .map_err(io)?;
    for v in &result.violations {
        writeln!(out, "# violation: {}", v.replace('\n', " ")).map_err(io)?;
    }
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| LabError::Parse(e.to_string());
    w.write_record(COLUMNS).map_err(err)?;
    for r in &result.rows {
        w.write_record([
            r.experiment.clone(),
            r.cell.clone(),
            opt(r.s),
            opt(r.q),
            r.statistic.clone(),
            opt(r.value),
            r.anchor.clone(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(io)
}

pub fn read_csv(input: impl BufRead) -> Result<SweepResult> {
    let mut meta = SweepResult::new("", "");
    meta.provenance.clear();
    let mut body = String::new();
    for line in input.lines() {
        let line = line.map_err(|e| LabError::io("<csv>", e))?;
        if let Some(rest) = line.strip_prefix("# ") {
            let (key, value) = rest.split_once(": ").ok_or_else(|| LabError::Parse(format!("bad header line {line:?}")))?;
            match key {
                "schema" => meta.schema = value.into(),
                "experiment" => meta.experiment = value.into(),
                "config_hash" => meta.config_hash = value.into(),
                "provenance" => meta.provenance = value.into(),
                "violation" => meta.violations.push(value.into()),
                _ => {}
            }
        } else {
            body.push_str(&line);
            body.push('\n');
        }
    }
    if meta.schema != SCHEMA {
        return Err(LabError::Parse(format!("unsupported schema {:?}", meta.schema)));
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let parse = |field: &str, what: &str| -> Result<Option<f64>> {
        if field.is_empty() {
            Ok(None)
        } else {
            field.parse().map(Some).map_err(|_| LabError::Parse(format!("{what} {field:?}")))
        }
    };
    for rec in r.records() {
        let rec = rec.map_err(|e| LabError::Parse(e.to_string()))?;
        if rec.len() != COLUMNS.len() {
            return Err(LabError::Parse(format!("{} fields in a row", rec.len())));
        }
        let s = if rec[2].is_empty() {
            None
        } else {
            Some(rec[2].parse().map_err(|_| LabError::Parse(format!("level {:?}", &rec[2])))?)
        };
        meta.rows.push(Row {
            experiment: rec[0].into(),
            cell: rec[1].into(),
            s,
            q: parse(&rec[3], "exponent")?,
            statistic: rec[4].into(),
            value: parse(&rec[5], "value")?,
            anchor: rec[6].into(),
        });
    }
    Ok(meta)
}

pub fn write_json(result: &SweepResult, out: impl Write) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    serde_json::to_writer_pretty(&mut out, result).map_err(|e| LabError::Parse(e.to_string()))?;
    out.write_all(b"\n").map_err(|e| LabError::io("<json>", e))?;
    out.flush().map_err(|e| LabError::io("<json>", e))
}

pub fn read_json(input: impl std::io::Read) -> Result<SweepResult> {
    serde_json::from_reader(input).map_err(|e| LabError::Parse(e.to_string()))
}

/// Writes `<dir>/<experiment>.<ext>` and returns the path.
pub fn emit(result: &SweepResult, dir: &Path, format: Format) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let path = dir.join(format!("{}.{}", result.experiment, format.extension()));
    let file = std::fs::File::create(&path).map_err(|e| LabError::io(&path, e))?;
    match format {
        Format::Csv => write_csv(result, file),
        Format::Json => write_json(result, file),
    }
    .map_err(|e| match e {
        LabError::Io { source, .. } => LabError::io(&path, source),
        other => other,
    })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepResult {
        let mut r = SweepResult::new("demo", "0123456789abcdef");
        r.push("smooth_bump", Some(3), Some(6.0), "ratio", Some(0.1 + 0.2), "‖Ef‖ ≲ ‖f‖, a \"quoted\" anchor");
        r.push("zero", Some(3), None, "ratio", None, "x");
        r.push("fit", None, Some(4.5), "slope", Some(-1e-300), "y");
        r.violations.push("ratio 3 above 2".into());
        r
    }

    #[test]
    fn empty_result_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&SweepResult::new("empty", "00"), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1);
        assert!(text.lines().last().unwrap().starts_with("experiment,cell"));
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let mut buf = Vec::new();
        write_csv(&r, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), r);
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let mut buf = Vec::new();
        write_json(&r, &mut buf).unwrap();
        assert_eq!(read_json(buf.as_slice()).unwrap(), r);
    }

    #[test]
    fn timings_are_not_serialized() {
        let mut r = sample();
        let mut a = Vec::new();
        write_json(&r, &mut a).unwrap();
        r.timings.push(("total".into(), 1.5));
        let mut b = Vec::new();
        write_json(&r, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn emit_reports_the_path_on_failure() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, b"").unwrap();
        let err = emit(&sample(), &blocker.join("sub"), Format::Csv).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
