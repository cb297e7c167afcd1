use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::families::Family;

/// Experiment parameters; a flat TOML file, every key optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub s_min: u32,
    pub s_max: u32,
    pub q: Vec<f64>,
    pub delta: f64,
    /// Defaults to 3δ.
    pub lambda: Option<f64>,
    pub eta: f64,
    /// Cap rectangle constant C.
    pub cap_constant: f64,
    /// Mollifier constant c of the thickened pushforward.
    pub mollifier_constant: f64,
    pub k_inside: usize,
    pub k_outside: usize,
    pub seed: u64,
    pub families: Vec<Family>,
    /// Level of the test functions; by default the level s of each run.
    pub family_level: Option<u32>,
    /// Frequency grid spacing of the extension sweep; by default 1 up to
    /// s = 5 and 2^{2s-11} beyond.
    pub xi_step: Option<f64>,
    /// Raster cells per 2^{-2s} in the decoupling audit.
    pub cells_per_scale: f64,
    /// Random frequencies per family in the Step-3 audit.
    pub frequency_samples: usize,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: "default".into(),
            s_min: 2,
            s_max: 4,
            q: vec![6.0],
            delta: 0.1,
            lambda: None,
            eta: 1.0 / 64.0,
            cap_constant: 4.0,
            mollifier_constant: 1.0,
            k_inside: 8,
            k_outside: 8,
            seed: 0,
            families: vec![Family::RandomHaar, Family::RademacherBlocks, Family::KnappLike],
            family_level: None,
            xi_step: None,
            cells_per_scale: 2.0,
            frequency_samples: 100,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Exponent regime: the estimate is claimed only for q > 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    InTheorem,
    EndpointDiagnostic,
}

impl Regime {
    pub fn of(q: f64) -> Self {
        if q > 4.0 {
            Regime::InTheorem
        } else {
            Regime::EndpointDiagnostic
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::InTheorem => "in-theorem",
            Regime::EndpointDiagnostic => "endpoint/diagnostic",
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            LabError::Config(msg) => LabError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(3.0 * self.delta)
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<u32> {
        self.s_min..=self.s_max
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return bad(format!("δ = {} outside (0, 1/2]", self.delta));
        }
        let lambda = self.lambda();
        if !(lambda > 0.0 && lambda <= 0.5) {
            return bad(format!("λ = {lambda} outside (0, 1/2]"));
        }
        if self.s_min > self.s_max {
            return bad(format!("empty level range {}..={}", self.s_min, self.s_max));
        }
        if self.s_max > 12 {
            return bad(format!("level {} above 12", self.s_max));
        }
        if let Some(q) = self.q.iter().find(|&&q| !(q > 2.0 && q.is_finite())) {
            return bad(format!("exponent q = {q} must exceed 2"));
        }
        if !(0.0..=0.125).contains(&self.eta) {
            return bad(format!("η = {} outside [0, 1/8]", self.eta));
        }
        if !(self.cap_constant > 0.0 && self.mollifier_constant > 0.0) {
            return bad("rectangle and mollifier constants must be positive".into());
        }
        if self.k_inside == 0 || self.k_outside == 0 {
            return bad("translate counts must be positive".into());
        }
        if self.families.is_empty() {
            return bad("no test-function families".into());
        }
        if self.xi_step.is_some_and(|h| !(h > 0.0)) {
            return bad("frequency step must be positive".into());
        }
        Ok(())
    }

    pub fn regimes(&self) -> Vec<(f64, Regime)> {
        self.q.iter().map(|&q| (q, Regime::of(q))).collect()
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON encoding.
    /// Digest of every parameter except the output directory.
    pub fn hash(&self) -> String {
        let keyed = Self { output_dir: PathBuf::new(), ..self.clone() };
        let json = serde_json::to_string(&keyed).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert!((c.lambda() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn boundary_delta_is_rejected_through_lambda() {
        let err = ExperimentConfig::from_toml("delta = 0.5").unwrap_err();
        assert!(matches!(err, LabError::Config(ref m) if m.contains("λ")), "{err}");
        assert!(ExperimentConfig::from_toml("delta = 0.5\nlambda = 0.5").is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(ExperimentConfig::from_toml("sigma = 1"), Err(LabError::Config(_))));
    }

    #[test]
    fn regimes_flag_the_endpoint() {
        let c = ExperimentConfig::from_toml("q = [4.0, 4.5, 8.0]").unwrap();
        let r: Vec<_> = c.regimes().into_iter().map(|x| x.1).collect();
        assert_eq!(r, [Regime::EndpointDiagnostic, Regime::InTheorem, Regime::InTheorem]);
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { seed: 1, ..a.clone() };
        assert_eq!(a.hash(), a.clone().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
        let moved = ExperimentConfig { output_dir: "elsewhere".into(), ..a.clone() };
        assert_eq!(a.hash(), moved.hash());
    }
}
