use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampled::DyadicInterval;

/// Mother wavelet species; Haar uses `H` only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Species {
    H,
    K,
}

impl Species {
    pub const BOTH: [Species; 2] = [Species::H, Species::K];
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Species::H => "h",
            Species::K => "k",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum System {
    Haar,
    Alpert,
    SmoothAlpert { eta: f64 },
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            System::Haar => f.write_str("haar"),
            System::Alpert => f.write_str("alpert"),
            System::SmoothAlpert { eta } => write!(f, "smooth_alpert({eta})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CoeffKey {
    pub level: u32,
    pub index: u64,
    pub species: Species,
}

/// Wavelet coefficients on one translated grid, ordered by (level, index, species).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletCoeffs {
    pub system: System,
    pub shift: f64,
    /// Resolution of the sample grid the coefficients were computed on.
    pub samples_per_unit: u64,
    pub entries: BTreeMap<CoeffKey, f64>,
}

impl WaveletCoeffs {
    pub fn new(system: System, shift: f64, samples_per_unit: u64) -> Self {
        Self { system, shift, samples_per_unit, entries: BTreeMap::new() }
    }

    pub fn get(&self, level: u32, index: u64, species: Species) -> Option<f64> {
        self.entries.get(&CoeffKey { level, index, species }).copied()
    }

    pub fn insert(&mut self, level: u32, index: u64, species: Species, value: f64) {
        self.entries.insert(CoeffKey { level, index, species }, value);
    }

    pub fn interval(&self, key: &CoeffKey) -> DyadicInterval {
        DyadicInterval { level: key.level, index: key.index, shift: self.shift }
    }

    /// Largest level present, if any.
    pub fn max_level(&self) -> Option<u32> {
        self.entries.keys().next_back().map(|k| k.level)
    }

    /// Coefficients of one level and species, in index order.
    pub fn level_values(&self, level: u32, species: Species) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|(k, _)| k.level == level && k.species == species)
            .map(|(_, &v)| v)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks the species and level-range invariants.
    pub fn validate(&self) -> Result<()> {
        if self.system == System::Haar && self.entries.keys().any(|k| k.species != Species::H) {
            return Err(Error::Validation("haar coefficients must use species h only".into()));
        }
        let mut levels: Vec<u32> = self.entries.keys().map(|k| k.level).collect();
        levels.dedup();
        if levels.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::Validation(format!("levels {levels:?} are not contiguous")));
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(["system", "level", "index", "shift", "species", "coefficient"])
            .map_err(csv_err)?;
        let system = self.system.to_string();
        for (k, v) in &self.entries {
            w.write_record([
                system.clone(),
                k.level.to_string(),
                k.index.to_string(),
                self.shift.to_string(),
                k.species.to_string(),
                v.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_follow_level_index_species_order() {
        let mut c = WaveletCoeffs::new(System::Alpert, 0.0, 64);
        c.insert(1, 2, Species::K, -0.5);
        c.insert(0, 1, Species::H, 1.0);
        c.insert(1, 2, Species::H, 0.25);
        c.insert(1, 1, Species::K, 2.0);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "system,level,index,shift,species,coefficient");
        assert_eq!(lines[1], "alpert,0,1,0,h,1");
        assert_eq!(lines[2], "alpert,1,1,0,k,2");
        assert_eq!(lines[3], "alpert,1,2,0,h,0.25");
        assert_eq!(lines[4], "alpert,1,2,0,k,-0.5");
    }

    #[test]
    fn validation_rejects_gaps_and_haar_k() {
        let mut c = WaveletCoeffs::new(System::Haar, 0.0, 64);
        c.insert(0, 1, Species::H, 1.0);
        c.insert(2, 1, Species::H, 1.0);
        assert!(c.validate().is_err());
        let mut c = WaveletCoeffs::new(System::Haar, 0.0, 64);
        c.insert(0, 1, Species::K, 1.0);
        assert!(c.validate().is_err());
    }
}
