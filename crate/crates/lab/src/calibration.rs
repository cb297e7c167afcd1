use serde::{Deserialize, Serialize};

use extlab_core::feffgeom::first_decoupling;
use extlab_core::phase::{avg_trans_bound, calibrate, periodic_amplitudes, AvgTransSetup, FrequencyModulus, FrequencyRegion};
use extlab_core::spectral::{seq_inequality, seq_linf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::families::{Family, Placement, TestFunctionSpec};

const FROZEN: &str = include_str!("../calibration.toml");

/// Constants fitted once at the smallest level and frozen; larger levels are
/// validated against them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub level: u32,
    pub seed: u64,
    pub delta: f64,
    pub lambda: f64,
    pub eta: f64,
    pub translates: usize,
    pub frequency_samples: usize,
    pub decoupling: DecouplingConstants,
    /// Smallest C with |Main(0)| ≤ C·majorant over the calibration sample.
    pub avg_trans: f64,
    /// max over families of Σ_m (Avg|Ã_m|)^4 / ‖f‖_4^4.
    pub seq_inequality: f64,
    /// max over families of max_m |⟨f̄_s, φ^m⟩| / ‖f‖_∞.
    pub seq_linf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecouplingConstants {
    pub q: Vec<f64>,
    pub ratio: Vec<f64>,
    pub cap_constant: f64,
    pub cells_per_scale: f64,
}

impl DecouplingConstants {
    pub fn for_q(&self, q: f64) -> Option<f64> {
        self.q.iter().position(|&x| x == q).map(|i| self.ratio[i])
    }
}

/// Families the calibration runs over.
pub const CALIBRATION_FAMILIES: [Family; 5] = Family::ALL;

/// Samples per unit of the functions fed to the sequence operations at level s.
pub fn sequence_resolution(s: u32) -> u64 {
    1u64 << (s + 8).max(12)
}

/// (m, ξ) queries drawn uniformly from {1..2^s} × Ω_{s,δ}, keyed by
/// (seed, family, s).
pub fn frequency_queries(seed: u64, family: Family, s: u32, delta: f64, count: usize) -> Result<Vec<(u64, (f64, f64))>> {
    let region = FrequencyRegion::new(s, delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0xa7_0000 + ((family as u64) << 8) + s as u64);
    Ok((0..count).map(|_| (rng.gen_range(1..=(1u64 << s)), region.point(rng.gen(), rng.gen()))).collect())
}

impl Calibration {
    pub fn frozen() -> Self {
        toml::from_str(FROZEN).expect("committed calibration parses")
    }

    pub fn setup(&self, s: u32) -> AvgTransSetup {
        AvgTransSetup {
            s,
            delta: self.delta,
            lambda: self.lambda,
            eta: self.eta,
            translates: self.translates,
            modulus: FrequencyModulus::Odd,
        }
    }

    /// Refits every constant with the settings of `self`.
    pub fn refit(&self) -> Result<Self> {
        let s = self.level;
        let mut decoupling = self.decoupling.clone();
        decoupling.ratio = self
            .decoupling
            .q
            .iter()
            .map(|&q| {
                let caps: Vec<(u64, f64)> = (1..=(1u64 << s)).map(|m| (m, 1.0)).collect();
                let d = first_decoupling(&caps, s, decoupling.cap_constant, q / (q - 2.0), decoupling.cells_per_scale)?;
                d.ratio.ok_or_else(|| LabError::Config("empty decoupling calibration".into()))
            })
            .collect::<Result<_>>()?;
        let setup = self.setup(s);
        let (mut avg, mut seq, mut linf) = (Vec::new(), 0.0f64, 0.0f64);
        for family in CALIBRATION_FAMILIES {
            let f = TestFunctionSpec { family, level: s + 2, seed: self.seed, index: 0 }
                .generate(sequence_resolution(s), Placement::MiddleThird)?;
            let amps = periodic_amplitudes(&f, &setup)?;
            let queries = frequency_queries(self.seed, family, s, self.delta, self.frequency_samples)?;
            avg.extend(avg_trans_bound(&amps, &queries, &setup)?);
            if let Some(r) = seq_inequality(&f, s, self.eta, self.translates)?.ratio {
                seq = seq.max(r);
            }
            if let Some(r) = seq_linf(&f, s, self.eta, 0.0)?.ratio {
                linf = linf.max(r);
            }
        }
        Ok(Self { decoupling, avg_trans: calibrate(&avg), seq_inequality: seq, seq_linf: linf, ..self.clone() })
    }

    pub fn to_toml(&self) -> String {
        let body = toml::to_string(self).expect("calibration serializes");
        format!("# Frozen constants, fitted once at `level` and only read afterwards.\n{body}")
    }
}
