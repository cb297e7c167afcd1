use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use extlab_core::cutoff::SmoothWindow;
use extlab_core::sampled::{DyadicInterval, SampledFunction};
use extlab_core::wavelets::{alpert_wavelet, Species};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    RandomHaar,
    RandomAlpert,
    KnappLike,
    SmoothBump,
    RademacherBlocks,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::RandomHaar, Family::RandomAlpert, Family::KnappLike, Family::SmoothBump, Family::RademacherBlocks];

    pub fn name(self) -> &'static str {
        match self {
            Family::RandomHaar => "random_haar",
            Family::RandomAlpert => "random_alpert",
            Family::KnappLike => "knapp_like",
            Family::SmoothBump => "smooth_bump",
            Family::RademacherBlocks => "rademacher_blocks",
        }
    }

    fn id(self) -> u64 {
        self as u64 + 1
    }
}

/// Where the generated function lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Placement {
    /// On [0, 1] with the mean subtracted.
    UnitMeanZero,
    /// The profile compressed into [3/8, 5/8] ⊂ [1/3, 2/3].
    MiddleThird,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    pub family: Family,
    pub level: u32,
    pub seed: u64,
    pub index: u64,
}

impl TestFunctionSpec {
    /// Generator keyed by (seed, family, index) alone, so draws do not depend
    /// on the order in which functions are requested.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((self.family.id() << 48) ^ self.index);
        rng
    }

    /// The profile g on [0, 1).
    pub fn profile(&self) -> Profile {
        let mut rng = self.rng();
        let cells = 1usize << self.level;
        match self.family {
            Family::RandomHaar => {
                let mut avg = vec![0.0];
                for t in 0..self.level {
                    avg = avg
                        .iter()
                        .flat_map(|&a| {
                            let c: f64 = rng.gen_range(-1.0..1.0) * (-(t as f64) / 2.0).exp2();
                            let h = c * (t as f64 / 2.0).exp2();
                            [a + h, a - h]
                        })
                        .collect();
                }
                Profile::Cells(avg)
            }
            Family::RademacherBlocks => {
                Profile::Cells((0..cells).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect())
            }
            Family::KnappLike => {
                let n = if cells >= 4 { rng.gen_range(cells / 4..3 * cells / 4) } else { 0 };
                Profile::Cells((0..cells).map(|j| if j == n { 1.0 } else { 0.0 }).collect())
            }
            Family::RandomAlpert => {
                let amp = (-(self.level as f64) / 2.0).exp2();
                let coeffs = (0..cells).map(|_| [rng.gen_range(-1.0..1.0) * amp, rng.gen_range(-1.0..1.0) * amp]).collect();
                Profile::Alpert { level: self.level, coeffs }
            }
            Family::SmoothBump => Profile::Bump {
                amplitude: rng.gen_range(0.0..0.5),
                frequency: rng.gen_range(1..=4) as f64,
                phase: rng.gen_range(0.0..2.0 * PI),
            },
        }
    }

    pub fn generate(&self, samples_per_unit: u64, placement: Placement) -> Result<SampledFunction> {
        let g = self.profile();
        let f = match placement {
            Placement::UnitMeanZero => {
                let mut f = SampledFunction::from_fn(0.0, 1.0, samples_per_unit, |x| g.eval(x))?;
                let mean = f.values.iter().sum::<f64>() / f.len() as f64;
                f.values.iter_mut().for_each(|v| *v -= mean);
                f
            }
            Placement::MiddleThird => SampledFunction::from_fn(0.0, 1.0, samples_per_unit, |x| {
                if (0.375..0.625).contains(&x) {
                    g.eval(4.0 * (x - 0.375))
                } else {
                    0.0
                }
            })?,
        };
        Ok(f)
    }
}

/// Pointwise description of a family member on [0, 1).
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// Piecewise constant on 2^L equal cells.
    Cells(Vec<f64>),
    /// Σ_n a_n h_{L,n} + b_n k_{L,n} with pure Alpert wavelets.
    Alpert { level: u32, coeffs: Vec<[f64; 2]> },
    /// ψ(x)(1 + a cos(2πkx + φ)) with a fixed smooth window ψ.
    Bump { amplitude: f64, frequency: f64, phase: f64 },
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        if !(0.0..1.0).contains(&x) {
            return 0.0;
        }
        match self {
            Profile::Cells(v) => v[((x * v.len() as f64) as usize).min(v.len() - 1)],
            Profile::Alpert { level, coeffs } => {
                let n = ((x * coeffs.len() as f64) as usize).min(coeffs.len() - 1);
                let iv = DyadicInterval { level: *level, index: n as u64 + 1, shift: 0.0 };
                coeffs[n][0] * alpert_wavelet(&iv, Species::H, x) + coeffs[n][1] * alpert_wavelet(&iv, Species::K, x)
            }
            Profile::Bump { amplitude, frequency, phase } => {
                let w = SmoothWindow::new(0.05, 0.25, 0.75, 0.95).expect("ordered window");
                w.value(x) * (1.0 + amplitude * (2.0 * PI * frequency * x + phase).cos())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, index: u64) -> TestFunctionSpec {
        TestFunctionSpec { family, level: 5, seed: 7, index }
    }

    #[test]
    fn draws_are_keyed_not_ordered() {
        let a = spec(Family::RandomHaar, 3).generate(1 << 8, Placement::UnitMeanZero).unwrap();
        let _ = spec(Family::RandomHaar, 2).generate(1 << 8, Placement::UnitMeanZero).unwrap();
        let b = spec(Family::RandomHaar, 3).generate(1 << 8, Placement::UnitMeanZero).unwrap();
        assert_eq!(a, b);
        let c = spec(Family::RademacherBlocks, 3).generate(1 << 8, Placement::UnitMeanZero).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn placements_meet_support_preconditions() {
        for family in Family::ALL {
            for index in 0..3 {
                let f = spec(family, index).generate(1 << 10, Placement::MiddleThird).unwrap();
                f.check_support(1.0 / 3.0, 2.0 / 3.0).unwrap();
                assert!(f.sup_norm() > 0.0, "{family:?}");
                let g = spec(family, index).generate(1 << 10, Placement::UnitMeanZero).unwrap();
                assert!(g.integral().abs() < 1e-12, "{family:?}");
            }
        }
    }

    #[test]
    fn knapp_is_one_cell() {
        let f = spec(Family::KnappLike, 0).generate(1 << 10, Placement::MiddleThird).unwrap();
        let mass = f.integral();
        assert!((mass - 0.25 / 32.0).abs() < 1e-12, "{mass}");
    }
}
