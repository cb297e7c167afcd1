//! Dyadic intervals and uniformly sampled functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// [2^{-t}(n-1)+v, 2^{-t}n+v) with 1 ≤ n ≤ 2^t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub level: u32,
    pub index: u64,
    pub shift: f64,
}

impl DyadicInterval {
    pub fn new(level: u32, index: u64, shift: f64) -> Result<Self> {
        if level > 52 {
            return Err(Error::Parameter(format!("level {level} exceeds double precision")));
        }
        if index < 1 || index > 1u64 << level {
            return Err(Error::Parameter(format!("index {index} outside 1..=2^{level}")));
        }
        Ok(Self { level, index, shift })
    }

    pub fn length(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn left(&self) -> f64 {
        self.length() * (self.index - 1) as f64 + self.shift
    }

    pub fn right(&self) -> f64 {
        self.length() * self.index as f64 + self.shift
    }

    pub fn center(&self) -> f64 {
        self.length() * (self.index as f64 - 0.5) + self.shift
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.left() && x < self.right()
    }

    /// The two halves, left first.
    pub fn children(&self) -> [DyadicInterval; 2] {
        let l = DyadicInterval { level: self.level + 1, index: 2 * self.index - 1, shift: self.shift };
        [l, DyadicInterval { index: 2 * self.index, ..l }]
    }

    /// All 2^t intervals at one level and shift, left to right.
    pub fn level_tiling(level: u32, shift: f64) -> impl Iterator<Item = DyadicInterval> {
        (1..=(1u64 << level)).map(move |index| DyadicInterval { level, index, shift })
    }
}

/// Uniform midpoint samples of a function on [left, right).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction<T = f64> {
    pub values: Vec<T>,
    pub left: f64,
    pub right: f64,
    pub samples_per_unit: u64,
}

impl<T: Copy + Default> SampledFunction<T> {
    pub fn new(values: Vec<T>, left: f64, right: f64, samples_per_unit: u64) -> Result<Self> {
        if !samples_per_unit.is_power_of_two() {
            return Err(Error::Parameter(format!("samples per unit {samples_per_unit} is not a power of two")));
        }
        if !(right > left) {
            return Err(Error::Parameter(format!("empty domain [{left}, {right})")));
        }
        let count = (right - left) * samples_per_unit as f64;
        if (count - count.round()).abs() > 1e-9 || count.round() as usize != values.len() {
            return Err(Error::Parameter(format!(
                "{} samples do not cover [{left}, {right}) at {samples_per_unit} per unit",
                values.len()
            )));
        }
        Ok(Self { values, left, right, samples_per_unit })
    }

    pub fn from_fn(left: f64, right: f64, samples_per_unit: u64, f: impl Fn(f64) -> T) -> Result<Self> {
        let count = ((right - left) * samples_per_unit as f64).round() as usize;
        let h = 1.0 / samples_per_unit as f64;
        let values = (0..count).map(|j| f(left + (j as f64 + 0.5) * h)).collect();
        Self::new(values, left, right, samples_per_unit)
    }

    pub fn zeros(left: f64, right: f64, samples_per_unit: u64) -> Result<Self> {
        Self::from_fn(left, right, samples_per_unit, |_| T::default())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Quadrature weight of each sample.
    pub fn spacing(&self) -> f64 {
        1.0 / self.samples_per_unit as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.left + (j as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|j| self.node(j))
    }

    /// Index range of samples whose nodes lie in [a, b).
    pub fn index_range(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let spu = self.samples_per_unit as f64;
        let lo = ((a - self.left) * spu - 0.5).ceil().max(0.0) as usize;
        let hi = ((b - self.left) * spu - 0.5).ceil().max(0.0) as usize;
        lo.min(self.len())..hi.min(self.len())
    }

    pub fn map<U: Copy + Default>(&self, f: impl Fn(T) -> U) -> SampledFunction<U> {
        SampledFunction {
            values: self.values.iter().map(|&v| f(v)).collect(),
            left: self.left,
            right: self.right,
            samples_per_unit: self.samples_per_unit,
        }
    }

    pub fn same_grid<U>(&self, other: &SampledFunction<U>) -> bool {
        self.left == other.left
            && self.right == other.right
            && self.samples_per_unit == other.samples_per_unit
    }
}

impl SampledFunction<f64> {
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert!(self.same_grid(other));
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.spacing()
    }

    /// Midpoint-rule L^p norm; p ≥ 1e6 means the sup norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p >= 1e6 {
            return self.sup_norm();
        }
        (self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * self.spacing()).powf(1.0 / p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Fails unless every sample with node outside [a, b] vanishes.
    pub fn check_support(&self, a: f64, b: f64) -> Result<()> {
        for (j, &v) in self.values.iter().enumerate() {
            let x = self.node(j);
            if (x < a || x > b) && v != 0.0 {
                return Err(Error::Precondition(format!(
                    "function is nonzero at x = {x}, outside the required support [{a}, {b}]"
                )));
            }
        }
        Ok(())
    }

    /// Samples on a different window at the same resolution; samples outside
    /// the current window are zero.
    pub fn rewindow(&self, left: f64, right: f64) -> Result<Self> {
        let spu = self.samples_per_unit as f64;
        let offset = (left - self.left) * spu;
        if (offset - offset.round()).abs() > 1e-9 {
            return Err(Error::Parameter("window is not aligned with the sample grid".into()));
        }
        let offset = offset.round() as i64;
        let count = ((right - left) * spu).round() as usize;
        let values = (0..count)
            .map(|j| {
                let k = j as i64 + offset;
                if k >= 0 && (k as usize) < self.values.len() {
                    self.values[k as usize]
                } else {
                    0.0
                }
            })
            .collect();
        Self::new(values, left, right, self.samples_per_unit)
    }

    pub fn to_complex(&self) -> SampledFunction<Complex64> {
        self.map(Complex64::from)
    }
}

impl SampledFunction<Complex64> {
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.spacing()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p >= 1e6 {
            return self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        }
        (self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * self.spacing()).powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn interval_endpoints() {
        let i = DyadicInterval::new(3, 2, 0.01).unwrap();
        assert_eq!(i.length(), 0.125);
        assert!((i.left() - 0.135).abs() < 1e-15);
        assert!((i.right() - 0.26).abs() < 1e-15);
        assert!(DyadicInterval::new(2, 5, 0.0).is_err());
        assert!(DyadicInterval::new(2, 0, 0.0).is_err());
    }

    #[test]
    fn sample_count_is_validated() {
        assert!(SampledFunction::new(vec![0.0; 8], 0.0, 1.0, 8).is_ok());
        assert!(SampledFunction::new(vec![0.0; 7], 0.0, 1.0, 8).is_err());
        assert!(SampledFunction::new(vec![0.0; 6], 0.0, 1.0, 6).is_err());
    }

    #[test]
    fn index_range_selects_nodes() {
        let f = SampledFunction::<f64>::zeros(0.0, 1.0, 16).unwrap();
        let r = f.index_range(0.25, 0.5);
        assert_eq!(r, 4..8);
        assert!(r.clone().all(|j| (0.25..0.5).contains(&f.node(j))));
    }

    #[test]
    fn rewindow_pads_with_zeros() {
        let f = SampledFunction::from_fn(0.0, 1.0, 4, |x| x).unwrap();
        let g = f.rewindow(-0.5, 1.5).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.values[0], 0.0);
        assert_eq!(g.values[2], f.values[0]);
        assert_eq!(g.integral(), f.integral());
    }

    proptest! {
        #[test]
        fn level_tiling_is_disjoint_cover(level in 0u32..8, shift in 0.0f64..0.01) {
            let ivs: Vec<_> = DyadicInterval::level_tiling(level, shift).collect();
            prop_assert_eq!(ivs.len(), 1usize << level);
            for w in ivs.windows(2) {
                prop_assert_eq!(w[0].right(), w[1].left());
            }
            prop_assert!((ivs[0].left() - shift).abs() < 1e-15);
            prop_assert!((ivs.last().unwrap().right() - 1.0 - shift).abs() < 1e-12);
        }

        #[test]
        fn children_split_parent(level in 0u32..10, frac in 0.0f64..1.0) {
            let n = 1 + ((frac * (1u64 << level) as f64) as u64).min((1u64 << level) - 1);
            let p = DyadicInterval::new(level, n, 0.0).unwrap();
            let [a, b] = p.children();
            prop_assert_eq!(a.left(), p.left());
            prop_assert_eq!(a.right(), b.left());
            prop_assert_eq!(b.right(), p.right());
        }
    }
}
