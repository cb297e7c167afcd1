use std::sync::OnceLock;

use crate::cutoff::bump_mass_1d;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::sampled::{DyadicInterval, SampledFunction};

use super::coeffs::Species;

const SQRT_3_2: f64 = 1.224_744_871_391_589;

/// Mother wavelets on [-1, 1]: h even, k odd, k(0) = 0, zero outside [-1, 1].
pub fn alpert_mother(species: Species, x: f64) -> f64 {
    let a = x.abs();
    if a > 1.0 {
        return 0.0;
    }
    match species {
        Species::H => SQRT_3_2 * (2.0 * a - 1.0),
        Species::K => {
            if x == 0.0 {
                0.0
            } else {
                x.signum() * std::f64::consts::FRAC_1_SQRT_2 * (3.0 * a - 2.0)
            }
        }
    }
}

/// ∫_{-1}^{1} x^j w(x) dx for j = 0..=max_order, integrating the polynomial
/// pieces on [-1,0] and [0,1] exactly.
pub fn moments(species: Species, max_order: u32) -> Vec<f64> {
    (0..=max_order)
        .map(|j| {
            let jf = j as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            match species {
                // right piece √(3/2)(2x-1), mirrored evenly
                Species::H => SQRT_3_2 * (1.0 + sign) * (2.0 / (jf + 2.0) - 1.0 / (jf + 1.0)),
                // right piece (3x-2)/√2, mirrored oddly
                Species::K => {
                    std::f64::consts::FRAC_1_SQRT_2 * (1.0 - sign) * (3.0 / (jf + 2.0) - 2.0 / (jf + 1.0))
                }
            }
        })
        .collect()
}

fn mother_arg(interval: &DyadicInterval, x: f64) -> f64 {
    2.0 * (x - interval.center()) / interval.length()
}

/// √(2/|I|) w(2(x - c_I)/|I|): the L²-normalized copy of the mother on I.
pub fn alpert_wavelet(interval: &DyadicInterval, species: Species, x: f64) -> f64 {
    if !interval.contains(x) {
        return 0.0;
    }
    (2.0 / interval.length()).sqrt() * alpert_mother(species, mother_arg(interval, x))
}

const TABLE_INTERVALS: usize = 1 << 14;

/// Cumulative integrals of the unit bump b on [-1,1]:
/// C0(u) = ∫_{-1}^u b, C1(u) = ∫_{-1}^u v b(v) dv, stored with derivatives
/// for cubic Hermite interpolation.
struct BumpTables {
    c0: Vec<f64>,
    c1: Vec<f64>,
    d0: Vec<f64>,
}

fn bump_tables() -> &'static BumpTables {
    static T: OnceLock<BumpTables> = OnceLock::new();
    T.get_or_init(|| {
        let z = bump_mass_1d();
        let b = |u: f64| {
            let r = 1.0 - u * u;
            if r <= 0.0 {
                0.0
            } else {
                (-1.0 / r).exp() / z
            }
        };
        let gl = GaussLegendre::new(8);
        let h = 2.0 / TABLE_INTERVALS as f64;
        let mut c0 = vec![0.0; TABLE_INTERVALS + 1];
        let mut c1 = vec![0.0; TABLE_INTERVALS + 1];
        let mut d0 = vec![0.0; TABLE_INTERVALS + 1];
        for i in 0..TABLE_INTERVALS {
            let a = -1.0 + h * i as f64;
            c0[i + 1] = c0[i] + gl.integrate(a, a + h, b);
            c1[i + 1] = c1[i] + gl.integrate(a, a + h, |u| u * b(u));
            d0[i] = b(a);
        }
        // exact end values: unit mass and zero first moment
        let drift = c0[TABLE_INTERVALS] - 1.0;
        let drift1 = c1[TABLE_INTERVALS];
        for i in 0..=TABLE_INTERVALS {
            let frac = i as f64 / TABLE_INTERVALS as f64;
            c0[i] -= drift * frac;
            c1[i] -= drift1 * frac;
        }
        BumpTables { c0, c1, d0 }
    })
}

impl BumpTables {
    fn eval(&self, u: f64) -> (f64, f64) {
        if u <= -1.0 {
            return (0.0, 0.0);
        }
        if u >= 1.0 {
            return (1.0, 0.0);
        }
        let h = 2.0 / TABLE_INTERVALS as f64;
        let pos = (u + 1.0) / h;
        let i = (pos.floor() as usize).min(TABLE_INTERVALS - 1);
        let t = pos - i as f64;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t),
            t * (1.0 - t) * (1.0 - t),
            t * t * (3.0 - 2.0 * t),
            t * t * (t - 1.0),
        );
        let (u0, u1) = (-1.0 + h * i as f64, -1.0 + h * (i + 1) as f64);
        let c0 = h00 * self.c0[i] + h10 * h * self.d0[i] + h01 * self.c0[i + 1] + h11 * h * self.d0[i + 1];
        let c1 = h00 * self.c1[i]
            + h10 * h * u0 * self.d0[i]
            + h01 * self.c1[i + 1]
            + h11 * h * u1 * self.d0[i + 1];
        (c0, c1)
    }
}

/// A mother wavelet, optionally mollified by the unit-mass bump of half-width
/// η (in mother coordinates) and renormalized to unit L² norm. η = 0 is the
/// pure Alpert mother.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletShape {
    species: Species,
    eta: f64,
    scale: f64,
}

impl WaveletShape {
    pub fn new(species: Species, eta: f64) -> Result<Self> {
        if !(0.0..=0.125).contains(&eta) {
            return Err(Error::Parameter(format!("smoothing width {eta} outside [0, 1/8]")));
        }
        let mut shape = Self { species, eta, scale: 1.0 };
        if eta > 0.0 {
            let norm2 = shape.integrate_mother(|v| v * v);
            shape.scale = norm2.sqrt().recip();
        }
        Ok(shape)
    }

    pub fn pure(species: Species) -> Self {
        Self { species, eta: 0.0, scale: 1.0 }
    }

    pub fn species(&self) -> Species {
        self.species
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Half-width of the mother support.
    pub fn reach(&self) -> f64 {
        1.0 + self.eta
    }

    /// Breakpoints of the mother outside which it is C∞ piecewise.
    pub fn breakpoints(&self) -> Vec<f64> {
        let e = self.eta;
        if e == 0.0 {
            vec![-1.0, 0.0, 1.0]
        } else {
            vec![-1.0 - e, -1.0 + e, -e, e, 1.0 - e, 1.0 + e]
        }
    }

    /// ∫ g(w(y)) dy over the support by composite Gauss–Legendre.
    pub fn integrate_mother(&self, g: impl Fn(f64) -> f64) -> f64 {
        let gl = GaussLegendre::new(12);
        gl.integrate_composite(&self.breakpoints(), 16, |y| g(self.mother(y)))
    }

    pub fn mother(&self, y: f64) -> f64 {
        if self.eta == 0.0 {
            if y >= 1.0 {
                return 0.0;
            }
            return alpert_mother(self.species, y);
        }
        self.scale * self.convolved(y)
    }

    fn convolved(&self, y: f64) -> f64 {
        let e = self.eta;
        if y.abs() >= 1.0 + e {
            return 0.0;
        }
        let (l, r) = match self.species {
            Species::H => ((-SQRT_3_2, -2.0 * SQRT_3_2), (-SQRT_3_2, 2.0 * SQRT_3_2)),
            Species::K => {
                let a = std::f64::consts::SQRT_2;
                ((a, 1.5 * a), (-a, 1.5 * a))
            }
        };
        let tables = bump_tables();
        let mut acc = 0.0;
        // z = y - t on [-1, 0) and [0, 1) ↔ t ∈ (y - zhi, y - zlo]
        for ((alpha, beta), (zlo, zhi)) in [(l, (-1.0, 0.0)), (r, (0.0, 1.0))] {
            let ta = (y - zhi).max(-e);
            let tb = (y - zlo).min(e);
            if tb <= ta {
                continue;
            }
            let (a0, a1) = tables.eval(ta / e);
            let (b0, b1) = tables.eval(tb / e);
            acc += (alpha + beta * y) * (b0 - a0) - beta * e * (b1 - a1);
        }
        acc
    }

    /// Value of the normalized copy on I at x.
    pub fn eval(&self, interval: &DyadicInterval, x: f64) -> f64 {
        if self.eta == 0.0 {
            return alpert_wavelet(interval, self.species, x);
        }
        (2.0 / interval.length()).sqrt() * self.mother(mother_arg(interval, x))
    }
}

/// Smoothed Alpert wavelet h_I^η or k_I^η at x; requires 0 < η ≤ 1/8.
pub fn smooth_alpert_wavelet(interval: &DyadicInterval, species: Species, eta: f64, x: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 0.125) {
        return Err(Error::Parameter(format!("smoothing width {eta} outside (0, 1/8]")));
    }
    Ok(WaveletShape::new(species, eta)?.eval(interval, x))
}

/// Values of all wavelets of one level and shift on a sample grid. Translating
/// by one interval moves the samples by exactly 2^{-s}·samples_per_unit
/// positions, so a single table serves the whole level.
#[derive(Debug, Clone)]
pub struct LevelTable {
    pub level: u32,
    pub shift: f64,
    first: i64,
    stride: i64,
    values: Vec<f64>,
    grid_len: usize,
}

impl LevelTable {
    pub fn new(shape: &WaveletShape, level: u32, shift: f64, grid_left: f64, grid_len: usize, samples_per_unit: u64) -> Result<Self> {
        if samples_per_unit < 1u64 << level {
            return Err(Error::Resolution(format!("{samples_per_unit} samples per unit cannot resolve level {level}")));
        }
        let spu = samples_per_unit as f64;
        let first_interval = DyadicInterval { level, index: 1, shift };
        let half = 0.5 * first_interval.length() * shape.reach();
        let c = first_interval.center();
        let first = ((c - half - grid_left) * spu - 0.5).ceil() as i64;
        let last = ((c + half - grid_left) * spu - 0.5).floor() as i64;
        let values = (first..=last)
            .map(|j| shape.eval(&first_interval, grid_left + (j as f64 + 0.5) / spu))
            .collect();
        Ok(Self { level, shift, first, stride: (samples_per_unit >> level) as i64, values, grid_len })
    }

    /// (sample index, value) pairs of wavelet n inside the grid.
    pub fn entries(&self, index: u64) -> impl Iterator<Item = (usize, f64)> + '_ {
        let start = self.first + (index as i64 - 1) * self.stride;
        self.values.iter().enumerate().filter_map(move |(k, &v)| {
            let j = start + k as i64;
            (j >= 0 && (j as usize) < self.grid_len).then_some((j as usize, v))
        })
    }

    pub fn inner(&self, f: &SampledFunction, index: u64) -> f64 {
        self.entries(index).map(|(j, v)| f.values[j] * v).sum::<f64>() * f.spacing()
    }

    pub fn accumulate(&self, out: &mut [f64], index: u64, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        for (j, v) in self.entries(index) {
            out[j] += coeff * v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive, Adaptive};

    #[test]
    fn mother_values() {
        assert_eq!(alpert_mother(Species::H, 0.5), 0.0);
        assert!((alpert_mother(Species::H, 1.0) - 1.224_744_871).abs() < 1e-9);
        assert!((alpert_mother(Species::K, -1.0) + 0.707_106_781).abs() < 1e-9);
        assert_eq!(alpert_mother(Species::K, 0.0), 0.0);
        assert_eq!(alpert_mother(Species::H, 1.5), 0.0);
    }

    #[test]
    fn exact_moments() {
        for s in Species::BOTH {
            let m = moments(s, 3);
            assert!(m[0].abs() < 1e-15 && m[1].abs() < 1e-15, "{s}: {m:?}");
        }
        assert!((moments(Species::H, 2)[2] - 6f64.sqrt() / 6.0).abs() < 1e-15);
    }

    #[test]
    fn moments_agree_with_quadrature() {
        let gl = GaussLegendre::new(6);
        for s in Species::BOTH {
            for (j, m) in moments(s, 4).into_iter().enumerate() {
                let q = gl.integrate_composite(&[-1.0, 0.0, 1.0], 1, |x| x.powi(j as i32) * alpert_mother(s, x));
                assert!((q - m).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn wavelet_normalization_and_midpoint_value() {
        let i = DyadicInterval::new(0, 1, 0.0).unwrap();
        assert!((alpert_wavelet(&i, Species::H, 0.5) + 3f64.sqrt()).abs() < 1e-12);
        let gl = GaussLegendre::new(6);
        for (level, index) in [(0, 1), (3, 5), (7, 100)] {
            let i = DyadicInterval::new(level, index, 0.001).unwrap();
            let br = [i.left(), i.center(), i.right()];
            for s in Species::BOTH {
                let n = gl.integrate_composite(&br, 1, |x| alpert_wavelet(&i, s, x).powi(2));
                assert!((n - 1.0).abs() < 1e-10);
            }
            let hk = gl.integrate_composite(&br, 1, |x| alpert_wavelet(&i, Species::H, x) * alpert_wavelet(&i, Species::K, x));
            assert!(hk.abs() < 1e-10);
        }
    }

    #[test]
    fn bump_tables_interpolate_accurately() {
        let t = bump_tables();
        let z = bump_mass_1d();
        let opts = Adaptive { abs_tol: 1e-16, rel_tol: 1e-15, initial_panels: 4, ..Default::default() };
        for &u in &[-0.9, -0.3331, 0.0, 0.123_456, 0.77] {
            let b = |v: f64| (-1.0 / (1.0 - v * v)).exp() / z;
            let c0 = adaptive(b, -1.0, u, opts).unwrap().value;
            let c1 = adaptive(|v| v * b(v), -1.0, u, opts).unwrap().value;
            let (i0, i1) = t.eval(u);
            assert!((i0 - c0).abs() < 1e-14, "{u}: {i0} vs {c0}");
            assert!((i1 - c1).abs() < 1e-14, "{u}: {i1} vs {c1}");
        }
    }

    #[test]
    fn smooth_mother_matches_direct_convolution() {
        let eta = 0.1;
        let shape = WaveletShape::new(Species::K, eta).unwrap();
        let phi = crate::cutoff::CutoffProfile::new(eta).unwrap();
        let opts = Adaptive { abs_tol: 1e-14, rel_tol: 1e-13, initial_panels: 8, ..Default::default() };
        for &y in &[-1.05, -0.97, -0.5, -0.02, 0.0, 0.04, 0.95, 1.09] {
            let direct = adaptive(|t| alpert_mother(Species::K, y - t) * phi.value(t), -eta, eta, opts).unwrap().value;
            let got = shape.mother(y) / shape.scale;
            assert!((got - direct).abs() < 1e-9, "y={y}: {got} vs {direct}");
        }
    }

    #[test]
    fn smooth_mother_moments_and_norm() {
        for eta in [0.125, 1.0 / 64.0, 1.0 / 1024.0] {
            for s in Species::BOTH {
                let shape = WaveletShape::new(s, eta).unwrap();
                let gl = GaussLegendre::new(12);
                let br = shape.breakpoints();
                let m0 = gl.integrate_composite(&br, 16, |y| shape.mother(y));
                let m1 = gl.integrate_composite(&br, 16, |y| y * shape.mother(y));
                let n = gl.integrate_composite(&br, 16, |y| shape.mother(y).powi(2));
                assert!(m0.abs() < 1e-10 && m1.abs() < 1e-10, "{s} eta={eta}: {m0} {m1}");
                assert!((n - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn smooth_wavelet_converges_to_alpert() {
        let i = DyadicInterval::new(2, 2, 0.0).unwrap();
        let eta = 1.0 / 1024.0;
        let mut worst = 0.0f64;
        for j in 0..1000 {
            let x = i.left() + (j as f64 + 0.5) / 1000.0 * i.length();
            for s in Species::BOTH {
                let d = smooth_alpert_wavelet(&i, s, eta, x).unwrap() - alpert_wavelet(&i, s, x);
                let y = mother_arg(&i, x);
                if y.abs() > 4.0 * eta && (1.0 - y.abs()) > 4.0 * eta {
                    worst = worst.max(d.abs());
                }
            }
        }
        assert!(worst < 1e-2, "{worst}");
        assert!(smooth_alpert_wavelet(&i, Species::H, 0.2, 0.3).is_err());
        assert!(smooth_alpert_wavelet(&i, Species::H, 0.0, 0.3).is_err());
    }

    #[test]
    fn smooth_mother_has_bounded_fourth_differences() {
        let shape = WaveletShape::new(Species::K, 1.0 / 16.0).unwrap();
        let mut worst = 0.0f64;
        for h in [1.0 / 256.0, 1.0 / 512.0] {
            let mut y = -1.1;
            while y < 1.1 {
                let d4 = shape.mother(y + 2.0 * h) - 4.0 * shape.mother(y + h) + 6.0 * shape.mother(y)
                    - 4.0 * shape.mother(y - h)
                    + shape.mother(y - 2.0 * h);
                worst = worst.max((d4 / h.powi(4)).abs());
                y += h;
            }
        }
        assert!(worst.is_finite() && worst < 1e9, "{worst}");
    }

    #[test]
    fn level_table_matches_pointwise() {
        let shape = WaveletShape::new(Species::H, 1.0 / 64.0).unwrap();
        let f = SampledFunction::from_fn(-0.5, 1.5, 1 << 10, |x| (3.0 * x).cos()).unwrap();
        let table = LevelTable::new(&shape, 3, 0.05, f.left, f.len(), f.samples_per_unit).unwrap();
        for n in [1, 4, 8] {
            let i = DyadicInterval { level: 3, index: n, shift: 0.05 };
            let direct: f64 = f.nodes().zip(&f.values).map(|(x, v)| v * shape.eval(&i, x)).sum::<f64>() * f.spacing();
            assert!((table.inner(&f, n) - direct).abs() < 1e-13);
        }
    }
}
