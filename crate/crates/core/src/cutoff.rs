//! Smooth compactly supported bumps and windows.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::quadrature::{adaptive, Adaptive};

fn raw_bump(u: f64) -> f64 {
    let r = 1.0 - u * u;
    if r <= 0.0 {
        0.0
    } else {
        (-1.0 / r).exp()
    }
}

/// ∫_{-1}^{1} exp(-1/(1-u²)) du.
pub fn bump_mass_1d() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| {
        let opts = Adaptive { abs_tol: 1e-16, rel_tol: 1e-15, initial_panels: 8, ..Default::default() };
        adaptive(raw_bump, -1.0, 1.0, opts).expect("bump mass converges").value
    })
}

/// ∫ over the unit disc of exp(-1/(1-|z|²)).
pub fn bump_mass_2d() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| {
        let opts = Adaptive { abs_tol: 1e-16, rel_tol: 1e-15, initial_panels: 8, ..Default::default() };
        2.0 * PI * adaptive(|r| r * raw_bump(r), 0.0, 1.0, opts).expect("bump mass converges").value
    })
}

/// Unit-mass bump exp(-1/(1-(t/η)²))/(η Z) supported in [-η, η].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffProfile {
    half_width: f64,
    norm: f64,
}

impl CutoffProfile {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Parameter(format!("cutoff half-width must be positive, got {half_width}")));
        }
        Ok(Self { half_width, norm: 1.0 / (half_width * bump_mass_1d()) })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn value(&self, t: f64) -> f64 {
        self.norm * raw_bump(t / self.half_width)
    }

    pub fn sup(&self) -> f64 {
        self.norm * (-1.0f64).exp()
    }
}

/// Unit-mass radial bump on the unit disc.
pub fn mollifier_2d(x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    if r2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r2)).exp() / bump_mass_2d()
    }
}

/// Smooth step: 0 for t ≤ 0, 1 for t ≥ 1; returns value and two derivatives.
fn smooth_step(t: f64) -> [f64; 3] {
    if t <= 0.0 {
        return [0.0, 0.0, 0.0];
    }
    if t >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let b = |x: f64| -> [f64; 3] {
        if x < 1.0 / 700.0 {
            return [0.0, 0.0, 0.0];
        }
        let e = (-1.0 / x).exp();
        let x2 = x * x;
        [e, e / x2, e * (1.0 / (x2 * x2) - 2.0 / (x2 * x))]
    };
    let [u, u1, u2] = b(t);
    let [v, w1, w2] = b(1.0 - t);
    let (v1, v2) = (-w1, w2);
    let sum = u + v;
    let n = u1 * v - u * v1;
    let n1 = u2 * v - u * v2;
    [
        u / sum,
        n / (sum * sum),
        n1 / (sum * sum) - 2.0 * n * (u1 + v1) / (sum * sum * sum),
    ]
}

/// C∞ window equal to 1 on [a, b] and vanishing outside (c, d).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothWindow {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl SmoothWindow {
    pub fn new(c: f64, a: f64, b: f64, d: f64) -> Result<Self> {
        if !(c < a && a <= b && b < d) {
            return Err(Error::Parameter(format!("window needs c < a <= b < d, got {c}, {a}, {b}, {d}")));
        }
        Ok(Self { c, a, b, d })
    }

    /// Equal to 1 on [1/3, 2/3], supported in (1/4, 3/4).
    pub fn multiplier() -> Self {
        Self { c: 0.25, a: 1.0 / 3.0, b: 2.0 / 3.0, d: 0.75 }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x)[0]
    }

    /// Value and first two derivatives.
    pub fn jet(&self, x: f64) -> [f64; 3] {
        if x <= self.c || x >= self.d {
            return [0.0; 3];
        }
        let la = self.a - self.c;
        let lb = self.d - self.b;
        let [l0, l1, l2] = smooth_step((x - self.c) / la);
        let [r0, r1, r2] = smooth_step((self.d - x) / lb);
        let (l1, l2) = (l1 / la, l2 / (la * la));
        let (r1, r2) = (-r1 / lb, r2 / (lb * lb));
        [l0 * r0, l1 * r0 + l0 * r1, l2 * r0 + 2.0 * l1 * r1 + l0 * r2]
    }

    pub fn jet2(&self, x: f64) -> Jet2 {
        let [v, d1, d2] = self.jet(x);
        Jet2::real(v, d1, d2)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.c, self.d)
    }

    pub fn plateau(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}
