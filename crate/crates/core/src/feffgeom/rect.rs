use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::polygon::{ConvexPolygon, Point};

/// Rectangle with long axis along `tangent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltedRect {
    pub center: Point,
    pub tangent: Point,
    pub half_long: f64,
    pub half_short: f64,
}

impl TiltedRect {
    pub fn normal(&self) -> Point {
        (-self.tangent.1, self.tangent.0)
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_long * self.half_short
    }

    /// Coordinates of p along (tangent, normal) relative to the center.
    pub fn local(&self, p: Point) -> Point {
        let d = (p.0 - self.center.0, p.1 - self.center.1);
        let n = self.normal();
        (d.0 * self.tangent.0 + d.1 * self.tangent.1, d.0 * n.0 + d.1 * n.1)
    }

    pub fn contains(&self, p: Point) -> bool {
        let (u, v) = self.local(p);
        let tol = 1e-12;
        u.abs() <= self.half_long * (1.0 + tol) && v.abs() <= self.half_short * (1.0 + tol)
    }

    pub fn polygon(&self) -> ConvexPolygon {
        let (t, n) = (self.tangent, self.normal());
        let (l, s) = (self.half_long, self.half_short);
        let corner = |a: f64, b: f64| (self.center.0 + a * t.0 + b * n.0, self.center.1 + a * t.1 + b * n.1);
        ConvexPolygon::new(vec![corner(-l, -s), corner(l, -s), corner(l, s), corner(-l, s)])
            .expect("rectangle with positive sides")
    }

    /// Orientation angle of the tangent.
    pub fn angle(&self) -> f64 {
        self.tangent.1.atan2(self.tangent.0)
    }
}

/// Points of the parabola over [l, r] used for the containment check.
pub const CAP_SAMPLES: usize = 64;

/// The C2^{-s} × C2^{-2s} rectangle centered at Φ(x_m), x_m the midpoint of
/// I_m = [2^{-s}(m-1), 2^{-s}m), long side along the tangent (1, 2x_m); fails
/// unless it contains the sampled cap {(x, x²) : x ∈ I_m}.
pub fn cap_rectangle(m: u64, s: u32, c: f64) -> Result<TiltedRect> {
    if m < 1 || m > 1u64 << s {
        return Err(Error::Parameter(format!("cap index {m} outside 1..=2^{s}")));
    }
    if !(c > 0.0) {
        return Err(Error::Parameter(format!("rectangle constant {c} must be positive")));
    }
    let len = (-(s as f64)).exp2();
    let xm = len * (m as f64 - 0.5);
    let norm = (1.0 + 4.0 * xm * xm).sqrt();
    let rect = TiltedRect {
        center: (xm, xm * xm),
        tangent: (1.0 / norm, 2.0 * xm / norm),
        half_long: 0.5 * c * len,
        half_short: 0.5 * c * len * len,
    };
    let l = len * (m - 1) as f64;
    for k in 0..CAP_SAMPLES {
        let x = l + len * k as f64 / (CAP_SAMPLES - 1) as f64;
        if !rect.contains((x, x * x)) {
            return Err(Error::Certification(format!(
                "cap point ({x}, {}) of I_{m} at level {s} lies outside the rectangle with C = {c}",
                x * x
            )));
        }
    }
    Ok(rect)
}
