use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::polygon::{intersection_area, minkowski_sum, ConvexPolygon, Point};
use super::rect::{cap_rectangle, TiltedRect};

/// Geometry of one pair of cap rectangles. `intersect_area` is the area of
/// R_m ∩ (R_n translated to the center of R_m), the largest intersection over
/// all translates; `literal_intersect_area` uses the rectangles in place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairGeometry {
    pub s: u32,
    pub m: u64,
    pub n: u64,
    pub angle: f64,
    pub intersect_area: f64,
    pub literal_intersect_area: f64,
    pub sum_area: f64,
    /// sum_area / (C²(1+|m-n|)2^{-3s})
    pub ratio_sum: f64,
    /// intersect_area·(2^{-s} + angle) / (C² 2^{-4s})
    pub ratio_intersect: f64,
    /// angle / (2^{-s}(1+|m-n|))
    pub angle_ratio_scaled: f64,
    /// angle / (2^{-s} + |m-n|)
    pub angle_ratio_additive: f64,
}

fn concentric(a: &TiltedRect, b: &TiltedRect) -> TiltedRect {
    TiltedRect { center: a.center, ..*b }
}

pub fn pair_geometry(m: u64, n: u64, s: u32, c: f64) -> Result<PairGeometry> {
    let (rm, rn) = (cap_rectangle(m, s, c)?, cap_rectangle(n, s, c)?);
    let (pm, pn) = (rm.polygon(), rn.polygon());
    let angle = (rm.angle() - rn.angle()).abs();
    let intersect_area = intersection_area(&pm, &concentric(&rm, &rn).polygon());
    let literal_intersect_area = intersection_area(&pm, &pn);
    let sum_area = minkowski_sum(&pm, &pn)?.area();
    let len = (-(s as f64)).exp2();
    let gap = m.abs_diff(n) as f64;
    let c2 = c * c;
    Ok(PairGeometry {
        s,
        m,
        n,
        angle,
        intersect_area,
        literal_intersect_area,
        sum_area,
        ratio_sum: sum_area / (c2 * (1.0 + gap) * len.powi(3)),
        ratio_intersect: intersect_area * (len + angle) / (c2 * len.powi(4)),
        angle_ratio_scaled: angle / (len * (1.0 + gap)),
        angle_ratio_additive: angle / (len + gap),
    })
}

/// Exact values of 1_{R_m} ∗ 1_{R_n}(z) = |R_m ∩ (z - R_n)| at the centers of
/// a points_per_axis² grid covering R_m + R_n, laid out along the tangent and
/// normal of R_m.
#[derive(Debug, Clone)]
pub struct ConvolutionSample {
    pub points: Vec<Point>,
    pub values: Vec<f64>,
    pub cell_area: f64,
    pub sum_set: ConvexPolygon,
    pub max_intersection: f64,
}

/// Fewest grid points per axis accepted for convolution sampling.
pub const MIN_POINTS_PER_AXIS: usize = 16;

pub fn indicator_convolution(m: u64, n: u64, s: u32, c: f64, points_per_axis: usize) -> Result<ConvolutionSample> {
    let (rm, rn) = (cap_rectangle(m, s, c)?, cap_rectangle(n, s, c)?);
    convolve_rects(&rm, &rn, points_per_axis)
}

pub fn convolve_rects(rm: &TiltedRect, rn: &TiltedRect, points_per_axis: usize) -> Result<ConvolutionSample> {
    if points_per_axis < MIN_POINTS_PER_AXIS {
        return Err(Error::Resolution(format!(
            "{points_per_axis} points per axis; at least {MIN_POINTS_PER_AXIS} required"
        )));
    }
    let (pm, pn) = (rm.polygon(), rn.polygon());
    let sum_set = minkowski_sum(&pm, &pn)?;
    let neg = pn.reflect();
    let origin = (rm.center.0 + rn.center.0, rm.center.1 + rn.center.1);
    let frame = TiltedRect { center: origin, ..*rm };
    let (mut u0, mut u1, mut v0, mut v1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &p in sum_set.vertices() {
        let (u, v) = frame.local(p);
        u0 = u0.min(u);
        u1 = u1.max(u);
        v0 = v0.min(v);
        v1 = v1.max(v);
    }
    let k = points_per_axis;
    let (du, dv) = ((u1 - u0) / k as f64, (v1 - v0) / k as f64);
    let (t, nrm) = (rm.tangent, rm.normal());
    let points: Vec<Point> = (0..k * k)
        .map(|idx| {
            let (i, j) = (idx % k, idx / k);
            let u = u0 + (i as f64 + 0.5) * du;
            let v = v0 + (j as f64 + 0.5) * dv;
            (origin.0 + u * t.0 + v * nrm.0, origin.1 + u * t.1 + v * nrm.1)
        })
        .collect();
    let values = points.par_iter().map(|&z| intersection_area(&pm, &neg.translate(z))).collect();
    let max_intersection = intersection_area(&pm, &TiltedRect { center: rm.center, ..*rn }.polygon());
    Ok(ConvolutionSample { points, values, cell_area: du * dv, sum_set, max_intersection })
}

/// ‖1_{R_m} ∗ 1_{R_n}‖_p against the bound |R_m ∩ R_n|^p·|R_m + R_n| (p-th powers).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionNorm {
    pub p: f64,
    pub norm: f64,
    pub norm_pow: f64,
    pub bound_pow: f64,
    pub ratio: f64,
    /// Every positive value sits inside R_m + R_n.
    pub support_contained: bool,
    /// Every value is at most |R_m ∩ R_n|.
    pub pointwise_bounded: bool,
}

impl ConvolutionSample {
    pub fn norm(&self, p: f64) -> ConvolutionNorm {
        let norm_pow: f64 = self.values.iter().map(|v| v.powf(p)).sum::<f64>() * self.cell_area;
        let bound_pow = self.max_intersection.powf(p) * self.sum_set.area();
        let tol = 1e-12 * self.max_intersection;
        ConvolutionNorm {
            p,
            norm: norm_pow.powf(1.0 / p),
            norm_pow,
            bound_pow,
            ratio: norm_pow / bound_pow,
            support_contained: self.points.iter().zip(&self.values).all(|(&z, &v)| v <= tol || self.sum_set.contains(z)),
            pointwise_bounded: self.values.iter().all(|&v| v <= self.max_intersection + tol),
        }
    }
}

pub fn indicator_convolution_norm(m: u64, n: u64, s: u32, c: f64, p: f64, points_per_axis: usize) -> Result<ConvolutionNorm> {
    if p < 1.0 {
        return Err(Error::Parameter(format!("exponent {p} below 1")));
    }
    Ok(indicator_convolution(m, n, s, c, points_per_axis)?.norm(p))
}

/// Σ_{m=1}^{2^s} (1+|m-n|)^{-2/(q-2)} by direct summation.
pub fn harmonic_sum(s: u32, n: u64, q: f64) -> f64 {
    let e = -2.0 / (q - 2.0);
    (1..=(1u64 << s)).map(|m| (1.0 + m.abs_diff(n) as f64).powf(e)).sum()
}

/// Both sides of the second decoupling for F = Σ a_n 1_{I_n} at level s:
/// Σ_{m,n} |a_m|^p |a_n|^p 2^{4ps} ‖1_{R_m} ∗ 1_{R_n}‖_p^p with p = q/(q-2), and
/// ‖F‖_r^r with r = 2q/(q-2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondDecoupling {
    pub q: f64,
    pub assembled: f64,
    pub norm_pow: f64,
    pub ratio: f64,
}

pub fn second_decoupling(a: &[f64], s: u32, c: f64, q: f64, points_per_axis: usize) -> Result<SecondDecoupling> {
    if a.len() != 1usize << s {
        return Err(Error::Parameter(format!("{} coefficients for level {s}", a.len())));
    }
    if q <= 2.0 {
        return Err(Error::Parameter(format!("exponent q = {q} must exceed 2")));
    }
    let p = q / (q - 2.0);
    let n = a.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let terms: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| {
            if a[i] == 0.0 || a[j] == 0.0 {
                return Ok(0.0);
            }
            let conv = indicator_convolution(i as u64 + 1, j as u64 + 1, s, c, points_per_axis)?.norm(p);
            let w = if i == j { 1.0 } else { 2.0 };
            Ok(w * (a[i].abs() * a[j].abs()).powf(p) * conv.norm_pow)
        })
        .collect::<Result<_>>()?;
    let assembled = (4.0 * p * s as f64).exp2() * terms.iter().sum::<f64>();
    let r = 2.0 * q / (q - 2.0);
    let len = (-(s as f64)).exp2();
    let norm_pow = a.iter().map(|v| v.abs().powf(r)).sum::<f64>() * len;
    Ok(SecondDecoupling { q, assembled, norm_pow, ratio: assembled / norm_pow })
}

/// CSV report with columns s, m, n, angle, intersect_area, sum_area,
/// ratio_sum, ratio_intersect.
pub fn write_geometry_report<W: Write>(rows: &[PairGeometry], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["s", "m", "n", "angle", "intersect_area", "sum_area", "ratio_sum", "ratio_intersect"])
        .map_err(err)?;
    for r in rows {
        w.write_record([
            r.s.to_string(),
            r.m.to_string(),
            r.n.to_string(),
            r.angle.to_string(),
            r.intersect_area.to_string(),
            r.sum_area.to_string(),
            r.ratio_sum.to_string(),
            r.ratio_intersect.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// Closed-form area of the sum of two rectangles with full sides a, b whose
/// long axes meet at angle θ.
pub fn rect_sum_area(a: f64, b: f64, theta: f64) -> f64 {
    2.0 * a * b + 2.0 * a * b * theta.cos().abs() + (a * a + b * b) * theta.sin().abs()
}
