use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{CompensatedSum, GaussLegendre};

/// Σ_{k=-M}^{M} k^ℓ e^{ik·scale·t}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletSpec {
    pub order: u64,
    pub derivative: u32,
    pub scale: f64,
}

impl DirichletSpec {
    pub fn new(order: u64, derivative: u32, scale: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::Parameter("Dirichlet kernel order must be at least 1".into()));
        }
        if !(scale.is_finite() && scale != 0.0) {
            return Err(Error::Parameter(format!("argument dilation {scale} must be finite and nonzero")));
        }
        Ok(Self { order, derivative, scale })
    }

    /// The kernel of order M evaluated at 2^{-s}t.
    pub fn dilated(order: u64, s: u32) -> Result<Self> {
        Self::new(order, 0, (-(s as f64)).exp2())
    }

    /// Σ_k |k|^ℓ, the value scale of the kernel.
    pub fn coefficient_mass(&self) -> f64 {
        let m = self.order as i64;
        (-m..=m).map(|k| (k.unsigned_abs() as f64).powi(self.derivative as i32)).sum()
    }
}

/// The order M = 2^{(1-λ)s} rounded to the nearest integer (at least 1).
pub fn order_for(lambda: f64, s: u32) -> u64 {
    (((1.0 - lambda) * s as f64).exp2().round() as u64).max(1)
}

fn reduce(u: f64) -> f64 {
    let r = u.rem_euclid(2.0 * PI);
    if r >= PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Direct compensated summation.
pub fn dirichlet_direct(spec: &DirichletSpec, t: f64) -> Complex64 {
    let u = reduce(spec.scale * t);
    let m = spec.order as i64;
    let mut acc = CompensatedSum::default();
    for k in -m..=m {
        let w = (k as f64).powi(spec.derivative as i32);
        acc.add(Complex64::from_polar(w, k as f64 * u));
    }
    acc.value()
}

/// Closed form sin((M+1/2)u)/sin(u/2) and its first two derivatives in u, or
/// None too close to a multiple of 2π.
fn closed_form(order: u64, u: f64) -> Option<[f64; 3]> {
    let a = order as f64 + 0.5;
    let s = (0.5 * u).sin();
    if s.abs() * (order as f64 + 1.0) <= 1e-2 {
        return None;
    }
    let (n0, n1, n2) = ((a * u).sin(), a * (a * u).cos(), -a * a * (a * u).sin());
    let (s1, s2) = (0.5 * (0.5 * u).cos(), -0.25 * s);
    let q = n1 * s - n0 * s1;
    let d1 = q / (s * s);
    let d2 = (n2 * s - n0 * s2) / (s * s) - 2.0 * s1 * q / (s * s * s);
    Some([n0 / s, d1, d2])
}

/// Σ_{k=-M}^{M} k^ℓ e^{ik·scale·t}: closed form for ℓ ≤ 2 away from the peaks,
/// compensated direct summation near them and for ℓ > 2.
pub fn dirichlet(spec: &DirichletSpec, t: f64) -> Complex64 {
    let u = reduce(spec.scale * t);
    if spec.derivative <= 2 {
        if let Some([d0, d1, d2]) = closed_form(spec.order, u) {
            return match spec.derivative {
                0 => d0.into(),
                1 => Complex64::new(0.0, -d1),
                _ => (-d2).into(),
            };
        }
    }
    dirichlet_direct(spec, t)
}

/// (1/2π)∫_0^{2π} |D_M|^4 by the trapezoid rule with 8M + 8 points, exact for
/// the degree-4M trigonometric polynomial |D_M|^4.
pub fn period_l4(order: u64) -> f64 {
    let spec = DirichletSpec { order, derivative: 0, scale: 1.0 };
    let n = 8 * order as usize + 8;
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| dirichlet(&spec, j as f64 * h).norm().powi(4)).sum::<f64>() / n as f64
}

/// #{(k1, k2, k3, k4) ∈ [-M, M]^4 : k1 + k2 = k3 + k4} = Σ_j (2M + 1 - |j|)^2.
pub fn quadruple_count(order: u64) -> u64 {
    let m = order as i64;
    (-2 * m..=2 * m).map(|j| ((2 * m + 1 - j.abs()) as u64).pow(2)).sum()
}

/// Gauss–Legendre nodes per panel of width 1/M used by [`dirichlet_l4`].
pub const MIN_NODES_PER_LOBE: usize = 16;

/// ‖δ_{2^{-s}} D_M‖^4 on L^4([-2^s, 2^s)) = 2^s ∫_{-1}^{1} |D_M(u)|^4 du.
pub fn dirichlet_l4(order: u64, s: u32) -> Result<f64> {
    dirichlet_l4_with(order, s, MIN_NODES_PER_LOBE)
}

pub fn dirichlet_l4_with(order: u64, s: u32, nodes_per_lobe: usize) -> Result<f64> {
    if nodes_per_lobe < MIN_NODES_PER_LOBE {
        return Err(Error::Resolution(format!(
            "{nodes_per_lobe} nodes per width 1/M; at least {MIN_NODES_PER_LOBE} required"
        )));
    }
    let spec = DirichletSpec::new(order, 0, 1.0)?;
    let gl = GaussLegendre::new(nodes_per_lobe);
    let panels = 2 * order as usize;
    let v = gl.integrate_composite(&[-1.0, 1.0], panels, |u| dirichlet(&spec, u).norm().powi(4));
    Ok((s as f64).exp2() * v)
}

fn aligned_integral(order: u64, lo: f64, hi: f64, power: i32) -> f64 {
    // panels between consecutive zeros 2πk/(2M+1), where |D_M| is smooth
    let spec = DirichletSpec { order, derivative: 0, scale: 1.0 };
    let step = 2.0 * PI / (2 * order + 1) as f64;
    let gl = GaussLegendre::new(24);
    let k0 = (lo / step).floor() as i64;
    let k1 = (hi / step).ceil() as i64;
    let mut breaks: Vec<f64> = (k0..=k1).map(|k| (k as f64 * step).clamp(lo, hi)).collect();
    breaks.dedup();
    gl.integrate_composite(&breaks, 1, |u| dirichlet(&spec, u).norm().powi(power))
}

/// (1/2π)∫_{-π}^{π} |D_M|.
pub fn period_l1(order: u64) -> f64 {
    aligned_integral(order, -PI, PI, 1) / (2.0 * PI)
}

/// Share of ∫|D_M|^4 over one period carried by |u| ≤ width.
pub fn l4_mass_fraction(order: u64, width: f64) -> f64 {
    let w = width.min(PI);
    aligned_integral(order, -w, w, 4) / aligned_integral(order, -PI, PI, 4)
}

/// Γ_{λs} = {2^{-λs}k : k ∈ Z} ∩ [-1, 1).
pub fn gamma_lambda(lambda: f64, s: u32) -> Vec<f64> {
    let h = (-lambda * s as f64).exp2();
    let k0 = (-1.0 / h).ceil() as i64;
    let k1 = (1.0 / h).ceil() as i64;
    (k0..k1).map(|k| k as f64 * h).filter(|&mu| (-1.0..1.0).contains(&mu)).collect()
}

/// Q(a) = Σ_{μ∈Γ_{λs}} e^{-iaμ} e^{iξ₂μ²} by compensated summation.
pub fn quadratic_dirichlet(a: f64, xi2: f64, lambda: f64, s: u32) -> Complex64 {
    let mut acc = CompensatedSum::default();
    for mu in gamma_lambda(lambda, s) {
        acc.add(Complex64::from_polar(1.0, xi2 * mu * mu - a * mu));
    }
    acc.value()
}

/// CSV with columns t, re, im.
pub fn write_kernel_trace<W: Write>(points: &[(f64, Complex64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["t", "re", "im"]).map_err(err)?;
    for (t, v) in points {
        w.write_record([t.to_string(), v.re.to_string(), v.im.to_string()]).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}
