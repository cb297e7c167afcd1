use num_complex::Complex64;

use crate::cutoff::SmoothWindow;
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::quadrature::GaussLegendre;
use crate::sampled::DyadicInterval;
use crate::wavelets::{Species, WaveletShape};

/// Largest number of quadrature panels across the wavelet support.
pub const MAX_PANELS: usize = 1 << 16;

/// w ↦ e^{iξ₂w²}(2^{s/2}∫ e^{-iξ₂x²} e^{-i(2ξ₂w+ξ₁)x} h_s^η(x) dx) ψ(w), with
/// h_s^η the smoothed h-wavelet on [0, 2^{-s}).
#[derive(Debug, Clone)]
pub struct Digamma {
    xi: (f64, f64),
    scale: f64,
    psi: SmoothWindow,
    /// (x, quadrature weight × h(x))
    nodes: Vec<(f64, f64)>,
    l1: f64,
}

impl Digamma {
    pub fn new(xi: (f64, f64), s: u32, eta: f64, psi: SmoothWindow) -> Result<Self> {
        let shape = WaveletShape::new(Species::H, eta)?;
        let interval = DyadicInterval::new(s, 1, 0.0)?;
        let (c, half) = (interval.center(), 0.5 * interval.length());
        let breaks: Vec<f64> = shape.breakpoints().iter().map(|y| c + half * y).collect();
        let (pc, pd) = psi.support();
        let wmax = pc.abs().max(pd.abs());
        let xmax = breaks.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let rate = 2.0 * xi.1.abs() * (xmax + wmax) + xi.0.abs();
        let gl = GaussLegendre::new(16);
        let mut nodes = Vec::new();
        let mut total = 0usize;
        for win in breaks.windows(2) {
            let (a, b) = (win[0], win[1]);
            let panels = ((rate * (b - a) / 0.5).ceil() as usize).max(2);
            total += panels;
            if total > MAX_PANELS {
                return Err(Error::Aliasing(format!(
                    "phase rate {rate:.3e} needs more than {MAX_PANELS} panels across the wavelet support"
                )));
            }
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                for (x, w) in gl.mapped(a + h * p as f64, a + h * (p + 1) as f64) {
                    nodes.push((x, w * shape.eval(&interval, x)));
                }
            }
        }
        let l1 = gl.integrate_composite(&breaks, 64, |x| shape.eval(&interval, x).abs());
        Ok(Self { xi, scale: (0.5 * s as f64).exp2(), psi, nodes, l1 })
    }

    /// 2^{s/2}∫ e^{-iξ₂x²} e^{-i(2ξ₂w+ξ₁)x} h(x) dx and its first two
    /// w-derivatives.
    pub fn inner_jet(&self, w: f64) -> [Complex64; 3] {
        let (xi1, xi2) = self.xi;
        let mut out = [Complex64::default(); 3];
        for &(x, wh) in &self.nodes {
            let z = Complex64::from_polar(wh, -xi2 * x * x - (2.0 * xi2 * w + xi1) * x);
            let d = Complex64::new(0.0, -2.0 * xi2 * x);
            out[0] += z;
            out[1] += z * d;
            out[2] += z * d * d;
        }
        out.map(|v| v * self.scale)
    }

    pub fn jet(&self, w: f64) -> Jet2 {
        let ps = self.psi.jet2(w);
        if ps.v == Complex64::default() && ps.d1 == Complex64::default() && ps.d2 == Complex64::default() {
            return Jet2::default();
        }
        let xi2 = self.xi.1;
        let phase = Jet2::new(
            Complex64::new(0.0, xi2 * w * w),
            Complex64::new(0.0, 2.0 * xi2 * w),
            Complex64::new(0.0, 2.0 * xi2),
        )
        .exp();
        let [i0, i1, i2] = self.inner_jet(w);
        phase * Jet2::new(i0, i1, i2) * ps
    }

    pub fn value(&self, w: f64) -> Complex64 {
        self.jet(w).v
    }

    /// 2^{s/2}‖h_s^η‖_1 |ψ(w)|.
    pub fn bound(&self, w: f64) -> f64 {
        self.scale * self.l1 * self.psi.value(w).abs()
    }
}

pub fn digamma_f(xi: (f64, f64), s: u32, eta: f64, psi: SmoothWindow, w: f64) -> Result<Complex64> {
    Ok(Digamma::new(xi, s, eta, psi)?.value(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive, Adaptive};
    use crate::wavelets::smooth_alpert_wavelet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vanishes_outside_multiplier() {
        let d = Digamma::new((30.0, 50.0), 4, 0.05, SmoothWindow::multiplier()).unwrap();
        assert_eq!(d.value(0.1), Complex64::default());
        assert_eq!(d.value(0.9), Complex64::default());
    }

    #[test]
    fn zero_frequency_gives_vanishing_moment() {
        let d = Digamma::new((0.0, 0.0), 4, 0.05, SmoothWindow::multiplier()).unwrap();
        assert!(d.inner_jet(0.5)[0].norm() < 1e-8);
    }

    #[test]
    fn matches_adaptive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (s, eta) = (4u32, 0.05);
        let psi = SmoothWindow::multiplier();
        for _ in 0..6 {
            let xi = (rng.gen_range(-200.0..200.0), rng.gen_range(0.0..300.0));
            let w = rng.gen_range(0.3..0.7);
            let iv = DyadicInterval::new(s, 1, 0.0).unwrap();
            let reach = 0.5 * iv.length() * (1.0 + eta);
            let inner = adaptive(
                |x: f64| {
                    let h = smooth_alpert_wavelet(&iv, Species::H, eta, x).unwrap();
                    Complex64::from_polar(h, -xi.1 * x * x - (2.0 * xi.1 * w + xi.0) * x)
                },
                iv.center() - reach,
                iv.center() + reach,
                Adaptive { abs_tol: 1e-14, rel_tol: 1e-12, initial_panels: 16, ..Default::default() },
            )
            .unwrap()
            .value;
            let want = Complex64::from_polar(4.0 * psi.value(w), xi.1 * w * w) * inner;
            let got = digamma_f(xi, s, eta, psi, w).unwrap();
            assert!((got - want).norm() < 1e-7, "{got} vs {want}");
            let d = Digamma::new(xi, s, eta, psi).unwrap();
            assert!(got.norm() <= d.bound(w) + 1e-10);
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let d = Digamma::new((40.0, 120.0), 3, 0.05, SmoothWindow::multiplier()).unwrap();
        let (w, h) = (0.31, 1e-5);
        let j = d.jet(w);
        let fd1 = (d.value(w + h) - d.value(w - h)) / (2.0 * h);
        let fd2 = (d.value(w + h) - d.value(w) * 2.0 + d.value(w - h)) / (h * h);
        assert!((j.d1 - fd1).norm() < 1e-5 * (1.0 + fd1.norm()));
        assert!((j.d2 - fd2).norm() < 1e-2 * (1.0 + fd2.norm()));
    }

    #[test]
    fn extreme_frequency_is_aliasing() {
        let r = Digamma::new((1e12, 0.0), 2, 0.05, SmoothWindow::multiplier());
        assert!(matches!(r, Err(Error::Aliasing(_))));
    }
}
