//! Second-order jets: a value together with its first two derivatives in one
//! real variable, propagated exactly through arithmetic.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub v: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl Jet2 {
    pub fn new(v: Complex64, d1: Complex64, d2: Complex64) -> Self {
        Self { v, d1, d2 }
    }

    pub fn real(v: f64, d1: f64, d2: f64) -> Self {
        Self::new(v.into(), d1.into(), d2.into())
    }

    pub fn constant(v: Complex64) -> Self {
        Self::new(v, Complex64::default(), Complex64::default())
    }

    /// The identity map at `x`.
    pub fn variable(x: f64) -> Self {
        Self::real(x, 1.0, 0.0)
    }

    /// Derivative of order 0, 1 or 2.
    pub fn derivative(&self, order: usize) -> Complex64 {
        match order {
            0 => self.v,
            1 => self.d1,
            2 => self.d2,
            _ => panic!("jets carry derivatives up to order 2"),
        }
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self::new(self.v * c, self.d1 * c, self.d2 * c)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Self::new(e, e * self.d1, e * (self.d2 + self.d1 * self.d1))
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at the jet's (real) value.
    pub fn compose(self, g: [f64; 3]) -> Self {
        let [g0, g1, g2] = g;
        Self::new(
            g0.into(),
            self.d1 * g1,
            self.d2 * g1 + self.d1 * self.d1 * g2,
        )
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d1, -self.d2)
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + self.d1 * o.d1 * 2.0 + self.v * o.d2,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_matches_polynomial() {
        // (x^2)(x^3) = x^5 at x = 1.3
        let x = Jet2::variable(1.3);
        let p = (x * x) * (x * x * x);
        let v = 1.3f64;
        assert!((p.v.re - v.powi(5)).abs() < 1e-12);
        assert!((p.d1.re - 5.0 * v.powi(4)).abs() < 1e-12);
        assert!((p.d2.re - 20.0 * v.powi(3)).abs() < 1e-11);
    }

    #[test]
    fn exp_of_imaginary_phase() {
        // e^{i x^2}: d1 = 2ix e^{ix^2}, d2 = (2i - 4x^2) e^{ix^2}
        let x = Jet2::variable(0.7);
        let j = (x * x).scale(Complex64::i()).exp();
        let e = Complex64::from_polar(1.0, 0.49);
        assert!((j.d1 - Complex64::new(0.0, 1.4) * e).norm() < 1e-14);
        assert!((j.d2 - Complex64::new(-4.0 * 0.49, 2.0) * e).norm() < 1e-14);
    }

    #[test]
    fn compose_is_chain_rule() {
        // sin(3x) at x = 0.2
        let x = Jet2::variable(0.2).scale(3.0.into());
        let u = 0.6f64;
        let j = x.compose([u.sin(), u.cos(), -u.sin()]);
        assert!((j.d1.re - 3.0 * u.cos()).abs() < 1e-14);
        assert!((j.d2.re + 9.0 * u.sin()).abs() < 1e-14);
    }
}
