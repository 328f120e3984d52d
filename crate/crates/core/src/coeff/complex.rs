//! Double-precision complex coefficients with tolerance-based zero testing.

use super::Coeff;
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;

/// Zero threshold on the modulus; matches the default float tolerance used
/// by the solvers.
pub const FLOAT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexF64 {
    pub re: f64,
    pub im: f64,
}

impl ComplexF64 {
    pub fn new(re: f64, im: f64) -> Self {
        // Normalize -0.0 so displays and comparisons never see a signed zero.
        ComplexF64 { re: re + 0.0, im: im + 0.0 }
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl Coeff for ComplexF64 {
    fn zero() -> Self {
        ComplexF64::new(0.0, 0.0)
    }

    fn one() -> Self {
        ComplexF64::new(1.0, 0.0)
    }

    fn from_rational(q: &BigRational) -> Self {
        ComplexF64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn add(&self, other: &Self) -> Self {
        ComplexF64::new(self.re + other.re, self.im + other.im)
    }

    fn mul(&self, other: &Self) -> Self {
        ComplexF64::new(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )
    }

    fn neg(&self) -> Self {
        ComplexF64::new(-self.re, -self.im)
    }

    fn inv(&self) -> Result<Self> {
        let n = self.re * self.re + self.im * self.im;
        if n.sqrt() <= FLOAT_TOL {
            return Err(Error::DivisionByZero);
        }
        Ok(ComplexF64::new(self.re / n, -self.im / n))
    }

    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }

    fn magnitude(&self) -> Option<f64> {
        Some(self.abs())
    }

    fn root_of_unity(order: u32, k: u32) -> Self {
        let theta = TAU * f64::from(k % order) / f64::from(order);
        ComplexF64::new(theta.cos(), theta.sin())
    }

    fn nth_roots(&self, n: u32) -> Result<Vec<Self>> {
        if n == 0 {
            return Err(Error::Invalid("0-th root requested".into()));
        }
        if self.is_zero() {
            return Ok(vec![Coeff::zero()]);
        }
        let r = self.abs().powf(1.0 / f64::from(n));
        let theta = self.im.atan2(self.re);
        let mut roots: Vec<ComplexF64> = (0..n)
            .map(|k| {
                let a = (theta + TAU * f64::from(k)) / f64::from(n);
                ComplexF64::new(r * a.cos(), r * a.sin())
            })
            .collect();
        roots.sort_by(|a, b| a.canonical_cmp(b));
        Ok(roots)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.re
            .total_cmp(&other.re)
            .then_with(|| self.im.total_cmp(&other.im))
    }

    fn display_parts(&self) -> (bool, String) {
        if self.re < 0.0 || (self.re == 0.0 && self.im < 0.0) {
            (true, Coeff::neg(self).to_string())
        } else {
            (false, self.to_string())
        }
    }

    fn is_exact() -> bool {
        false
    }
}

impl fmt::Display for ComplexF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else if self.im < 0.0 {
            write!(f, "{}-{}*i", self.re, -self.im)
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}
