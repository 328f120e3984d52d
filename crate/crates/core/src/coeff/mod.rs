//! Coefficient domains for polynomial arithmetic. Two built-ins: exact
//! cyclotomic rationals and double-precision complex numbers.

mod complex;
mod cyclotomic;

pub use complex::ComplexF64;
pub use cyclotomic::Cyclotomic;

use crate::error::Result;
use num_rational::BigRational;
use std::cmp::Ordering;
use std::fmt;

/// A field usable as the coefficient domain of Laurent polynomials. All
/// operations are value-semantic; `canonical_cmp` is a total order used for
/// deterministic sorting and deduplication of solution data.
pub trait Coeff:
    Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn is_zero(&self) -> bool;
    /// `e^(2*pi*i*k/order)` in this domain.
    fn root_of_unity(order: u32, k: u32) -> Self;
    /// All `n`-th roots of `self` representable in the domain.
    fn nth_roots(&self, n: u32) -> Result<Vec<Self>>;
    fn canonical_cmp(&self, other: &Self) -> Ordering;
    /// Whether equality and zero-testing are exact (no tolerance).
    fn is_exact() -> bool;
    /// Numeric modulus, when the domain has one (float domains only);
    /// lets callers apply their own tolerance to residuals.
    fn magnitude(&self) -> Option<f64> {
        None
    }

    fn from_int(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(v.into()))
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn is_one(&self) -> bool {
        self.sub(&Self::one()).is_zero()
    }

    /// Split used when printing this value as one term of a sum: `(true, s)`
    /// means "render subtracted", with `s` the display of the negated value.
    /// Implementations should return `true` exactly when `Display` would
    /// start with a minus sign, so printers can emit `a - b` instead of
    /// `a + -b`.
    fn display_parts(&self) -> (bool, String) {
        (false, self.to_string())
    }

    fn pow(&self, e: i64) -> Result<Self> {
        let (base, mut k) = if e < 0 {
            (self.inv()?, (e as i128).unsigned_abs())
        } else {
            (self.clone(), e as u128)
        };
        let mut acc = Self::one();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }
}

/// Lexicographic order on coordinate vectors under `canonical_cmp`, used to
/// sort and deduplicate solution points deterministically.
pub fn cmp_points<C: Coeff>(a: &[C], b: &[C]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = x.canonical_cmp(y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Renders a rational without a denominator when it is an integer.
pub(crate) fn rational_str(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
