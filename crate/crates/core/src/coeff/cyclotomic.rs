//! Exact arithmetic in cyclotomic fields.
//!
//! An element carries the order `m` of the root of unity it is written in
//! and its coordinates on the power basis of `Q[x]/Phi_m(x)`, where `Phi_m`
//! is the m-th cyclotomic polynomial. Every element is kept in its minimal
//! field: after each operation the order is lowered as far as membership in
//! the subfield allows, so equal values always have identical (order,
//! coordinates) representations. Rationals are exactly the order-1 elements.

use super::{rational_str, Coeff};
use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<BigRational>,
}

fn prime_factors(mut m: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

fn euler_phi(m: u32) -> usize {
    let mut phi = m;
    for p in prime_factors(m) {
        phi = phi / p * (p - 1);
    }
    phi as usize
}

/// Exact quotient of integer polynomials (coefficients ascending, divisor
/// monic). Panics if the division leaves a remainder; callers only divide
/// x^m - 1 by known cyclotomic factors.
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    let mut quo = vec![BigInt::zero(); rem.len() - dd];
    for k in (dd..rem.len()).rev() {
        let c = std::mem::replace(&mut rem[k], BigInt::zero());
        if c.is_zero() {
            continue;
        }
        quo[k - dd] = c.clone();
        for (j, dj) in den.iter().enumerate().take(dd) {
            rem[k - dd + j] -= &c * dj;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quo
}

/// m-th cyclotomic polynomial, coefficients ascending, cached globally.
fn cyclotomic_poly(m: u32) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    let mut poly: Vec<BigInt> = vec![BigInt::zero(); m as usize + 1];
    poly[0] = -BigInt::one();
    poly[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            let factor = cyclotomic_poly(d);
            poly = int_poly_div_exact(&poly, &factor);
        }
    }
    let arc = Arc::new(poly);
    cache.lock().unwrap().insert(m, arc.clone());
    arc
}

/// Remainder of `a` (ascending) modulo the monic integer polynomial `phi`,
/// padded with zeros to degree(phi) coefficients.
fn reduce_mod(a: &mut Vec<BigRational>, phi: &[BigInt]) {
    let deg = phi.len() - 1;
    for k in (deg..a.len()).rev() {
        let c = std::mem::replace(&mut a[k], BigRational::zero());
        if c.is_zero() {
            continue;
        }
        for (j, pj) in phi.iter().enumerate().take(deg) {
            let delta = &c * BigRational::from_integer(pj.clone());
            a[k - deg + j] -= delta;
        }
    }
    a.truncate(deg);
    a.resize(deg, BigRational::zero());
}

/// Linear solver for membership of an order-`big` element in the subfield of
/// order `small`: coordinates of the embedding are precomputed and row
/// reduced once, then each query is a matrix-vector product.
struct Downgrade {
    t: RatMatrix,
    small_dim: usize,
}

impl Downgrade {
    fn build(big: u32, small: u32) -> Downgrade {
        let phi_big = cyclotomic_poly(big);
        let nb = euler_phi(big);
        let ns = euler_phi(small);
        let step = (big / small) as usize;
        // Augmented [E | I] where column j of E is zeta_big^(j*step).
        let mut aug = RatMatrix::zero(nb, ns + nb);
        for j in 0..ns {
            let mut col = vec![BigRational::zero(); j * step + 1];
            col[j * step] = BigRational::one();
            reduce_mod(&mut col, &phi_big);
            for i in 0..nb {
                aug[(i, j)] = col[i].clone();
            }
        }
        for i in 0..nb {
            aug[(i, ns + i)] = BigRational::one();
        }
        let pivots = aug.rref();
        // The embedding has full column rank, so pivots fill columns 0..ns.
        assert!(pivots.len() >= ns && pivots.iter().take(ns).enumerate().all(|(i, &p)| p == i));
        let mut t = RatMatrix::zero(nb, nb);
        for i in 0..nb {
            for j in 0..nb {
                t[(i, j)] = aug[(i, ns + j)].clone();
            }
        }
        Downgrade { t, small_dim: ns }
    }

    fn solve(&self, v: &[BigRational]) -> Option<Vec<BigRational>> {
        let n = v.len();
        let mut w = vec![BigRational::zero(); n];
        for i in 0..n {
            let mut s = BigRational::zero();
            for j in 0..n {
                if !v[j].is_zero() {
                    s += &self.t[(i, j)] * &v[j];
                }
            }
            w[i] = s;
        }
        if w[self.small_dim..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        w.truncate(self.small_dim);
        Some(w)
    }
}

fn downgrade_solver(big: u32, small: u32) -> Arc<Downgrade> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Downgrade>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(d) = cache.lock().unwrap().get(&(big, small)) {
        return d.clone();
    }
    let built = Arc::new(Downgrade::build(big, small));
    cache.lock().unwrap().insert((big, small), built.clone());
    built
}

impl Cyclotomic {
    fn raw(order: u32, mut coeffs: Vec<BigRational>) -> Cyclotomic {
        assert!(order >= 1);
        reduce_mod(&mut coeffs, &cyclotomic_poly(order));
        let mut v = Cyclotomic { order, coeffs };
        v.normalize();
        v
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The value as a rational, when it is one.
    pub fn rational(&self) -> Option<BigRational> {
        (self.order == 1).then(|| self.coeffs[0].clone())
    }

    /// Lower the order to the minimal subfield containing the value.
    fn normalize(&mut self) {
        loop {
            if self.order == 1 {
                return;
            }
            if self.coeffs[1..].iter().all(|c| c.is_zero()) {
                self.order = 1;
                self.coeffs.truncate(1);
                return;
            }
            let mut lowered = false;
            for p in prime_factors(self.order) {
                let d = self.order / p;
                if let Some(c) = downgrade_solver(self.order, d).solve(&self.coeffs) {
                    self.order = d;
                    self.coeffs = c;
                    lowered = true;
                    break;
                }
            }
            if !lowered {
                return;
            }
        }
    }

    /// Coordinates rewritten in the field of order `target` (a multiple of
    /// the own order).
    fn promote(&self, target: u32) -> Vec<BigRational> {
        if target == self.order {
            return self.coeffs.clone();
        }
        debug_assert_eq!(target % self.order, 0);
        let step = (target / self.order) as usize;
        let mut raw = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            raw[k * step] = c.clone();
        }
        reduce_mod(&mut raw, &cyclotomic_poly(target));
        raw
    }

    /// Decomposition `q * zeta_order^k` when the value is a rational multiple
    /// of a root of unity (always with `0 <= k < order`).
    pub fn as_root_monomial(&self) -> Option<(BigRational, u32)> {
        if let Some(q) = self.rational() {
            return Some((q, 0));
        }
        let phi = cyclotomic_poly(self.order);
        let deg = phi.len() - 1;
        // Walk zeta^k incrementally: multiply by x and reduce.
        let mut power = vec![BigRational::zero(); deg];
        power[0] = BigRational::one();
        for k in 1..self.order {
            power.rotate_right(1);
            let top = std::mem::replace(&mut power[0], BigRational::zero());
            if !top.is_zero() {
                for j in 0..deg {
                    let delta = &top * BigRational::from_integer(phi[j].clone());
                    power[j] -= delta;
                }
            }
            // Proportionality test: self == q * power for a single q.
            let mut ratio: Option<BigRational> = None;
            let mut ok = true;
            for (a, b) in self.coeffs.iter().zip(power.iter()) {
                match (a.is_zero(), b.is_zero()) {
                    (true, true) => {}
                    (false, false) => {
                        let r = a / b;
                        match &ratio {
                            None => ratio = Some(r),
                            Some(prev) if *prev == r => {}
                            _ => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                if let Some(q) = ratio {
                    return Some((q, k));
                }
            }
        }
        None
    }

    fn scale(&self, q: &BigRational) -> Cyclotomic {
        if q.is_zero() {
            return Coeff::zero();
        }
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Image under the automorphism `zeta_m -> zeta_m^j` of the field of
    /// order `m` (a multiple of the own order); `j` must be coprime to `m`.
    pub fn galois_apply(&self, m: u32, j: u32) -> Cyclotomic {
        debug_assert_eq!(m % self.order, 0, "not a member of the order-{m} field");
        debug_assert_eq!(j.gcd(&m), 1, "automorphism index not coprime to order");
        let mut acc: Cyclotomic = Coeff::zero();
        for (k, c) in self.promote(m).iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = ((j as u64 * k as u64) % m as u64) as u32;
            acc = acc.add(&Cyclotomic::root_of_unity(m, e).scale(c));
        }
        acc
    }

    /// Complex conjugation, `zeta -> zeta^(-1)`; independent of the field the
    /// element is viewed in.
    pub fn conjugate(&self) -> Cyclotomic {
        if self.order == 1 {
            return self.clone();
        }
        self.galois_apply(self.order, self.order - 1)
    }

    /// Product of all Galois conjugates over the field of order `m`, which
    /// must be a multiple of the own order. Always rational, and
    /// multiplicative for elements viewed in the same field.
    pub fn galois_norm_from(&self, m: u32) -> Cyclotomic {
        let mut acc: Cyclotomic = Coeff::one();
        for j in 1..=m {
            if j.gcd(&m) == 1 {
                acc = acc.mul(&self.galois_apply(m, j));
            }
        }
        acc
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.coeffs == other.coeffs
    }
}

impl Eq for Cyclotomic {}

/// Exact n-th root of a positive rational, if one exists.
fn rational_nth_root(q: &BigRational, n: u32) -> Option<BigRational> {
    debug_assert!(q.is_positive());
    let rn = q.numer().nth_root(n);
    let rd = q.denom().nth_root(n);
    (num_traits::pow(rn.clone(), n as usize) == *q.numer()
        && num_traits::pow(rd.clone(), n as usize) == *q.denom())
    .then(|| BigRational::new(rn, rd))
}

impl Coeff for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic { order: 1, coeffs: vec![BigRational::zero()] }
    }

    fn one() -> Self {
        Cyclotomic { order: 1, coeffs: vec![BigRational::one()] }
    }

    fn from_rational(q: &BigRational) -> Self {
        Cyclotomic { order: 1, coeffs: vec![q.clone()] }
    }

    fn add(&self, other: &Self) -> Self {
        let target = self.order.lcm(&other.order);
        let mut a = self.promote(target);
        let b = other.promote(target);
        for (x, y) in a.iter_mut().zip(b.iter()) {
            *x += y;
        }
        Cyclotomic::raw(target, a)
    }

    fn mul(&self, other: &Self) -> Self {
        let target = self.order.lcm(&other.order);
        let a = self.promote(target);
        let b = other.promote(target);
        let mut prod = vec![BigRational::zero(); a.len() + b.len()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        Cyclotomic::raw(target, prod)
    }

    fn neg(&self) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.rational() {
            return Ok(Cyclotomic::from_rational(&q.recip()));
        }
        // Extended Euclid of (self, Phi_order) over the rationals; the gcd is
        // a nonzero constant because Phi is irreducible.
        let phi: Vec<BigRational> = cyclotomic_poly(self.order)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let trim = |v: &mut Vec<BigRational>| {
            while v.len() > 1 && v.last().unwrap().is_zero() {
                v.pop();
            }
        };
        let mut r0 = phi;
        let mut r1 = self.coeffs.clone();
        trim(&mut r1);
        // Bezout coefficients with respect to self only.
        let mut s0: Vec<BigRational> = vec![BigRational::zero()];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while r1.len() > 1 || !r1[0].is_zero() {
            // r0 = q * r1 + r; degree(r) < degree(r1)
            let mut rem = r0.clone();
            let mut q = vec![BigRational::zero(); rem.len().saturating_sub(r1.len()) + 1];
            let lead = r1.last().unwrap().clone();
            while rem.len() >= r1.len() && !(rem.len() == 1 && rem[0].is_zero()) {
                let k = rem.len() - 1;
                if rem[k].is_zero() {
                    rem.pop();
                    if rem.is_empty() {
                        rem.push(BigRational::zero());
                    }
                    continue;
                }
                let f = &rem[k] / &lead;
                let shift = k + 1 - r1.len();
                q[shift] = f.clone();
                for (j, c) in r1.iter().enumerate() {
                    let delta = &f * c;
                    rem[shift + j] -= delta;
                }
                trim(&mut rem);
                if rem.len() < r1.len() {
                    break;
                }
            }
            // s_next = s0 - q * s1
            let mut s_next = s0.clone();
            s_next.resize(s_next.len().max(q.len() + s1.len()), BigRational::zero());
            for (i, qi) in q.iter().enumerate() {
                if qi.is_zero() {
                    continue;
                }
                for (j, sj) in s1.iter().enumerate() {
                    let delta = qi * sj;
                    s_next[i + j] -= delta;
                }
            }
            trim(&mut s_next);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s_next;
        }
        // r0 is now the (constant) gcd; s0 * self == r0 modulo Phi.
        debug_assert!(r0.len() == 1 && !r0[0].is_zero());
        let g = r0[0].clone();
        let coeffs = s0.into_iter().map(|c| c / &g).collect();
        Ok(Cyclotomic::raw(self.order, coeffs))
    }

    fn is_zero(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_zero()
    }

    fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }

    fn root_of_unity(order: u32, k: u32) -> Self {
        assert!(order >= 1, "root order must be positive");
        let k = k % order;
        let mut coeffs = vec![BigRational::zero(); k as usize + 1];
        coeffs[k as usize] = BigRational::one();
        Cyclotomic::raw(order, coeffs)
    }

    fn nth_roots(&self, n: u32) -> Result<Vec<Self>> {
        if n == 0 {
            return Err(Error::Invalid("0-th root requested".into()));
        }
        if n == 1 {
            return Ok(vec![self.clone()]);
        }
        if self.is_zero() {
            return Ok(vec![Coeff::zero()]);
        }
        let Some((q, j)) = self.as_root_monomial() else {
            return Err(Error::RootExtraction { degree: n.into(), value: self.to_string() });
        };
        // Fold a negative rational part into the root of unity.
        let (q, e, j) = if q.is_negative() {
            if self.order % 2 == 0 {
                (-q, self.order, (j + self.order / 2) % self.order)
            } else {
                (-q, 2 * self.order, (2 * j + self.order) % (2 * self.order))
            }
        } else {
            (q, self.order, j)
        };
        let r = rational_nth_root(&q, n).ok_or_else(|| Error::RootExtraction {
            degree: n.into(),
            value: self.to_string(),
        })?;
        let big = e
            .checked_mul(n)
            .ok_or_else(|| Error::Invalid("root-of-unity order overflow".into()))?;
        let mut roots: Vec<Cyclotomic> = (0..n)
            .map(|i| Cyclotomic::root_of_unity(big, j + e * i).scale(&r))
            .collect();
        roots.sort_by(|a, b| a.canonical_cmp(b));
        Ok(roots)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.order
            .cmp(&other.order)
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }

    fn is_exact() -> bool {
        true
    }

    fn display_parts(&self) -> (bool, String) {
        // Mirror the branch order of `Display` so the flag is true exactly
        // when the rendering would start with a minus sign.
        let neg = if let Some(q) = self.rational() {
            q.is_negative()
        } else if let Some((q, _)) = self.as_root_monomial() {
            q.is_negative()
        } else {
            self.coeffs
                .iter()
                .rev()
                .find(|c| !c.is_zero())
                .is_some_and(|c| c.is_negative())
        };
        if neg {
            (true, Coeff::neg(self).to_string())
        } else {
            (false, self.to_string())
        }
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.rational() {
            return write!(f, "{}", rational_str(&q));
        }
        if let Some((q, k)) = self.as_root_monomial() {
            let gen = if k == 1 {
                format!("u{}", self.order)
            } else {
                format!("u{}^{}", self.order, k)
            };
            return if q.is_one() {
                write!(f, "{}", gen)
            } else if (-&q).is_one() {
                write!(f, "-{}", gen)
            } else {
                write!(f, "{}*{}", rational_str(&q), gen)
            };
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let body = if k == 0 {
                rational_str(&mag)
            } else {
                let gen = if k == 1 {
                    format!("u{}", self.order)
                } else {
                    format!("u{}^{}", self.order, k)
                };
                if mag.is_one() {
                    gen
                } else {
                    format!("{}*{}", rational_str(&mag), gen)
                }
            };
            write!(f, "{}{}", sign, body)?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn u(order: u32, k: u32) -> Cyclotomic {
        Cyclotomic::root_of_unity(order, k)
    }

    #[test]
    fn cyclotomic_polynomials_match_known_values() {
        let as_i64 = |m: u32| -> Vec<i64> {
            cyclotomic_poly(m).iter().map(|c| i64::try_from(c).unwrap()).collect()
        };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(2), vec![1, 1]);
        assert_eq!(as_i64(3), vec![1, 1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn primitive_cube_root_relations() {
        let w = u(3, 1);
        assert!(w.pow(3).unwrap().is_one());
        let sum = Cyclotomic::one().add(&w).add(&w.mul(&w));
        assert!(sum.is_zero());
        assert_eq!(w.inv().unwrap(), w.mul(&w));
    }

    #[test]
    fn orders_collapse_to_minimal_field() {
        // zeta_6^2 is a primitive cube root; zeta_4^2 is -1.
        assert_eq!(u(6, 2), u(3, 1));
        assert_eq!(u(4, 2), Coeff::from_int(-1));
        assert_eq!(u(6, 3), Coeff::from_int(-1));
        assert_eq!(u(5, 0), Coeff::one());
        // zeta_6 = 1 + zeta_3, so even the generator of order 6 lives in the
        // order-3 field.
        assert_eq!(u(6, 1), Cyclotomic::one().add(&u(3, 1)));
        assert_eq!(u(6, 1).order(), 3);
        assert_eq!(u(12, 1).order(), 12);
    }

    #[test]
    fn inverse_of_dense_element() {
        let v = Cyclotomic::one().add(&u(3, 1)); // 1 + w
        let prod = v.inv().unwrap().mul(&v);
        assert!(prod.is_one());
        let w = u(12, 1).add(&Coeff::from_int(5));
        assert!(w.inv().unwrap().mul(&w).is_one());
    }

    #[test]
    fn cube_roots_of_unity() {
        let roots = Cyclotomic::one().nth_roots(3).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.contains(&Coeff::one()));
        assert!(roots.contains(&u(3, 1)));
        assert!(roots.contains(&u(3, 2)));
        for r in &roots {
            assert!(r.pow(3).unwrap().is_one());
        }
    }

    #[test]
    fn cube_roots_of_negative_eight() {
        let roots = Cyclotomic::from_int(-8).nth_roots(3).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.contains(&Coeff::from_int(-2)));
        for r in &roots {
            assert_eq!(r.pow(3).unwrap(), Coeff::from_int(-8));
        }
    }

    #[test]
    fn square_roots() {
        let roots = Cyclotomic::from_int(4).nth_roots(2).unwrap();
        assert_eq!(roots, vec![Coeff::from_int(-2), Coeff::from_int(2)]);
        // sqrt(2) is not a rational times a root of unity in this model.
        match Cyclotomic::from_int(2).nth_roots(2) {
            Err(Error::RootExtraction { degree: 2, .. }) => {}
            other => panic!("expected a root-extraction error, got {:?}", other),
        }
    }

    #[test]
    fn roots_of_a_root_of_unity() {
        let roots = u(3, 1).nth_roots(3).unwrap();
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert_eq!(r.pow(3).unwrap(), u(3, 1));
        }
        assert!(roots.contains(&u(9, 1)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(u(3, 1).to_string(), "u3");
        assert_eq!(u(3, 2).to_string(), "u3^2");
        assert_eq!(u(3, 2).neg().to_string(), "-u3^2");
        assert_eq!(u(4, 1).to_string(), "u4");
        assert_eq!(Cyclotomic::from_rational(&BigRational::new(1.into(), 2.into()))
            .to_string(), "1/2");
        assert_eq!(Cyclotomic::zero().to_string(), "0");
        let dense = Cyclotomic::one().add(&u(12, 1));
        assert_eq!(dense.to_string(), "u12+1");
    }

    #[test]
    fn conjugate_style_identities() {
        // |1 + w|^2 = (1 + w)(1 + w^2) = 1 for the cube root w.
        let w = u(3, 1);
        let z = Cyclotomic::one().add(&w);
        let zbar = Cyclotomic::one().add(&w.mul(&w));
        assert!(z.mul(&zbar).is_one());
    }

    proptest! {
        #[test]
        fn field_axioms_on_random_elements(
            a0 in -4i64..=4, a1 in -4i64..=4, b0 in -4i64..=4, b1 in -4i64..=4,
            ord in prop_oneof![Just(3u32), Just(4u32), Just(6u32), Just(12u32)],
        ) {
            let w = u(ord, 1);
            let a = Cyclotomic::from_int(a0).add(&w.scale(&BigRational::from_integer(a1.into())));
            let b = Cyclotomic::from_int(b0).add(&w.scale(&BigRational::from_integer(b1.into())));
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.sub(&a), Coeff::zero());
            if !a.is_zero() {
                prop_assert!(a.inv().unwrap().mul(&a).is_one());
            }
            // u^ord == 1 identically.
            prop_assert!(w.pow(ord as i64).unwrap().is_one());
            // Conjugation and the norm from a fixed field respect products.
            prop_assert_eq!(a.mul(&b).conjugate(), a.conjugate().mul(&b.conjugate()));
            prop_assert_eq!(
                a.mul(&b).galois_norm_from(ord),
                a.galois_norm_from(ord).mul(&b.galois_norm_from(ord))
            );
        }
    }

    #[test]
    fn conjugation_and_norm() {
        let w = u(3, 1);
        assert_eq!(w.conjugate(), u(3, 2));
        assert_eq!(w.conjugate().conjugate(), w);
        // N(zeta_5) = zeta_5^(1+2+3+4) = 1; N(1 + zeta_3) = (1+w)(1+w^2) = 1.
        assert!(u(5, 1).galois_norm_from(5).is_one());
        let v = Cyclotomic::one().add(&w);
        assert!(v.galois_norm_from(3).is_one());
        // Rationals pick up the field degree: N from Q(zeta_3) of 2 is 4.
        assert_eq!(Cyclotomic::from_int(2).galois_norm_from(3), Coeff::from_int(4));
        // Norms always land in the rationals.
        let dense = u(12, 1).add(&Coeff::from_int(3));
        assert_eq!(dense.galois_norm_from(12).order(), 1);
    }
}
