//! Sparse multivariate Laurent polynomials over a pluggable coefficient
//! domain, plus polynomial systems with text and JSON input/output.
//!
//! Exponents are signed, so monomial changes of coordinates `x = y^M` with
//! inverse powers stay inside the representation. Printing uses graded
//! lexicographic term order, which makes the text form canonical: printing
//! and re-parsing a system reproduces it exactly.

mod parse;

pub use parse::{parse_coefficient, parse_system};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::linalg::UnimodularTransform;

/// Exponent vector of one Laurent monomial; entries may be negative.
pub type Exponent = Vec<i64>;

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPolynomial<C: Coeff> {
    nvars: usize,
    terms: BTreeMap<Exponent, C>,
}

impl<C: Coeff> LaurentPolynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        LaurentPolynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn monomial(nvars: usize, exp: Exponent, c: C) -> Self {
        assert_eq!(exp.len(), nvars, "exponent length must match nvars");
        let mut p = Self::zero(nvars);
        p.add_term(exp, c);
        p
    }

    /// The polynomial `x_j`.
    pub fn variable(nvars: usize, j: usize) -> Self {
        assert!(j < nvars);
        let mut exp = vec![0; nvars];
        exp[j] = 1;
        Self::monomial(nvars, exp, C::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &[i64]) -> Option<&C> {
        self.terms.get(exp)
    }

    /// Adds `c * x^exp`, combining like terms and dropping zeros.
    pub fn add_term(&mut self, exp: Exponent, c: C) {
        assert_eq!(exp.len(), self.nvars, "exponent length must match nvars");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exp, ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.mul(c));
        }
        out
    }

    /// Integer power. Monomials (and constants) may take negative powers;
    /// anything longer requires `k >= 0`.
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k == 0 {
            return Ok(Self::one(self.nvars));
        }
        if self.terms.len() == 1 {
            let (exp, c) = self.terms.iter().next().unwrap();
            let exp: Exponent = exp
                .iter()
                .map(|e| {
                    e.checked_mul(k)
                        .ok_or_else(|| Error::Invalid("exponent overflow".into()))
                })
                .collect::<Result<_>>()?;
            return Ok(Self::monomial(self.nvars, exp, c.pow(k)?));
        }
        if k < 0 {
            return Err(Error::Invalid(
                "negative power of a polynomial with several terms".into(),
            ));
        }
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// The set of exponents with nonzero coefficient, lexicographically
    /// sorted.
    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    pub fn evaluate(&self, point: &[C]) -> Result<C> {
        if point.len() != self.nvars {
            return Err(Error::Shape(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.nvars
            )));
        }
        let mut acc = C::zero();
        for (exp, c) in &self.terms {
            let mut t = c.clone();
            for (j, &e) in exp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if e < 0 && point[j].is_zero() {
                    return Err(Error::ZeroToNegativePower);
                }
                t = t.mul(&point[j].pow(e)?);
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Applies the coordinate change `x = y^M`: each monomial `x^a` becomes
    /// `y^b` with `b_k = <row_k of M, a> / denom_k`. Coefficients are kept.
    /// Fails if some new exponent is fractional; the caller must then move
    /// the fractional part into series exponents instead.
    pub fn substitute_monomial_transform(&self, m: &UnimodularTransform) -> Result<Self> {
        if m.n() != self.nvars {
            return Err(Error::Shape(format!(
                "transform is {}-dimensional, polynomial has {} variables",
                m.n(),
                self.nvars
            )));
        }
        let mut out = Self::zero(self.nvars);
        for (exp, c) in &self.terms {
            let a: Vec<BigInt> = exp.iter().map(|&e| BigInt::from(e)).collect();
            let b = m.transformed_exponent_int(&a)?;
            let b: Exponent = b
                .iter()
                .map(|v| {
                    v.to_i64().ok_or_else(|| {
                        Error::Invalid("exponent overflow in monomial transform".into())
                    })
                })
                .collect::<Result<_>>()?;
            out.add_term(b, c.clone());
        }
        Ok(out)
    }

    /// Terms in graded lexicographic order, highest first; the canonical
    /// order for printing and serialization.
    pub fn sorted_terms(&self) -> Vec<(&Exponent, &C)> {
        let mut v: Vec<(&Exponent, &C)> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: i64 = a.iter().sum();
            let db: i64 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }

    pub fn to_text(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.nvars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (exp, c)) in self.sorted_terms().into_iter().enumerate() {
            let (negated, body) = c.display_parts();
            if i == 0 {
                if negated {
                    out.push('-');
                }
            } else {
                out.push_str(if negated { " - " } else { " + " });
            }
            out.push_str(&term_text(exp, &body, negated, names));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| json!({ "exp": e, "coef": c.to_string() }))
            .collect();
        json!({ "terms": terms })
    }
}

/// One printed term: coefficient body times monomial. The coefficient is
/// parenthesized when it is itself a sum, and also when a bare sum would sit
/// under a minus sign (negation does not distribute over the rendering).
fn term_text(exp: &[i64], body: &str, negated: bool, names: &[String]) -> String {
    let mono = monomial_text(exp, names);
    if mono.is_empty() {
        if negated && body_is_sum(body) {
            return format!("({})", body);
        }
        return body.to_string();
    }
    if body == "1" {
        return mono;
    }
    if body_is_sum(body) {
        format!("({})*{}", body, mono)
    } else {
        format!("{}*{}", body, mono)
    }
}

fn monomial_text(exp: &[i64], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (j, &e) in exp.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[j].clone()),
            _ => parts.push(format!("{}^{}", names[j], e)),
        }
    }
    parts.join("*")
}

/// True when a coefficient rendering contains a top-level `+` or `-` and so
/// needs parentheses before being multiplied by a monomial.
fn body_is_sum(body: &str) -> bool {
    body.chars().skip(1).any(|c| c == '+' || c == '-')
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem<C: Coeff> {
    pub nvars: usize,
    pub polys: Vec<LaurentPolynomial<C>>,
    pub var_names: Vec<String>,
}

/// The default variable names `x0..x{n-1}`.
pub fn default_names(nvars: usize) -> Vec<String> {
    (0..nvars).map(|j| format!("x{}", j)).collect()
}

impl<C: Coeff> PolySystem<C> {
    pub fn new(polys: Vec<LaurentPolynomial<C>>) -> Result<Self> {
        let nvars = match polys.first() {
            Some(p) => p.nvars(),
            None => return Err(Error::EmptySystem),
        };
        Self::with_names(polys, default_names(nvars))
    }

    pub fn with_names(polys: Vec<LaurentPolynomial<C>>, var_names: Vec<String>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::EmptySystem);
        }
        let nvars = var_names.len();
        for (i, p) in polys.iter().enumerate() {
            if p.nvars() != nvars {
                return Err(Error::Shape(format!(
                    "polynomial {} has {} variables, expected {}",
                    i,
                    p.nvars(),
                    nvars
                )));
            }
        }
        Ok(PolySystem { nvars, polys, var_names })
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn evaluate(&self, point: &[C]) -> Result<Vec<C>> {
        self.polys.iter().map(|p| p.evaluate(point)).collect()
    }

    /// Applies `x = y^M` to every polynomial; the result is written in the
    /// new variables `y0..y{n-1}`.
    pub fn substitute_monomial_transform(&self, m: &UnimodularTransform) -> Result<Self> {
        let polys = self
            .polys
            .iter()
            .map(|p| p.substitute_monomial_transform(m))
            .collect::<Result<Vec<_>>>()?;
        Self::with_names(polys, (0..self.nvars).map(|j| format!("y{}", j)).collect())
    }

    /// Canonical text form; parseable back into an equal system. A `vars:`
    /// header is emitted whenever the default `x0..` names would not round
    /// trip (custom names, or a trailing variable that never occurs).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let needs_header = self.var_names != default_names(self.nvars)
            || !self
                .polys
                .iter()
                .any(|p| p.terms().any(|(e, _)| e.last().is_some_and(|&v| v != 0)));
        if needs_header && self.nvars > 0 {
            out.push_str(&format!("vars: {};\n", self.var_names.join(",")));
        }
        for p in &self.polys {
            out.push_str(&p.to_text(&self.var_names));
            out.push_str(";\n");
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "nvars": self.nvars,
            "polys": self.polys.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        })
    }
}
