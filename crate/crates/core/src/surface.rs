//! Exact monomial surface representations for the cyclic m²-roots family:
//! the Backelin construction, degree by random-hyperplane intersection
//! reduced to a binomial count, and the coefficient-arrangement orbit.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::linalg::{hermite_normal_form, IntMatrix};
use crate::poly::{LaurentPolynomial, PolySystem};
use crate::puiseux::solve_linear;

/// An exact monomial map: coordinate `j` is `c_j · t^(column j)` over
/// parameters `t_0..t_{d-1}`, with every coefficient nonzero and the
/// exponent rows linearly independent.
#[derive(Clone, Debug)]
pub struct MonomialParametrization<C: Coeff> {
    coefficients: Vec<C>,
    exponents: IntMatrix,
}

impl<C: Coeff> MonomialParametrization<C> {
    pub fn new(coefficients: Vec<C>, exponents: IntMatrix) -> Result<Self> {
        let n = coefficients.len();
        if n == 0 || exponents.ncols() != n {
            return Err(Error::Shape(format!(
                "{} coefficients against {} exponent columns",
                n,
                exponents.ncols()
            )));
        }
        let d = exponents.nrows();
        if d == 0 {
            return Err(Error::Shape("a parametrization needs at least one parameter".into()));
        }
        if coefficients.iter().any(|c| c.is_zero()) {
            return Err(Error::Invalid("monomial parametrizations need nonzero coefficients".into()));
        }
        if exponents.rank() != d {
            return Err(Error::RankDeficient { rank: exponents.rank(), expected: d });
        }
        Ok(MonomialParametrization { coefficients, exponents })
    }

    pub fn n(&self) -> usize {
        self.coefficients.len()
    }

    pub fn dim(&self) -> usize {
        self.exponents.nrows()
    }

    pub fn coefficients(&self) -> &[C] {
        &self.coefficients
    }

    /// Rows are the parameter exponent vectors — the tropisms of the set.
    pub fn exponent_matrix(&self) -> &IntMatrix {
        &self.exponents
    }

    pub fn tropisms(&self) -> Vec<Vec<BigInt>> {
        (0..self.dim()).map(|k| self.exponents.row_vec(k)).collect()
    }

    /// Substitutes concrete nonzero parameter values.
    pub fn evaluate(&self, t: &[C]) -> Result<Vec<C>> {
        let d = self.dim();
        if t.len() != d {
            return Err(Error::Shape(format!("expected {} parameter values, got {}", d, t.len())));
        }
        let mut out = Vec::with_capacity(self.n());
        for j in 0..self.n() {
            let mut x = self.coefficients[j].clone();
            for (k, tk) in t.iter().enumerate() {
                let e = self.exponents[(k, j)]
                    .to_i64()
                    .ok_or_else(|| Error::Invalid("exponent exceeds the i64 range".into()))?;
                if e != 0 {
                    x = x.mul(&tk.pow(e)?);
                }
            }
            out.push(x);
        }
        Ok(out)
    }

    /// True when substituting the parametrization into every equation gives
    /// the identically zero Laurent polynomial in the parameters.
    pub fn satisfies(&self, f: &PolySystem<C>) -> Result<bool> {
        if f.nvars != self.n() {
            return Err(Error::Shape("parametrization does not match the system arity".into()));
        }
        let d = self.dim();
        for p in &f.polys {
            let mut acc = LaurentPolynomial::zero(d);
            for (a, c) in p.terms() {
                let mut exp = vec![0i64; d];
                let mut coef = c.clone();
                for (j, &aj) in a.iter().enumerate() {
                    if aj == 0 {
                        continue;
                    }
                    for (k, ek) in exp.iter_mut().enumerate() {
                        let e = self.exponents[(k, j)]
                            .to_i64()
                            .ok_or_else(|| Error::Invalid("exponent exceeds the i64 range".into()))?;
                        *ek = ek
                            .checked_add(
                                e.checked_mul(aj)
                                    .ok_or_else(|| Error::Invalid("exponent overflow".into()))?,
                            )
                            .ok_or_else(|| Error::Invalid("exponent overflow".into()))?;
                    }
                    coef = coef.mul(&self.coefficients[j].pow(aj)?);
                }
                acc.add_term(exp, coef);
            }
            if !acc.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Canonical representative under monomial parameter changes `t = s^U`
    /// with `U` unimodular: the Hermite basis of the exponent row lattice.
    /// Such changes biject the parameter torus and leave the coefficients
    /// untouched, so two parametrizations related by one describe the same
    /// map up to relabeling.
    pub fn canonical(&self) -> Result<Self> {
        let h = hermite_normal_form(&self.exponents)?;
        let rows: Vec<Vec<BigInt>> = (0..self.dim()).map(|i| h.h.row_vec(i)).collect();
        Ok(MonomialParametrization {
            coefficients: self.coefficients.clone(),
            exponents: IntMatrix::from_rows(rows),
        })
    }

    pub fn to_json(&self) -> Value {
        let coords: Vec<Value> = (0..self.n())
            .map(|j| {
                json!({
                    "exp": (0..self.dim())
                        .map(|k| self.exponents[(k, j)].to_string())
                        .collect::<Vec<_>>(),
                    "coef": self.coefficients[j].to_string(),
                    "second": Value::Null,
                })
            })
            .collect();
        json!({
            "tropisms": self
                .tropisms()
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "coords": coords,
            "exact": true,
        })
    }
}

fn cmp_param<C: Coeff>(a: &MonomialParametrization<C>, b: &MonomialParametrization<C>) -> Ordering {
    for k in 0..a.dim().min(b.dim()) {
        let o = a.exponents.row_vec(k).cmp(&b.exponents.row_vec(k));
        if o != Ordering::Equal {
            return o;
        }
    }
    for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
        let o = x.canonical_cmp(y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.n().cmp(&b.n())
}

fn same_param<C: Coeff>(a: &MonomialParametrization<C>, b: &MonomialParametrization<C>) -> bool {
    a.exponents == b.exponents
        && a.coefficients
            .iter()
            .zip(&b.coefficients)
            .all(|(x, y)| x.canonical_cmp(y) == Ordering::Equal)
}

/// The (m−1)-dimensional set of cyclic m²-roots: block `k` of `m`
/// consecutive coordinates carries the m-th root of unity `u_k` times the
/// staircase monomials `t_0, t_0 t_1, …, t_0 ⋯ t_{m-2}`, closed off by
/// `t_0^{-m+1} t_1^{-m+2} ⋯ t_{m-2}^{-1}` so each block multiplies to one.
pub fn backelin_set<C: Coeff>(m: usize) -> Result<MonomialParametrization<C>> {
    if m < 2 {
        return Err(Error::Invalid(format!("the construction needs a block order of at least 2, got {}", m)));
    }
    let n = m * m;
    let d = m - 1;
    let mut rows = vec![vec![BigInt::zero(); n]; d];
    for (k, row) in rows.iter_mut().enumerate() {
        for b in 0..m {
            for j in k..m - 1 {
                row[b * m + j] = BigInt::from(1);
            }
            row[b * m + m - 1] = BigInt::from(-((m - 1 - k) as i64));
        }
    }
    let coefficients: Vec<C> =
        (0..n).map(|idx| C::root_of_unity(m as u32, (idx / m) as u32)).collect();
    MonomialParametrization::new(coefficients, IntMatrix::from_rows(rows))
}

/// Degree of the set via intersection with `d` random hyperplanes.
///
/// Substituting the monomial map into a hyperplane groups coordinates by
/// shared monomial; dividing by the monomial of the first coordinate leaves
/// a constant plus `d` monomial classes, and row reduction of the (generic)
/// coefficient matrix turns the intersection into a binomial system whose
/// torus-solution count is the absolute determinant of the class-exponent
/// matrix. The determinant does not depend on the draw; the seeded draws
/// only certify genericity, so the result is seed-independent. When the
/// classes are one short of `d + 1`, an affine constant is added to the
/// hyperplanes to play the missing role.
pub fn degree_of_parametrization<C: Coeff>(
    p: &MonomialParametrization<C>,
    seed: u64,
) -> Result<u64> {
    let d = p.dim();
    let n = p.n();
    let mut classes: Vec<Vec<BigInt>> = Vec::new();
    let mut class_of = vec![0usize; n];
    for j in 0..n {
        let col = p.exponent_matrix().col_vec(j);
        match classes.iter().position(|c| *c == col) {
            Some(i) => class_of[j] = i,
            None => {
                class_of[j] = classes.len();
                classes.push(col);
            }
        }
    }
    let zero = vec![BigInt::zero(); d];
    let mut use_affine = false;
    if classes.len() == d && !classes.contains(&zero) {
        classes.push(zero);
        use_affine = true;
    }
    if classes.len() != d + 1 {
        return Err(Error::Invalid(format!(
            "{} distinct coordinate monomials cannot reduce to a binomial system in {} parameters",
            classes.len(),
            d
        )));
    }
    let base = class_of[0];
    let pivots: Vec<usize> = (0..classes.len()).filter(|&c| c != base).collect();
    let a = IntMatrix::from_rows(
        pivots
            .iter()
            .map(|&c| {
                classes[c]
                    .iter()
                    .zip(&classes[base])
                    .map(|(x, y)| x - y)
                    .collect()
            })
            .collect(),
    );
    let det = a.det()?;
    if det.is_zero() {
        return Err(Error::Invalid(
            "monomial classes are linearly dependent; the hyperplane intersection is not finite".into(),
        ));
    }
    let degree = det
        .abs()
        .to_u64()
        .ok_or_else(|| Error::Invalid("degree exceeds the u64 range".into()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..8 {
        let mut rows: Vec<Vec<C>> = Vec::with_capacity(d);
        let mut rhs: Vec<C> = Vec::with_capacity(d);
        for _ in 0..d {
            let mut g = vec![C::zero(); classes.len()];
            for j in 0..n {
                let h: i64 = rng.gen_range(-1_000_000..=1_000_000);
                if h != 0 {
                    let term = C::from_int(h).mul(&p.coefficients()[j]);
                    g[class_of[j]] = g[class_of[j]].add(&term);
                }
            }
            let hc: i64 = rng.gen_range(-1_000_000..=1_000_000);
            if use_affine {
                let last = classes.len() - 1;
                g[last] = g[last].add(&C::from_int(hc));
            }
            rows.push(pivots.iter().map(|&c| g[c].clone()).collect());
            rhs.push(g[base].neg());
        }
        if let Some(y) = solve_linear(rows, rhs, d) {
            if y.iter().all(|v| !v.is_zero()) {
                return Ok(degree);
            }
        }
    }
    Err(Error::DegenerateDraw(8))
}

/// The coefficient-arrangement orbit: the root-of-unity pattern is shifted
/// forward block by block, and likewise after reversing the coordinate
/// order, giving up to `2m` arrangements. Results are canonicalized and
/// deduplicated, so arrangements that coincide as parametrizations (up to a
/// unimodular parameter relabeling) are reported once.
pub fn orbit_expansion<C: Coeff>(
    p: &MonomialParametrization<C>,
    m: usize,
) -> Result<Vec<MonomialParametrization<C>>> {
    if m == 0 {
        return Err(Error::Invalid("block order must be positive".into()));
    }
    let n = p.n();
    if n != m * m {
        return Err(Error::Shape(format!(
            "expected {} coordinates for block order {}, got {}",
            m * m,
            m,
            n
        )));
    }
    let d = p.dim();
    let mut out: Vec<MonomialParametrization<C>> = Vec::new();
    for &e in &[1i64, -1] {
        for s in 0..m {
            let map = |j: usize| -> usize {
                let shifted = e * j as i64 + (s * m) as i64;
                shifted.rem_euclid(n as i64) as usize
            };
            let coefficients: Vec<C> =
                (0..n).map(|j| p.coefficients()[map(j)].clone()).collect();
            let rows: Vec<Vec<BigInt>> = (0..d)
                .map(|k| (0..n).map(|j| p.exponent_matrix()[(k, map(j))].clone()).collect())
                .collect();
            let q = MonomialParametrization::new(coefficients, IntMatrix::from_rows(rows))?;
            out.push(q.canonical()?);
        }
    }
    out.sort_by(cmp_param);
    out.dedup_by(|a, b| same_param(a, b));
    Ok(out)
}
