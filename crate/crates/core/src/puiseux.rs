//! Series developments of positive-dimensional solution sets.
//!
//! The pipeline per cone: select tropism generators, change coordinates so
//! the tropisms become the leading parameters, solve the transformed nested
//! initial forms for the leading coefficients, and either certify that the
//! leading term already satisfies the whole system or search for a second
//! term. All-binomial systems short-circuit to the closed-form parametric
//! solver.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::binomial::{solve_binomial, BinomialSystem};
use crate::coeff::{rational_str, Coeff};
use crate::error::{Error, Result};
use crate::linalg::{build_unimodular_transform, hermite_normal_form, make_primitive, IntMatrix, UnimodularTransform};
use crate::poly::{LaurentPolynomial, PolySystem};
use crate::polytope::{initial_form_system, orbit_group, pretropism_cones_with, Cone};
use crate::solver::{solve_initial_form_with, SolverConfig};

/// Linearly independent primitive integer tropisms, one per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropismBasis {
    rows: Vec<Vec<BigInt>>,
}

impl TropismBasis {
    /// Validates independence and normalizes every row to its primitive
    /// representative (dividing by the gcd keeps the direction).
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Shape("need at least one tropism".into()));
        }
        let n = rows[0].len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("tropism rows must share a positive length".into()));
        }
        if rows.iter().any(|r| r.iter().all(Zero::is_zero)) {
            return Err(Error::Invalid("zero vector is not a tropism".into()));
        }
        let mut rows = rows;
        for r in rows.iter_mut() {
            make_primitive(r);
        }
        let m = IntMatrix::from_rows(rows.clone());
        let rank = m.rank();
        if rank != rows.len() {
            return Err(Error::RankDeficient { rank, expected: rows.len() });
        }
        Ok(TropismBasis { rows })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        TropismBasis::new(
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        )
    }

    /// Number of tropisms (future series parameters).
    pub fn d(&self) -> usize {
        self.rows.len()
    }

    /// Ambient coordinate count.
    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn as_i64(&self) -> Result<Vec<Vec<i64>>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        x.to_i64().ok_or_else(|| {
                            Error::Invalid(format!("tropism entry {} exceeds the i64 range", x))
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Sum of the rows; the weight that separates the nested initial forms
    /// from every other monomial when the basis lies inside one cone.
    pub fn row_sum(&self) -> Vec<BigInt> {
        let mut s = vec![BigInt::zero(); self.n()];
        for r in &self.rows {
            for (si, x) in s.iter_mut().zip(r) {
                *si += x;
            }
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!(self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>())
    }

    fn label(&self) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let xs: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("({})", xs.join(","))
            })
            .collect();
        rows.join(" ")
    }
}

/// One term beyond the leading one: an exponent increment over the
/// parameters and the series coefficient it carries.
#[derive(Clone, Debug)]
pub struct SeriesTerm<C: Coeff> {
    pub exponent: Vec<BigRational>,
    pub coefficient: C,
}

/// Per-coordinate series data: leading parameter exponents, leading
/// coefficient, and optionally the second-order terms.
#[derive(Clone, Debug)]
pub struct SeriesCoordinate<C: Coeff> {
    pub exponent: Vec<BigRational>,
    pub coefficient: C,
    pub second: Option<Vec<SeriesTerm<C>>>,
}

/// A series development `x_j = c_j t^{e_j} + ...` over parameters
/// `t_0..t_{d-1}` whose leading exponents are the tropisms.
#[derive(Clone, Debug)]
pub struct PuiseuxDevelopment<C: Coeff> {
    pub tropisms: TropismBasis,
    pub coordinates: Vec<SeriesCoordinate<C>>,
    /// Whether the leading term alone satisfies the full system.
    pub exact: bool,
    pub transform: UnimodularTransform,
    /// Values of the trailing transformed coordinates behind the leading
    /// coefficients.
    pub point: Vec<C>,
}

impl<C: Coeff> PuiseuxDevelopment<C> {
    pub fn d(&self) -> usize {
        self.tropisms.d()
    }

    pub fn n(&self) -> usize {
        self.coordinates.len()
    }

    pub fn to_json(&self) -> Value {
        let coords: Vec<Value> = self
            .coordinates
            .iter()
            .map(|c| {
                let second = c.second.as_ref().map(|terms| {
                    json!({
                        "terms": terms
                            .iter()
                            .map(|t| {
                                json!({
                                    "exp": t.exponent.iter().map(rational_str).collect::<Vec<_>>(),
                                    "coef": t.coefficient.to_string(),
                                })
                            })
                            .collect::<Vec<_>>()
                    })
                });
                json!({
                    "exp": c.exponent.iter().map(rational_str).collect::<Vec<_>>(),
                    "coef": c.coefficient.to_string(),
                    "second": second,
                })
            })
            .collect();
        json!({
            "tropisms": self.tropisms.to_json(),
            "coords": coords,
            "exact": self.exact,
        })
    }
}

/// Developments found plus the reasons any cone or solution was passed over.
#[derive(Clone, Debug)]
pub struct DevelopReport<C: Coeff> {
    pub developments: Vec<PuiseuxDevelopment<C>>,
    pub diagnostics: Vec<String>,
}

impl<C: Coeff> DevelopReport<C> {
    pub fn to_json(&self) -> Value {
        json!({
            "developments": self.developments.iter().map(|d| d.to_json()).collect::<Vec<_>>(),
            "diagnostics": self.diagnostics,
        })
    }
}

fn cmp_rat_vec(a: &[BigRational], b: &[BigRational]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.cmp(y)).find(|o| *o != Ordering::Equal).unwrap_or(a.len().cmp(&b.len()))
}

fn cmp_dev<C: Coeff>(a: &PuiseuxDevelopment<C>, b: &PuiseuxDevelopment<C>) -> Ordering {
    a.tropisms
        .rows()
        .cmp(b.tropisms.rows())
        .then_with(|| {
            for (ca, cb) in a.coordinates.iter().zip(&b.coordinates) {
                let o = cmp_rat_vec(&ca.exponent, &cb.exponent)
                    .then_with(|| ca.coefficient.canonical_cmp(&cb.coefficient));
                if o != Ordering::Equal {
                    return o;
                }
            }
            a.coordinates.len().cmp(&b.coordinates.len())
        })
        .then(a.exact.cmp(&b.exact).reverse())
}

fn same_dev<C: Coeff>(a: &PuiseuxDevelopment<C>, b: &PuiseuxDevelopment<C>) -> bool {
    if cmp_dev(a, b) != Ordering::Equal {
        return false;
    }
    a.coordinates.iter().zip(&b.coordinates).all(|(ca, cb)| match (&ca.second, &cb.second) {
        (None, None) => true,
        (Some(x), Some(y)) => {
            x.len() == y.len()
                && x.iter().zip(y).all(|(s, t)| {
                    s.exponent == t.exponent
                        && s.coefficient.canonical_cmp(&t.coefficient) == Ordering::Equal
                })
        }
        _ => false,
    })
}

/// Picks `d` generators out of a cone and canonicalizes them.
///
/// Candidates are the extreme rays followed by the lineality rows and their
/// negatives, in the cone's canonical order. The first index combination
/// that is linearly independent — and, in positive-first mode, contains a
/// vector with strictly positive first coordinate — wins; it is then
/// replaced by the Hermite basis of the lattice it spans, each row made
/// primitive, so that equivalent choices map to one deterministic basis
/// with the triangular leading structure the series display expects.
pub fn select_generators(cone: &Cone, d: usize, positive_first: bool) -> Result<TropismBasis> {
    if d == 0 {
        return Err(Error::Shape("need at least one generator".into()));
    }
    if d > cone.dim {
        return Err(Error::Shape(format!(
            "cone has dimension {}, cannot select {} independent generators",
            cone.dim, d
        )));
    }
    let mut cands: Vec<Vec<BigInt>> = cone.rays.clone();
    cands.extend(cone.lineality.iter().cloned());
    cands.extend(cone.lineality.iter().map(|l| l.iter().map(|x| -x.clone()).collect()));
    let m = cands.len();

    let mut combo: Vec<usize> = (0..d).collect();
    if d > m {
        return Err(Error::Invalid("not enough generators in the cone".into()));
    }
    loop {
        let rows: Vec<Vec<BigInt>> = combo.iter().map(|&i| cands[i].clone()).collect();
        let admissible = !positive_first || rows.iter().any(|r| r[0].is_positive());
        if admissible && IntMatrix::from_rows(rows.clone()).rank() == d {
            let h = hermite_normal_form(&IntMatrix::from_rows(rows))?;
            let mut out = Vec::with_capacity(d);
            for i in 0..d {
                let mut r = h.h.row_vec(i);
                make_primitive(&mut r);
                out.push(r);
            }
            return TropismBasis::new(out);
        }
        // Advance the combination in lexicographic order.
        let mut i = d;
        loop {
            if i == 0 {
                return Err(Error::Invalid(
                    "no admissible generator selection in this cone".into(),
                ));
            }
            i -= 1;
            if combo[i] + (d - i) <= m {
                combo[i] += 1;
                for j in i + 1..d {
                    combo[j] = combo[j - 1] + 1;
                }
                if combo[d - 1] < m {
                    break;
                }
            }
        }
    }
}

fn rat_to_i64(q: &BigRational) -> Result<i64> {
    if !q.is_integer() {
        return Err(Error::FractionalExponent(format!(
            "exponent {} is not integral in the trailing coordinates",
            q
        )));
    }
    q.to_integer()
        .to_i64()
        .ok_or_else(|| Error::Invalid("transformed exponent exceeds the i64 range".into()))
}

/// Rewrites a nested initial-form system in the trailing transformed
/// coordinates. Within each equation the parameter part of every exponent is
/// the same (the nested forms tie on each tropism), so dropping it keeps the
/// zero set in the torus unchanged.
fn transform_trailing<C: Coeff>(
    nested: &PolySystem<C>,
    t: &UnimodularTransform,
) -> Result<PolySystem<C>> {
    let d = t.dim();
    let n = t.n();
    let mut polys = Vec::with_capacity(nested.polys.len());
    for p in &nested.polys {
        let mut q = LaurentPolynomial::zero(n - d);
        let mut param_part: Option<Vec<BigRational>> = None;
        for (e, c) in p.terms() {
            let a: Vec<BigInt> = e.iter().map(|&x| BigInt::from(x)).collect();
            let te = t.transformed_exponent(&a);
            let head = te[..d].to_vec();
            match &param_part {
                None => param_part = Some(head),
                Some(h) => {
                    debug_assert_eq!(*h, head, "nested initial form does not tie on a tropism");
                }
            }
            let tail: Vec<i64> = te[d..].iter().map(rat_to_i64).collect::<Result<_>>()?;
            q.add_term(tail, c.clone());
        }
        polys.push(q);
    }
    PolySystem::with_names(polys, (d..n).map(|j| format!("z{}", j)).collect())
}

fn assemble<C: Coeff>(
    basis: &TropismBasis,
    transform: &UnimodularTransform,
    point: &[C],
) -> Result<PuiseuxDevelopment<C>> {
    let n = transform.n();
    let d = transform.dim();
    let numer = transform.row_matrix();
    let dens = transform.denominators();
    let mut coords = Vec::with_capacity(n);
    for j in 0..n {
        let exponent: Vec<BigRational> = (0..d)
            .map(|k| BigRational::new(numer[(k, j)].clone(), dens[k].clone()))
            .collect();
        let mut coefficient = C::one();
        for k in d..n {
            let e = numer[(k, j)]
                .to_i64()
                .ok_or_else(|| Error::Invalid("completion exponent exceeds the i64 range".into()))?;
            if e != 0 {
                coefficient = coefficient.mul(&point[k - d].pow(e)?);
            }
        }
        if coefficient.is_zero() {
            return Err(Error::Invalid("leading coefficient vanished".into()));
        }
        coords.push(SeriesCoordinate { exponent, coefficient, second: None });
    }
    Ok(PuiseuxDevelopment {
        tropisms: basis.clone(),
        coordinates: coords,
        exact: false,
        transform: transform.clone(),
        point: point.to_vec(),
    })
}

/// Exact Laurent polynomial in the series parameters, used to check what a
/// substituted development leaves behind.
#[derive(Clone, Debug)]
pub(crate) struct ParamPoly<C: Coeff> {
    pub terms: BTreeMap<Vec<BigRational>, C>,
}

impl<C: Coeff> ParamPoly<C> {
    pub fn zero() -> Self {
        ParamPoly { terms: BTreeMap::new() }
    }

    #[cfg(test)]
    pub fn constant(d: usize, c: C) -> Self {
        let mut p = ParamPoly::zero();
        p.add_term(vec![BigRational::zero(); d], c);
        p
    }

    pub fn add_term(&mut self, exp: Vec<BigRational>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    #[cfg(test)]
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = ParamPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<BigRational> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(exp, ca.mul(cb));
            }
        }
        out
    }

    #[cfg(test)]
    pub fn pow(&self, d: usize, k: i64) -> Result<Self> {
        if k < 0 {
            if self.terms.len() == 1 {
                let (e, c) = self.terms.iter().next().unwrap();
                let mut out = ParamPoly::zero();
                let ke = BigRational::from(BigInt::from(k));
                out.add_term(e.iter().map(|x| x * &ke).collect(), c.pow(k)?);
                return Ok(out);
            }
            return Err(Error::Invalid(
                "negative power of a multi-term series tail is not supported".into(),
            ));
        }
        let mut acc = ParamPoly::constant(d, C::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        Ok(acc)
    }
}

fn substitute_leading<C: Coeff>(
    p: &LaurentPolynomial<C>,
    dev: &PuiseuxDevelopment<C>,
) -> Result<ParamPoly<C>> {
    let d = dev.d();
    let mut out = ParamPoly::zero();
    for (a, c) in p.terms() {
        let mut exp = vec![BigRational::zero(); d];
        let mut coef = c.clone();
        for (j, &aj) in a.iter().enumerate() {
            if aj == 0 {
                continue;
            }
            let co = &dev.coordinates[j];
            let f = BigRational::from(BigInt::from(aj));
            for (ei, ci) in exp.iter_mut().zip(&co.exponent) {
                *ei += ci * &f;
            }
            coef = coef.mul(&co.coefficient.pow(aj)?);
        }
        out.add_term(exp, coef);
    }
    Ok(out)
}

/// True when substituting the leading-term parametrization into every
/// equation yields the identically zero Laurent polynomial in the
/// parameters.
pub fn leading_term_exact<C: Coeff>(
    f: &PolySystem<C>,
    dev: &PuiseuxDevelopment<C>,
) -> Result<bool> {
    if f.nvars != dev.n() {
        return Err(Error::Shape("development does not match the system arity".into()));
    }
    for p in &f.polys {
        if !substitute_leading(p, dev)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact strict-minimality check: under the row-sum weight of the basis,
/// every monomial of each nested initial form sits strictly below every
/// monomial of its equation outside the form.
pub fn minimality_certificate<C: Coeff>(f: &PolySystem<C>, basis: &TropismBasis) -> Result<bool> {
    let vs = basis.as_i64()?;
    let nested = initial_form_system(f, &vs)?;
    let vsum: Vec<i64> = {
        let mut s = vec![0i64; basis.n()];
        for r in &vs {
            for (si, x) in s.iter_mut().zip(r) {
                *si = si.checked_add(*x).ok_or_else(|| {
                    Error::Invalid("row-sum weight overflows the i64 range".into())
                })?;
            }
        }
        s
    };
    let weight = |a: &[i64]| -> i128 {
        a.iter().zip(&vsum).map(|(&x, &w)| x as i128 * w as i128).sum()
    };
    for (p, q) in f.polys.iter().zip(&nested.polys) {
        let inner: BTreeSet<Vec<i64>> = q.support().into_iter().collect();
        let hi = inner.iter().map(|a| weight(a)).max();
        let lo = p
            .support()
            .into_iter()
            .filter(|a| !inner.contains(a))
            .map(|a| weight(&a))
            .min();
        if let (Some(hi), Some(lo)) = (hi, lo) {
            if hi >= lo {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Second term

struct RawTerm<C: Coeff> {
    /// Integer parameter exponent of the substituted monomial.
    exp: Vec<BigInt>,
    /// Sum of the exponent entries; the scan runs level by level.
    level: BigInt,
    /// Coefficient after substituting the leading term.
    coef: C,
    /// Original exponents of the trailing coordinates, which scale the
    /// linearized correction.
    trail: Vec<i64>,
}

struct EquationData<C: Coeff> {
    raw: Vec<RawTerm<C>>,
    level0: BigInt,
    /// Merged residual of the leading substitution, keyed by exponent.
    residual: BTreeMap<Vec<BigInt>, C>,
}

fn equation_data<C: Coeff>(
    p: &LaurentPolynomial<C>,
    dev: &PuiseuxDevelopment<C>,
) -> Result<EquationData<C>> {
    let d = dev.d();
    let n = dev.n();
    let mut raw = Vec::new();
    for (a, c) in p.terms() {
        let mut exp = vec![BigRational::zero(); d];
        let mut coef = c.clone();
        for (j, &aj) in a.iter().enumerate() {
            if aj == 0 {
                continue;
            }
            let co = &dev.coordinates[j];
            let f = BigRational::from(BigInt::from(aj));
            for (ei, ci) in exp.iter_mut().zip(&co.exponent) {
                *ei += ci * &f;
            }
            coef = coef.mul(&co.coefficient.pow(aj)?);
        }
        let exp: Vec<BigInt> = exp
            .iter()
            .map(|q| {
                if q.is_integer() {
                    Ok(q.to_integer())
                } else {
                    Err(Error::FractionalExponent(
                        "second-term search needs integer leading exponents".into(),
                    ))
                }
            })
            .collect::<Result<_>>()?;
        let level: BigInt = exp.iter().sum();
        raw.push(RawTerm { exp, level, coef, trail: a[d..n].to_vec() });
    }
    let level0 = raw.iter().map(|t| t.level.clone()).min().ok_or(Error::EmptySystem)?;
    let mut residual: BTreeMap<Vec<BigInt>, C> = BTreeMap::new();
    for t in &raw {
        match residual.entry(t.exp.clone()) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(t.coef.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&t.coef);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }
    Ok(EquationData { raw, level0, residual })
}

/// Dense Gaussian elimination over the coefficient field; free unknowns are
/// set to zero. `None` when the system is inconsistent.
pub(crate) fn solve_linear<C: Coeff>(mut rows: Vec<Vec<C>>, mut rhs: Vec<C>, ncols: usize) -> Option<Vec<C>> {
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = rows[r][c].inv().ok()?;
        for j in c..ncols {
            rows[r][j] = rows[r][j].mul(&inv);
        }
        rhs[r] = rhs[r].mul(&inv);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..ncols {
                    let delta = rows[r][j].mul(&f);
                    rows[i][j] = rows[i][j].sub(&delta);
                }
                let delta = rhs[r].mul(&f);
                rhs[i] = rhs[i].sub(&delta);
            }
        }
        pivot_row_of_col[c] = Some(r);
        r += 1;
    }
    for i in r..rows.len() {
        if !rhs[i].is_zero() {
            return None;
        }
    }
    let mut x = vec![C::zero(); ncols];
    for c in 0..ncols {
        if let Some(p) = pivot_row_of_col[c] {
            x[c] = rhs[p].clone();
        }
    }
    Some(x)
}

/// Deterministic generic constants for the curve restriction `t_i = g_i t_0`.
pub fn curve_restriction_constants(cfg: &SolverConfig, d: usize) -> Vec<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x5eed_cafe));
    (1..d)
        .map(|_| {
            let num: i64 = rng.gen_range(2..=17);
            let den: i64 = rng.gen_range(2..=13);
            BigRational::new(BigInt::from(num), BigInt::from(den))
        })
        .collect()
}

/// Attempts the curve-restricted correction `x_k <- x_k (1 + d_k t_0^w)`
/// along `t_i = g_i t_0`; returns the per-trailing-coordinate coefficients.
fn try_restricted<C: Coeff>(
    eqs: &[EquationData<C>],
    gammas: &[BigRational],
    w: &BigInt,
    ntrail: usize,
) -> Result<Option<Vec<C>>> {
    let gpow = |e: &[BigInt]| -> Result<C> {
        let mut acc = C::one();
        for (i, g) in gammas.iter().enumerate() {
            let ei = &e[i + 1];
            let k = ei
                .to_i64()
                .ok_or_else(|| Error::Invalid("exponent exceeds the i64 range".into()))?;
            if k != 0 {
                acc = acc.mul(&C::from_rational(g).pow(k)?);
            }
        }
        Ok(acc)
    };
    let mut rows: Vec<Vec<C>> = Vec::new();
    let mut rhs: Vec<C> = Vec::new();
    for eq in eqs {
        let target = &eq.level0 + w;
        // Base terms the correction cannot reach make this increment
        // infeasible.
        for (e, _) in &eq.residual {
            let lvl: BigInt = e.iter().sum();
            if lvl > eq.level0 && lvl < target {
                return Ok(None);
            }
        }
        let mut row = vec![C::zero(); ntrail];
        let mut any = false;
        for t in &eq.raw {
            if t.level != eq.level0 {
                continue;
            }
            let base = t.coef.mul(&gpow(&t.exp)?);
            for (k, &ak) in t.trail.iter().enumerate() {
                if ak != 0 {
                    row[k] = row[k].add(&base.mul(&C::from_int(ak)));
                    any = true;
                }
            }
        }
        let mut b = C::zero();
        for (e, c) in &eq.residual {
            let lvl: BigInt = e.iter().sum();
            if lvl == target {
                b = b.add(&c.mul(&gpow(e)?));
                any = true;
            }
        }
        if any {
            rows.push(row);
            rhs.push(b.neg());
        }
    }
    Ok(solve_linear(rows, rhs, ntrail))
}

/// Attempts the full multivariate correction at increment `w`; returns the
/// coefficients `d[k][i]` for trailing coordinate `k` and parameter `i`,
/// flattened as `k * d + i`.
fn try_full<C: Coeff>(
    eqs: &[EquationData<C>],
    w: &BigInt,
    d: usize,
    ntrail: usize,
) -> Option<Vec<C>> {
    let ncols = ntrail * d;
    let mut rows: Vec<Vec<C>> = Vec::new();
    let mut rhs: Vec<C> = Vec::new();
    for eq in eqs {
        let target = &eq.level0 + w;
        for (e, _) in &eq.residual {
            let lvl: BigInt = e.iter().sum();
            if lvl > eq.level0 && lvl < target {
                return None;
            }
        }
        // Group rows by the exponent vector the contribution lands on.
        let mut by_exp: BTreeMap<Vec<BigInt>, (Vec<C>, C)> = BTreeMap::new();
        for t in &eq.raw {
            if t.level != eq.level0 {
                continue;
            }
            for (k, &ak) in t.trail.iter().enumerate() {
                if ak == 0 {
                    continue;
                }
                let scaled = t.coef.mul(&C::from_int(ak));
                for i in 0..d {
                    let mut e = t.exp.clone();
                    e[i] += w;
                    let entry = by_exp
                        .entry(e)
                        .or_insert_with(|| (vec![C::zero(); ncols], C::zero()));
                    let col = k * d + i;
                    entry.0[col] = entry.0[col].add(&scaled);
                }
            }
        }
        for (e, c) in &eq.residual {
            let lvl: BigInt = e.iter().sum();
            if lvl == target {
                let entry = by_exp
                    .entry(e.clone())
                    .or_insert_with(|| (vec![C::zero(); ncols], C::zero()));
                entry.1 = entry.1.add(c);
            }
        }
        for (_, (row, b)) in by_exp {
            rows.push(row);
            rhs.push(b.neg());
        }
    }
    solve_linear(rows, rhs, ncols)
}

/// Searches for a second series term of the form
/// `x_k <- x_k (1 + sum_i d_{k,i} t_i^w)` on the trailing coordinates.
///
/// Candidate increments `w` are the gaps between the cancelled lowest level
/// and the lowest surviving level of each equation, scanned in increasing
/// order. Each candidate must first succeed along a generic curve
/// restriction before the full multivariate ansatz is solved. Exact
/// developments are returned unchanged.
pub fn second_term<C: Coeff>(
    f: &PolySystem<C>,
    dev: &PuiseuxDevelopment<C>,
    cfg: &SolverConfig,
) -> Result<PuiseuxDevelopment<C>> {
    let d = dev.d();
    let n = dev.n();
    if f.nvars != n {
        return Err(Error::Shape("development does not match the system arity".into()));
    }
    if n == d {
        return Err(Error::Invalid("no trailing coordinates to correct".into()));
    }
    let ntrail = n - d;
    let eqs: Vec<EquationData<C>> =
        f.polys.iter().map(|p| equation_data(p, dev)).collect::<Result<_>>()?;
    if eqs.iter().all(|e| e.residual.is_empty()) {
        return Ok(dev.clone());
    }
    let mut candidates: BTreeSet<BigInt> = BTreeSet::new();
    for eq in &eqs {
        if let Some(lvl) = eq.residual.keys().map(|e| e.iter().sum::<BigInt>()).min() {
            let gap = lvl - &eq.level0;
            if gap <= BigInt::zero() {
                return Err(Error::Invalid(
                    "leading term does not cancel the lowest order; not a development".into(),
                ));
            }
            candidates.insert(gap);
        }
    }
    let gammas = curve_restriction_constants(cfg, d);
    for w in &candidates {
        if d > 1 {
            match try_restricted(&eqs, &gammas, w, ntrail)? {
                Some(_) => {}
                None => continue,
            }
        }
        if let Some(sol) = try_full(&eqs, w, d, ntrail) {
            let mut updated = dev.clone();
            for k in 0..ntrail {
                let co = &mut updated.coordinates[d + k];
                let mut terms = Vec::new();
                for (i, val) in sol[k * d..(k + 1) * d].iter().enumerate() {
                    if !val.is_zero() {
                        let mut exp = vec![BigRational::zero(); d];
                        exp[i] = BigRational::from(w.clone());
                        terms.push(SeriesTerm {
                            exponent: exp,
                            coefficient: co.coefficient.mul(val),
                        });
                    }
                }
                if !terms.is_empty() {
                    co.second = Some(terms);
                }
            }
            return Ok(updated);
        }
    }
    let summary: Vec<String> = eqs
        .iter()
        .enumerate()
        .filter_map(|(i, eq)| {
            eq.residual
                .iter()
                .next()
                .map(|(e, c)| {
                    let es: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                    format!("equation {}: {} * t^({})", i, c, es.join(","))
                })
        })
        .collect();
    Err(Error::Invalid(format!(
        "inconsistent linear conditions for every candidate increment; lowest surviving terms: {}",
        summary.join("; ")
    )))
}

/// Restricted-mode probe used by tests and callers that develop a curve:
/// the correction coefficients along `t_i = g_i t_0` for the first feasible
/// increment, together with the constants used.
pub fn second_term_restricted<C: Coeff>(
    f: &PolySystem<C>,
    dev: &PuiseuxDevelopment<C>,
    cfg: &SolverConfig,
) -> Result<(Vec<BigRational>, BigInt, Vec<C>)> {
    let d = dev.d();
    let n = dev.n();
    if n == d {
        return Err(Error::Invalid("no trailing coordinates to correct".into()));
    }
    let ntrail = n - d;
    let eqs: Vec<EquationData<C>> =
        f.polys.iter().map(|p| equation_data(p, dev)).collect::<Result<_>>()?;
    let mut candidates: BTreeSet<BigInt> = BTreeSet::new();
    for eq in &eqs {
        if let Some(lvl) = eq.residual.keys().map(|e| e.iter().sum::<BigInt>()).min() {
            candidates.insert(lvl - &eq.level0);
        }
    }
    let gammas = curve_restriction_constants(cfg, d);
    for w in &candidates {
        if let Some(sol) = try_restricted(&eqs, &gammas, w, ntrail)? {
            return Ok((gammas, w.clone(), sol));
        }
    }
    Err(Error::Invalid("no feasible increment in restricted mode".into()))
}

// ---------------------------------------------------------------------------
// Development drivers

fn develop_on_basis<C: Coeff>(
    f: &PolySystem<C>,
    basis: &TropismBasis,
    cfg: &SolverConfig,
    threads: usize,
) -> Result<(Vec<PuiseuxDevelopment<C>>, Vec<String>)> {
    let label = basis.label();
    let mut diags = Vec::new();
    if basis.n() != f.nvars {
        return Err(Error::Shape("tropism length does not match the system arity".into()));
    }
    let vs = basis.as_i64()?;
    let nested = initial_form_system(f, &vs)?;
    for (i, p) in nested.polys.iter().enumerate() {
        if p.num_terms() <= 1 {
            diags.push(format!(
                "cone {}: equation {} keeps {} term(s) in the nested initial form; skipped",
                label,
                i,
                p.num_terms()
            ));
            return Ok((Vec::new(), diags));
        }
    }
    let transform = build_unimodular_transform(basis.rows(), f.nvars)?;
    let trailing = transform_trailing(&nested, &transform)?;
    if trailing.polys.iter().all(|p| p.num_terms() == 2) {
        if let Ok(b) = BinomialSystem::from_system(&trailing) {
            if let Ok(sol) = solve_binomial(&b) {
                if sol.parameters > 0 {
                    diags.push(format!(
                        "cone {}: transformed initial forms keep a {}-parameter solution set; unresolved",
                        label, sol.parameters
                    ));
                    return Ok((Vec::new(), diags));
                }
            }
        }
    }
    let points = match solve_initial_form_with(&trailing, cfg, threads) {
        Ok(p) => p,
        Err(
            e @ (Error::EnumerationCap { .. }
            | Error::RootExtraction { .. }
            | Error::SingleTerm { .. }),
        ) => {
            diags.push(format!("cone {}: {}; skipped", label, e));
            return Ok((Vec::new(), diags));
        }
        Err(e) => return Err(e),
    };
    if points.is_empty() {
        diags.push(format!(
            "cone {}: no initial-form solutions with all coordinates nonzero; skipped",
            label
        ));
        return Ok((Vec::new(), diags));
    }
    let mut devs = Vec::new();
    for pt in &points {
        let mut dev = assemble(basis, &transform, &pt.coordinates)?;
        dev.exact = leading_term_exact(f, &dev)?;
        if !dev.exact {
            match second_term(f, &dev, cfg) {
                Ok(updated) => dev = updated,
                Err(e) => diags.push(format!("cone {}: second term: {}", label, e)),
            }
        }
        devs.push(dev);
    }
    Ok((devs, diags))
}

fn finish_report<C: Coeff>(mut report: DevelopReport<C>) -> DevelopReport<C> {
    report.developments.sort_by(cmp_dev);
    report.developments.dedup_by(|a, b| same_dev(a, b));
    report
}

fn develop_binomial<C: Coeff>(
    f: &PolySystem<C>,
    d: usize,
    _cfg: &SolverConfig,
) -> Result<DevelopReport<C>> {
    let mut report = DevelopReport { developments: Vec::new(), diagnostics: Vec::new() };
    let b = match BinomialSystem::from_system(f) {
        Ok(b) => b,
        Err(e @ Error::SingleTerm { .. }) => {
            report.diagnostics.push(format!("{}", e));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let sol = match solve_binomial(&b) {
        Ok(s) => s,
        Err(e @ (Error::RankDeficient { .. } | Error::RootExtraction { .. })) => {
            report.diagnostics.push(format!("binomial solve: {}", e));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    if sol.parameters != d {
        report.diagnostics.push(format!(
            "binomial kernel has dimension {}, not the requested {}",
            sol.parameters, d
        ));
        return Ok(report);
    }
    let basis = TropismBasis::new((0..d).map(|k| sol.transform.row(k)).collect())?;
    for point in &sol.points {
        let mut dev = assemble(&basis, &sol.transform, point)?;
        dev.exact = leading_term_exact(f, &dev)?;
        report.developments.push(dev);
    }
    Ok(finish_report(report))
}

/// Develops every pretropism cone of dimension at least `d`, with
/// positive-first selection and no symmetry reduction.
pub fn develop<C: Coeff>(
    f: &PolySystem<C>,
    d: usize,
    cfg: &SolverConfig,
) -> Result<DevelopReport<C>> {
    develop_with(f, d, cfg, true, None, 1)
}

/// Full-control variant of [`develop`]: `symmetry` reduces the cone list to
/// orbit representatives under the given variable permutation, and `threads`
/// caps the parallelism of the sweep and the solver grid.
pub fn develop_with<C: Coeff>(
    f: &PolySystem<C>,
    d: usize,
    cfg: &SolverConfig,
    positive_first: bool,
    symmetry: Option<&[usize]>,
    threads: usize,
) -> Result<DevelopReport<C>> {
    if f.polys.is_empty() {
        return Err(Error::EmptySystem);
    }
    if d == 0 || d >= f.nvars {
        return Err(Error::Invalid(format!(
            "parameter count must be between 1 and {}, got {}",
            f.nvars.saturating_sub(1),
            d
        )));
    }
    if f.polys.iter().all(|p| p.num_terms() == 2) {
        return develop_binomial(f, d, cfg);
    }
    let records = pretropism_cones_with(f, d, positive_first, threads)?;
    let mut report = DevelopReport { developments: Vec::new(), diagnostics: Vec::new() };
    if records.is_empty() {
        report.diagnostics.push("no pretropism cones of the requested dimension".into());
        return Ok(report);
    }
    let picks: Vec<usize> = match symmetry {
        Some(g) => orbit_group(&records, g)?.iter().map(|c| c.members[0]).collect(),
        None => (0..records.len()).collect(),
    };
    for idx in picks {
        let basis = match select_generators(&records[idx].cone, d, positive_first) {
            Ok(b) => b,
            Err(e) => {
                report.diagnostics.push(format!("cone #{}: {}; skipped", idx, e));
                continue;
            }
        };
        let (devs, diags) = develop_on_basis(f, &basis, cfg, threads)?;
        report.developments.extend(devs);
        report.diagnostics.extend(diags);
    }
    Ok(finish_report(report))
}

/// Develops one explicitly chosen tropism basis, bypassing the cone sweep.
/// The basis rows are used verbatim (after primitive normalization).
pub fn develop_at<C: Coeff>(
    f: &PolySystem<C>,
    basis: &TropismBasis,
    cfg: &SolverConfig,
) -> Result<DevelopReport<C>> {
    let (developments, diagnostics) = develop_on_basis(f, basis, cfg, 1)?;
    Ok(finish_report(DevelopReport { developments, diagnostics }))
}
