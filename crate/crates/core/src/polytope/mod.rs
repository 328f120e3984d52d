//! Newton polytopes and initial forms.
//!
//! The initial support of a finite point set `A` with respect to a weight
//! vector `v` is the subset of `A` on which the inner product with `v` is
//! minimal. Applying several weight vectors one after the other (each acting
//! on the outcome of the previous one) carves out nested faces; the same
//! operation lifted to polynomial coefficients gives initial forms.

pub mod cone;
pub mod prevariety;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::coeff::Coeff;
use crate::linalg::{make_primitive, IntMatrix};

pub use cone::{canonical_basis, Cone, VRep};
pub use prevariety::{
    orbit_group, pretropism_cones, pretropism_cones_with, OrbitClass, PretropismRecord,
};

use crate::poly::{Exponent, LaurentPolynomial, PolySystem};
use crate::{Error, Result};

fn weight(exp: &[i64], v: &[i64]) -> i128 {
    exp.iter().zip(v).map(|(&e, &w)| e as i128 * w as i128).sum()
}

/// The points of `points` minimizing the inner product with `v`.
pub fn initial_support(points: &[Vec<i64>], v: &[i64]) -> Result<Vec<Vec<i64>>> {
    if v.iter().all(|&x| x == 0) {
        return Err(Error::Invalid("zero weight vector".into()));
    }
    let min = points
        .iter()
        .map(|p| weight(p, v))
        .min()
        .ok_or(Error::Invalid("empty point set".into()))?;
    Ok(points
        .iter()
        .filter(|p| weight(p, v) == min)
        .cloned()
        .collect())
}

/// The terms of `f` whose exponents minimize the inner product with `v`.
pub fn initial_form<C: Coeff>(
    f: &LaurentPolynomial<C>,
    v: &[i64],
) -> Result<LaurentPolynomial<C>> {
    if v.len() != f.nvars() {
        return Err(Error::Shape(format!(
            "weight vector has {} entries, polynomial has {} variables",
            v.len(),
            f.nvars()
        )));
    }
    if v.iter().all(|&x| x == 0) {
        return Err(Error::Invalid("zero weight vector".into()));
    }
    if f.is_zero() {
        return Ok(f.clone());
    }
    let min = f.terms().map(|(e, _)| weight(e, v)).min().unwrap();
    let mut out = LaurentPolynomial::zero(f.nvars());
    for (e, c) in f.terms() {
        if weight(e, v) == min {
            out.add_term(e.clone(), c.clone());
        }
    }
    Ok(out)
}

/// Applies the weight vectors in order, each to the result of the previous
/// one, across the whole system. Variable names carry over.
pub fn initial_form_system<C: Coeff>(
    sys: &PolySystem<C>,
    vs: &[Vec<i64>],
) -> Result<PolySystem<C>> {
    let mut polys = sys.polys.clone();
    for v in vs {
        if v.len() != sys.nvars {
            return Err(Error::Shape(format!(
                "weight vector has {} entries, system has {} variables",
                v.len(),
                sys.nvars
            )));
        }
        for p in polys.iter_mut() {
            *p = initial_form(p, v)?;
        }
    }
    PolySystem::with_names(polys, sys.var_names.clone())
}

/// An edge of a Newton polytope: indices into the vertex list plus the
/// primitive direction from vertex `a` to vertex `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub direction: Vec<BigInt>,
}

/// Convex hull data of a polynomial support: the support itself, its extreme
/// points, and the edges of the hull. Valid in any dimension, including
/// supports whose hull is lower-dimensional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolytope {
    pub points: Vec<Vec<i64>>,
    pub vertices: Vec<Vec<i64>>,
    pub edges: Vec<Edge>,
}

/// Cone of weight vectors selecting `face` from `points` (minimization);
/// returned as a working double-description pair.
fn normal_region(points: &[Vec<i64>], base: &[i64], tied: &[&[i64]], n: usize) -> VRep {
    let mut c = VRep::full_space(n);
    for t in tied {
        let a: Vec<BigInt> = t.iter().zip(base).map(|(&x, &b)| BigInt::from(x - b)).collect();
        c.insert_hyperplane(a);
    }
    for p in points {
        if p.as_slice() == base || tied.iter().any(|t| *t == p.as_slice()) {
            continue;
        }
        let a: Vec<BigInt> = p.iter().zip(base).map(|(&x, &b)| BigInt::from(x - b)).collect();
        c.insert_halfspace(a);
    }
    c
}

/// Computes vertices and edges of the convex hull of `f`'s support by exact
/// normal-cone dimension tests: a point is a vertex when its normal cone is
/// full-dimensional, and a vertex pair spans an edge when the cone of weight
/// vectors tying the pair at the minimum has dimension `n - 1`.
pub fn newton_polytope<C: Coeff>(f: &LaurentPolynomial<C>) -> Result<NewtonPolytope> {
    if f.is_zero() {
        return Err(Error::Invalid("zero polynomial has no Newton polytope".into()));
    }
    let n = f.nvars();
    let points: Vec<Exponent> = f.support();
    let mut vertices = Vec::new();
    for p in &points {
        if normal_region(&points, p, &[], n).dim() == n {
            vertices.push(p.clone());
        }
    }
    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            let (p, q) = (&vertices[i], &vertices[j]);
            let on_line: Vec<&[i64]> = points
                .iter()
                .filter(|a| a.as_slice() != p.as_slice() && collinear(p, q, a))
                .map(|a| a.as_slice())
                .collect();
            let c = normal_region(&points, p, &on_line, n);
            if n > 0 && c.dim() == n - 1 {
                let mut dir: Vec<BigInt> =
                    q.iter().zip(p).map(|(&x, &y)| BigInt::from(x - y)).collect();
                make_primitive(&mut dir);
                edges.push(Edge { a: i, b: j, direction: dir });
            }
        }
    }
    Ok(NewtonPolytope { points, vertices, edges })
}

/// Whether `a` lies on the line through `p` and `q`.
fn collinear(p: &[i64], q: &[i64], a: &[i64]) -> bool {
    let d1: Vec<BigInt> = q.iter().zip(p).map(|(&x, &y)| BigInt::from(x - y)).collect();
    let d2: Vec<BigInt> = a.iter().zip(p).map(|(&x, &y)| BigInt::from(x - y)).collect();
    if d2.iter().all(|x| x.is_zero()) {
        return true;
    }
    IntMatrix::from_rows(vec![d1, d2]).rank() <= 1
}
