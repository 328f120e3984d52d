//! Exact polyhedral cones by the double description method.
//!
//! A cone is held as a generator description (lineality basis plus pointed
//! extreme rays) together with the list of halfspaces and hyperplanes
//! inserted so far. Insertion keeps both descriptions in sync, so membership
//! tests stay cheap and dimension/ray queries are always available. All
//! arithmetic is exact.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::linalg::{make_primitive, IntMatrix, RatMatrix};

/// Public, canonical form of a polyhedral cone: pointed extreme rays
/// (primitive, reduced modulo the lineality space, lexicographically sorted)
/// plus a canonical basis of the lineality space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub rays: Vec<Vec<BigInt>>,
    pub lineality: Vec<Vec<BigInt>>,
    pub dim: usize,
}

impl Cone {
    /// All generators, rays first; spanning the cone's linear span together.
    pub fn generators(&self) -> Vec<Vec<BigInt>> {
        self.rays.iter().chain(self.lineality.iter()).cloned().collect()
    }

    /// Deterministic identity key for dedup and orbit grouping.
    pub fn key(&self) -> String {
        format!("{:?}|{:?}", self.rays, self.lineality)
    }

    pub fn to_json(&self) -> Value {
        let rows = |m: &[Vec<BigInt>]| -> Vec<Vec<String>> {
            m.iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect()
        };
        json!({
            "rays": rows(&self.rays),
            "lineality": rows(&self.lineality),
            "dim": self.dim,
        })
    }
}

/// One inserted constraint `<a, v> >= 0` (or `= 0` when `eq`).
#[derive(Clone, Debug)]
pub struct Constraint {
    pub a: Vec<BigInt>,
    pub eq: bool,
}

#[derive(Clone, Debug)]
struct Ray {
    v: Vec<BigInt>,
    /// Indices of inserted constraints this ray satisfies with equality.
    tight: BTreeSet<usize>,
}

/// Working double-description pair.
#[derive(Clone, Debug)]
pub struct VRep {
    n: usize,
    lineality: Vec<Vec<BigInt>>,
    rays: Vec<Ray>,
    constraints: Vec<Constraint>,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl VRep {
    /// The full space `R^n`.
    pub fn full_space(n: usize) -> Self {
        let lineality = (0..n)
            .map(|i| {
                let mut e = vec![BigInt::zero(); n];
                e[i] = BigInt::from(1);
                e
            })
            .collect();
        VRep { n, lineality, rays: Vec::new(), constraints: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn ray_vectors(&self) -> impl Iterator<Item = &[BigInt]> + '_ {
        self.rays.iter().map(|r| r.v.as_slice())
    }

    pub fn lineality_rows(&self) -> &[Vec<BigInt>] {
        &self.lineality
    }

    pub fn insert_halfspace(&mut self, a: Vec<BigInt>) {
        self.insert(a, false);
    }

    pub fn insert_hyperplane(&mut self, a: Vec<BigInt>) {
        self.insert(a, true);
    }

    fn insert(&mut self, a: Vec<BigInt>, eq: bool) {
        assert_eq!(a.len(), self.n);
        let idx = self.constraints.len();
        self.constraints.push(Constraint { a: a.clone(), eq });

        // If the lineality space leaves the hyperplane, split off a pivot
        // direction; the rest of the lineality basis is folded into the
        // hyperplane and every ray is shifted along the pivot to satisfy the
        // constraint with equality.
        let s: Vec<BigInt> = self.lineality.iter().map(|l| dot(&a, l)).collect();
        if let Some(p) = s.iter().position(|v| !v.is_zero()) {
            let mut pivot = self.lineality.remove(p);
            let mut sp = s[p].clone();
            if sp.is_negative() {
                for x in pivot.iter_mut() {
                    *x = -x.clone();
                }
                sp = -sp;
            }
            let mut new_lin = Vec::new();
            for (j, l) in self.lineality.iter().enumerate() {
                let sj = if j < p { s[j].clone() } else { s[j + 1].clone() };
                let mut w: Vec<BigInt> = l
                    .iter()
                    .zip(&pivot)
                    .map(|(lj, pv)| &sp * lj - &sj * pv)
                    .collect();
                make_primitive(&mut w);
                new_lin.push(w);
            }
            self.lineality = new_lin;
            for r in self.rays.iter_mut() {
                let t = dot(&a, &r.v);
                if !t.is_zero() {
                    let mut w: Vec<BigInt> = r
                        .v
                        .iter()
                        .zip(&pivot)
                        .map(|(rv, pv)| &sp * rv - &t * pv)
                        .collect();
                    make_primitive(&mut w);
                    r.v = w;
                }
                r.tight.insert(idx);
            }
            if !eq {
                // The pivot survives as a ray strictly inside the halfspace;
                // as former lineality it is tight on every older constraint.
                let tight: BTreeSet<usize> = (0..idx).collect();
                self.rays.push(Ray { v: pivot, tight });
            }
            self.dedup_rays();
            return;
        }

        // Lineality is inside the hyperplane: classic double description on
        // the pointed part.
        let t: Vec<BigInt> = self.rays.iter().map(|r| dot(&a, &r.v)).collect();
        let mut keep: Vec<Ray> = Vec::new();
        let mut pos: Vec<usize> = Vec::new();
        let mut negs: Vec<usize> = Vec::new();
        for (i, ti) in t.iter().enumerate() {
            if ti.is_zero() {
                let mut r = self.rays[i].clone();
                r.tight.insert(idx);
                keep.push(r);
            } else if ti.is_positive() {
                pos.push(i);
            } else {
                negs.push(i);
            }
        }
        if !eq {
            for &i in &pos {
                keep.push(self.rays[i].clone());
            }
        }
        for &p in &pos {
            for &m in &negs {
                if !self.adjacent(p, m) {
                    continue;
                }
                let mut w: Vec<BigInt> = self.rays[m]
                    .v
                    .iter()
                    .zip(&self.rays[p].v)
                    .map(|(rm, rp)| &t[p] * rm - &t[m] * rp)
                    .collect();
                make_primitive(&mut w);
                if w.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let mut tight: BTreeSet<usize> = self.rays[p]
                    .tight
                    .intersection(&self.rays[m].tight)
                    .cloned()
                    .collect();
                tight.insert(idx);
                keep.push(Ray { v: w, tight });
            }
        }
        self.rays = keep;
        self.dedup_rays();
    }

    /// Combinatorial adjacency: two rays are adjacent when no third ray is
    /// tight on every constraint they are both tight on.
    fn adjacent(&self, i: usize, j: usize) -> bool {
        let common: BTreeSet<usize> = self.rays[i]
            .tight
            .intersection(&self.rays[j].tight)
            .cloned()
            .collect();
        !self.rays.iter().enumerate().any(|(k, r)| {
            k != i && k != j && common.iter().all(|c| r.tight.contains(c))
        })
    }

    fn dedup_rays(&mut self) {
        let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        self.rays.retain(|r| seen.insert(r.v.clone()));
    }

    pub fn dim(&self) -> usize {
        if self.lineality.is_empty() && self.rays.is_empty() {
            return 0;
        }
        let rows: Vec<Vec<BigInt>> = self
            .lineality
            .iter()
            .cloned()
            .chain(self.rays.iter().map(|r| r.v.clone()))
            .collect();
        IntMatrix::from_rows(rows).rank()
    }

    /// Exact membership test against the inserted constraints.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.constraints.iter().all(|c| {
            let d = dot(&c.a, v);
            if c.eq {
                d.is_zero()
            } else {
                !d.is_negative()
            }
        })
    }

    /// A vector in the relative interior (the zero vector for a pure
    /// subspace).
    pub fn relint_witness(&self) -> Vec<BigInt> {
        let mut w = vec![BigInt::zero(); self.n];
        for r in &self.rays {
            for (wi, ri) in w.iter_mut().zip(&r.v) {
                *wi += ri;
            }
        }
        w
    }

    /// Whether some member of the cone has strictly positive first
    /// coordinate.
    pub fn admits_positive_first(&self) -> bool {
        self.rays.iter().any(|r| r.v[0].is_positive())
            || self.lineality.iter().any(|l| !l[0].is_zero())
    }

    /// Whether `v` spans an extreme ray: the face of the cone it generates
    /// (cut out by its tight constraints) must be one-dimensional modulo the
    /// lineality space.
    fn ray_is_extreme(&self, v: &[BigInt]) -> bool {
        let tight: Vec<Vec<BigInt>> = self
            .constraints
            .iter()
            .filter(|c| dot(&c.a, v).is_zero())
            .map(|c| c.a.clone())
            .collect();
        let rank = if tight.is_empty() {
            0
        } else {
            IntMatrix::from_rows(tight).rank()
        };
        self.n - rank == self.lineality.len() + 1
    }

    /// Canonical public form: lineality in reduced row echelon basis, rays
    /// filtered down to extreme ones, reduced modulo the lineality space,
    /// made primitive and sorted. Identical cones reached along different
    /// insertion paths canonicalize identically.
    pub fn canonical(&self) -> Cone {
        let lineality = canonical_basis(&self.lineality);
        let projector = Projector::new(&lineality);
        let mut rays: Vec<Vec<BigInt>> = self
            .rays
            .iter()
            .filter(|r| self.ray_is_extreme(&r.v))
            .filter_map(|r| projector.reduce(&r.v))
            .collect();
        rays.sort();
        rays.dedup();
        Cone { rays, lineality, dim: self.dim() }
    }
}

/// Canonical basis of the row space: reduced row echelon form scaled to
/// primitive integer rows (pivot entries positive).
pub fn canonical_basis(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let mut m = IntMatrix::from_rows(rows.to_vec()).to_rational();
    let pivots = m.rref();
    let mut out = Vec::new();
    for i in 0..pivots.len() {
        let mut denom_lcm = BigInt::from(1);
        for q in m.row(i) {
            denom_lcm = num_integer::lcm(denom_lcm, q.denom().clone());
        }
        let mut v: Vec<BigInt> = m
            .row(i)
            .iter()
            .map(|q| q.numer() * (&denom_lcm / q.denom()))
            .collect();
        make_primitive(&mut v);
        out.push(v);
    }
    out
}

/// Exact orthogonal projection away from a fixed subspace; set up once,
/// applied to many vectors.
struct Projector {
    basis: Option<(RatMatrix, RatMatrix, RatMatrix)>, // (B, B^T, (B B^T)^-1)
}

impl Projector {
    fn new(basis: &[Vec<BigInt>]) -> Self {
        if basis.is_empty() {
            return Projector { basis: None };
        }
        let b = IntMatrix::from_rows(basis.to_vec()).to_rational();
        let bt = IntMatrix::from_rows(basis.to_vec()).transpose().to_rational();
        let gram_inv = b.mul(&bt).inverse().expect("basis rows are independent");
        Projector { basis: Some((b, bt, gram_inv)) }
    }

    /// Primitive representative of `v` modulo the subspace; `None` if `v`
    /// lies inside it.
    fn reduce(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let Some((b, bt, gram_inv)) = &self.basis else {
            let mut w = v.to_vec();
            make_primitive(&mut w);
            return (!w.iter().all(|x| x.is_zero())).then_some(w);
        };
        let vr = RatMatrix::from_rows(vec![v
            .iter()
            .map(|x| num_rational::BigRational::from_integer(x.clone()))
            .collect()]);
        let proj = vr.mul(bt).mul(gram_inv).mul(b); // 1 x n
        let mut denom_lcm = BigInt::from(1);
        for j in 0..proj.ncols() {
            denom_lcm = num_integer::lcm(denom_lcm, proj.row(0)[j].denom().clone());
        }
        let mut w: Vec<BigInt> = (0..proj.ncols())
            .map(|j| {
                let q = &proj.row(0)[j];
                let vi = num_rational::BigRational::from_integer(v[j].clone());
                let diff = vi - q;
                diff.numer() * (&denom_lcm / diff.denom())
            })
            .collect();
        make_primitive(&mut w);
        (!w.iter().all(|x| x.is_zero())).then_some(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn quadrant_from_two_halfspaces() {
        let mut c = VRep::full_space(2);
        c.insert_halfspace(big(&[1, 0]));
        c.insert_halfspace(big(&[0, 1]));
        let k = c.canonical();
        assert_eq!(k.lineality.len(), 0);
        assert_eq!(k.rays, vec![big(&[0, 1]), big(&[1, 0])]);
        assert_eq!(k.dim, 2);
        assert!(c.contains(&big(&[3, 5])));
        assert!(!c.contains(&big(&[-1, 5])));
    }

    #[test]
    fn hyperplane_keeps_a_subspace() {
        let mut c = VRep::full_space(3);
        c.insert_hyperplane(big(&[1, 1, 1]));
        let k = c.canonical();
        assert_eq!(k.dim, 2);
        assert!(k.rays.is_empty());
        assert_eq!(k.lineality, vec![big(&[1, 0, -1]), big(&[0, 1, -1])]);
    }

    #[test]
    fn octant_and_a_diagonal_cut() {
        let mut c = VRep::full_space(3);
        for e in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            c.insert_halfspace(big(&e));
        }
        assert_eq!(c.dim(), 3);
        // Slice with x = y: a 2-dimensional wedge.
        c.insert_hyperplane(big(&[1, -1, 0]));
        let k = c.canonical();
        assert_eq!(k.dim, 2);
        assert_eq!(k.rays, vec![big(&[0, 0, 1]), big(&[1, 1, 0])]);
    }

    #[test]
    fn infeasible_strict_directions_collapse_to_a_point() {
        let mut c = VRep::full_space(1);
        c.insert_halfspace(big(&[1]));
        c.insert_halfspace(big(&[-1]));
        assert_eq!(c.dim(), 0);
    }

    #[test]
    fn square_pyramid_normal_fan_ray_counts() {
        // Cone over the square: v >= 0 in each of the four tilted halfspaces.
        let mut c = VRep::full_space(3);
        c.insert_halfspace(big(&[1, 0, 1]));
        c.insert_halfspace(big(&[-1, 0, 1]));
        c.insert_halfspace(big(&[0, 1, 1]));
        c.insert_halfspace(big(&[0, -1, 1]));
        let k = c.canonical();
        assert_eq!(k.dim, 3);
        assert_eq!(k.lineality.len(), 0);
        assert_eq!(k.rays.len(), 4);
        for r in &k.rays {
            assert_eq!(r[2], BigInt::from(1));
        }
    }

    #[test]
    fn rays_are_reduced_modulo_lineality() {
        // Two insertion orders for the same cone {x >= 0} with lineality z.
        let mut a = VRep::full_space(3);
        a.insert_hyperplane(big(&[0, 1, 0]));
        a.insert_halfspace(big(&[1, 0, 0]));
        let mut b = VRep::full_space(3);
        b.insert_halfspace(big(&[1, 0, 0]));
        b.insert_hyperplane(big(&[0, 1, 0]));
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.canonical().key(), b.canonical().key());
    }

    #[test]
    fn relint_witness_lies_strictly_inside() {
        let mut c = VRep::full_space(2);
        c.insert_halfspace(big(&[1, 0]));
        c.insert_halfspace(big(&[1, 3]));
        let w = c.relint_witness();
        assert!(c.contains(&w));
        for cst in c.constraints() {
            assert!(dot(&cst.a, &w) > BigInt::zero());
        }
    }

    #[test]
    fn positive_first_detection() {
        let mut c = VRep::full_space(2);
        c.insert_halfspace(big(&[-1, 0]));
        assert!(!c.admits_positive_first());
        let mut d = VRep::full_space(2);
        d.insert_hyperplane(big(&[1, -1]));
        assert!(d.admits_positive_first()); // lineality (1,1) flips sign
    }

    #[test]
    fn json_uses_integer_strings() {
        let mut c = VRep::full_space(2);
        c.insert_halfspace(big(&[1, 0]));
        c.insert_halfspace(big(&[0, 1]));
        let v = c.canonical().to_json();
        assert_eq!(
            v,
            serde_json::json!({
                "rays": [["0", "1"], ["1", "0"]],
                "lineality": [],
                "dim": 2,
            })
        );
    }
}
