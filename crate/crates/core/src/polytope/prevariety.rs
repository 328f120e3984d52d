//! Cones of weight vectors that pick at least a two-point initial support in
//! every polynomial of a system.
//!
//! The sweep intersects one polynomial at a time. For a support `A` the
//! region of admissible weights is the union over point pairs `{p, q}` of the
//! cones where `p` and `q` are tied at the minimum, so each working cone
//! either survives whole (when one face certificate is already constant on
//! it) or is split along every pair. Dimension and sign pruning, canonical
//! dedup, and a final maximality pass keep the result small and exact.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::coeff::Coeff;
use crate::linalg::dot_i64;
use crate::poly::PolySystem;
use crate::polytope::cone::{canonical_basis, Cone, VRep};
use crate::{Error, Result};

/// A maximal cone of the admissible region together with, for each
/// polynomial of the system, the support points tied at the minimum across
/// the cone's relative interior.
#[derive(Clone, Debug)]
pub struct PretropismRecord {
    pub cone: Cone,
    pub certificates: Vec<Vec<Vec<i64>>>,
    rep: VRep,
}

impl PretropismRecord {
    /// Exact membership test for a weight vector.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.rep.contains(v)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cone": self.cone.to_json(),
            "certificates": self.certificates,
        })
    }
}

/// Maximal cones of dimension at least `d` on which every polynomial of the
/// system keeps an initial support with two or more points. With
/// `positive_first`, only cones containing a vector with strictly positive
/// first coordinate are kept.
pub fn pretropism_cones<C: Coeff>(
    sys: &PolySystem<C>,
    d: usize,
    positive_first: bool,
) -> Result<Vec<PretropismRecord>> {
    pretropism_cones_with(sys, d, positive_first, 1)
}

/// As [`pretropism_cones`], splitting the per-cone work across `threads`
/// OS threads. The result is identical for every thread count.
pub fn pretropism_cones_with<C: Coeff>(
    sys: &PolySystem<C>,
    d: usize,
    positive_first: bool,
    threads: usize,
) -> Result<Vec<PretropismRecord>> {
    let n = sys.nvars;
    let supports: Vec<Vec<Vec<i64>>> = sys.polys.iter().map(|p| p.support()).collect();
    if supports.is_empty() {
        return Err(Error::EmptySystem);
    }
    if n == 0 || supports.iter().any(|s| s.len() < 2) {
        // Some polynomial is constant or a single term: no weight vector can
        // tie two of its points.
        return Ok(Vec::new());
    }
    let dmin = d.max(1);
    if dmin > n {
        return Ok(Vec::new());
    }

    // Fewer pairs first: cheap constraints shrink the state early.
    let mut order: Vec<usize> = (0..supports.len()).collect();
    order.sort_by_key(|&i| supports[i].len());

    let mut state: Vec<VRep> = vec![VRep::full_space(n)];
    let mut processed: Vec<usize> = Vec::new();
    for &pi in &order {
        let a = &supports[pi];
        let batches = map_cones(&state, threads, |k| split_cone(k, a, dmin, positive_first));
        processed.push(pi);
        // Two refinement cells are equal exactly when they select the same
        // face of every processed support, so the face signature at the
        // relative interior is a sound (and cheap) dedup key.
        let mut seen: BTreeSet<String> = BTreeSet::new();
        let mut next = Vec::new();
        for batch in batches {
            for c in batch {
                if seen.insert(cell_signature(&c, &supports, &processed)) {
                    next.push(c);
                }
            }
        }
        state = next;
        if state.is_empty() {
            return Ok(Vec::new());
        }
    }

    // Keep only cones not strictly contained in another one.
    let cones: Vec<Cone> = state.iter().map(|k| k.canonical()).collect();
    let mut records = Vec::new();
    for (i, k) in state.iter().enumerate() {
        let contained = state
            .iter()
            .enumerate()
            .any(|(j, other)| j != i && cone_inside(&cones[i], other));
        if contained {
            continue;
        }
        let w = k.relint_witness();
        let certificates: Vec<Vec<Vec<i64>>> = supports
            .iter()
            .map(|a| tied_minimum(a, &w))
            .collect();
        debug_assert!(certificates.iter().all(|c| c.len() >= 2));
        records.push(PretropismRecord { cone: cones[i].clone(), certificates, rep: k.clone() });
    }
    records.sort_by(|a, b| a.cone.key().cmp(&b.cone.key()));
    Ok(records)
}

fn map_cones<F>(state: &[VRep], threads: usize, f: F) -> Vec<Vec<VRep>>
where
    F: Fn(&VRep) -> Vec<VRep> + Sync,
{
    let threads = threads.max(1).min(state.len().max(1));
    if threads <= 1 {
        return state.iter().map(&f).collect();
    }
    let chunk = state.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = state
            .chunks(chunk)
            .map(|part| s.spawn(|| part.iter().map(&f).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

/// Refines one working cone by one support. If a two-point-or-more face is
/// already constant across the cone, the cone passes through unchanged;
/// otherwise it is split along every point pair.
fn split_cone(k: &VRep, a: &[Vec<i64>], dmin: usize, positive_first: bool) -> Vec<VRep> {
    if constant_face(k, a).is_some() {
        return vec![k.clone()];
    }
    let mut out = Vec::new();
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let mut child = k.clone();
            child.insert_hyperplane(diff(&a[j], &a[i]));
            for (t, p) in a.iter().enumerate() {
                if t != i && t != j {
                    child.insert_halfspace(diff(p, &a[i]));
                }
            }
            if child.dim() >= dmin && (!positive_first || child.admits_positive_first()) {
                out.push(child);
            }
        }
    }
    out
}

fn diff(p: &[i64], q: &[i64]) -> Vec<BigInt> {
    p.iter().zip(q).map(|(&x, &y)| BigInt::from(x - y)).collect()
}

/// Identity key of a refinement cell: the faces its relative interior picks
/// from each processed support.
fn cell_signature(k: &VRep, supports: &[Vec<Vec<i64>>], processed: &[usize]) -> String {
    use std::fmt::Write;
    let w = k.relint_witness();
    let mut s = String::new();
    for &i in processed {
        for p in tied_minimum(&supports[i], &w) {
            s.push('[');
            for x in p {
                let _ = write!(s, "{},", x);
            }
            s.push(']');
        }
        s.push('|');
    }
    s
}

/// The support points whose inner product with `w` is minimal.
fn tied_minimum(a: &[Vec<i64>], w: &[BigInt]) -> Vec<Vec<i64>> {
    let vals: Vec<BigInt> = a.iter().map(|p| dot_i64(w, p)).collect();
    let min = vals.iter().min().expect("nonempty support").clone();
    a.iter()
        .zip(&vals)
        .filter(|(_, v)| **v == min)
        .map(|(p, _)| p.clone())
        .collect()
}

/// The face selected at the cone's relative interior, provided it has at
/// least two points and stays the initial support across the whole cone.
fn constant_face(k: &VRep, a: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let w = k.relint_witness();
    let face = tied_minimum(a, &w);
    if face.len() < 2 {
        return None;
    }
    let f0 = &face[0];
    let in_face: BTreeSet<&[i64]> = face.iter().map(|p| p.as_slice()).collect();
    for r in k.ray_vectors() {
        for p in a {
            let d = dot_i64(r, p) - dot_i64(r, f0);
            if in_face.contains(p.as_slice()) {
                if !d.is_zero() {
                    return None;
                }
            } else if d.is_negative() {
                return None;
            }
        }
    }
    for l in k.lineality_rows() {
        for p in a {
            if dot_i64(l, p) != dot_i64(l, f0) {
                return None;
            }
        }
    }
    Some(face)
}

/// Whether the cone given canonically by `inner` lies inside the cone whose
/// constraint description is `outer`.
fn cone_inside(inner: &Cone, outer: &VRep) -> bool {
    inner.rays.iter().all(|r| outer.contains(r))
        && inner.lineality.iter().all(|l| {
            let neg: Vec<BigInt> = l.iter().map(|x| -x.clone()).collect();
            outer.contains(l) && outer.contains(&neg)
        })
}

/// One orbit of cones under a cyclic group of coordinate permutations.
#[derive(Clone, Debug)]
pub struct OrbitClass {
    pub representative: Cone,
    /// Indices into the record list passed to [`orbit_group`].
    pub members: Vec<usize>,
    /// Number of distinct cones in the full orbit.
    pub size: usize,
}

/// Groups records into orbits under the cyclic group generated by the
/// variable permutation `generator` (`generator[i]` is the image of
/// coordinate `i`). The representative is the orbit's lexicographically
/// least cone.
pub fn orbit_group(
    records: &[PretropismRecord],
    generator: &[usize],
) -> Result<Vec<OrbitClass>> {
    let n = generator.len();
    let mut hit = vec![false; n];
    for &g in generator {
        if g >= n || hit[g] {
            return Err(Error::Invalid("generator is not a permutation".into()));
        }
        hit[g] = true;
    }
    if records.iter().any(|r| {
        r.cone.rays.iter().chain(r.cone.lineality.iter()).any(|v| v.len() != n)
    }) {
        return Err(Error::Shape(
            "cone generators do not match the permutation length".into(),
        ));
    }

    let mut classes: Vec<OrbitClass> = Vec::new();
    let mut visited: BTreeSet<String> = BTreeSet::new();
    for (i, rec) in records.iter().enumerate() {
        if visited.contains(&rec.cone.key()) {
            continue;
        }
        // Walk the orbit until the starting cone reappears.
        let mut orbit = vec![rec.cone.clone()];
        let mut current = permute_cone(&rec.cone, generator);
        while current.key() != rec.cone.key() {
            orbit.push(current.clone());
            current = permute_cone(&current, generator);
            if orbit.len() > 1_000_000 {
                return Err(Error::Invalid("orbit does not close".into()));
            }
        }
        let mut keys: Vec<String> = orbit.iter().map(|c| c.key()).collect();
        keys.sort();
        keys.dedup();
        let size = keys.len();
        let members: Vec<usize> = records
            .iter()
            .enumerate()
            .filter(|(_, r)| keys.binary_search(&r.cone.key()).is_ok())
            .map(|(j, _)| j)
            .collect();
        debug_assert!(members.contains(&i));
        for k in &keys {
            visited.insert(k.clone());
        }
        let representative = orbit
            .iter()
            .min_by(|a, b| (&a.rays, &a.lineality).cmp(&(&b.rays, &b.lineality)))
            .expect("orbit is nonempty")
            .clone();
        classes.push(OrbitClass { representative, members, size });
    }
    classes.sort_by(|a, b| {
        (&a.representative.rays, &a.representative.lineality)
            .cmp(&(&b.representative.rays, &b.representative.lineality))
    });
    Ok(classes)
}

/// Applies a variable permutation to every generator of a cone and restores
/// canonical form.
fn permute_cone(c: &Cone, perm: &[usize]) -> Cone {
    let apply = |v: &Vec<BigInt>| -> Vec<BigInt> {
        let mut w = vec![BigInt::zero(); v.len()];
        for (i, x) in v.iter().enumerate() {
            w[perm[i]] = x.clone();
        }
        w
    };
    let lineality = canonical_basis(&c.lineality.iter().map(apply).collect::<Vec<_>>());
    let mut rays: Vec<Vec<BigInt>> = c.rays.iter().map(apply).collect();
    rays.sort();
    Cone { rays, lineality, dim: c.dim }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Cyclotomic;
    use crate::linalg::IntMatrix;
    use crate::poly::parse_system;
    use crate::polytope::initial_support;
    use crate::systems::{cyclic_system, illus3};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn span_contains(c: &Cone, v: &[BigInt]) -> bool {
        let gens: Vec<Vec<BigInt>> = c.rays.iter().chain(c.lineality.iter()).cloned().collect();
        if gens.is_empty() {
            return v.iter().all(|x| x.is_zero());
        }
        let base_rank = IntMatrix::from_rows(gens.clone()).rank();
        let mut with = gens;
        with.push(v.to_vec());
        IntMatrix::from_rows(with).rank() == base_rank
    }

    fn check_ray_invariant(records: &[PretropismRecord], sys: &crate::poly::PolySystem<Cyclotomic>) {
        let supports: Vec<Vec<Vec<i64>>> = sys.polys.iter().map(|p| p.support()).collect();
        for r in records {
            assert!(r.certificates.iter().all(|c| c.len() >= 2));
            for ray in r.cone.rays.iter().chain(r.cone.lineality.iter()) {
                for a in &supports {
                    assert!(tied_minimum(a, ray).len() >= 2);
                }
            }
        }
    }

    #[test]
    fn single_binomial_pair_gives_the_kernel_subspace() {
        let sys: crate::poly::PolySystem<Cyclotomic> =
            parse_system("x0^2*x1*x2^4*x3^3 - 1;\nx0*x1*x2*x3 - 1;").unwrap();
        let recs = pretropism_cones(&sys, 2, true).unwrap();
        assert_eq!(recs.len(), 1);
        let cone = &recs[0].cone;
        assert!(cone.rays.is_empty());
        assert_eq!(cone.dim, 2);
        assert_eq!(cone.lineality, vec![big(&[1, 0, 1, -2]), big(&[0, 1, 2, -3])]);
        for cert in &recs[0].certificates {
            assert_eq!(cert.len(), 2);
        }
        check_ray_invariant(&recs, &sys);
    }

    #[test]
    fn cyclic9_has_a_cone_spanning_both_tropisms() {
        let c9: crate::poly::PolySystem<Cyclotomic> = cyclic_system(9).unwrap();
        let recs = pretropism_cones(&c9, 2, true).unwrap();
        assert!(!recs.is_empty());
        let u = big(&[1, 1, -2, 1, 1, -2, 1, 1, -2]);
        let v = big(&[0, 1, -1, 0, 1, -1, 0, 1, -1]);
        let hit = recs
            .iter()
            .find(|r| span_contains(&r.cone, &u) && span_contains(&r.cone, &v));
        assert!(hit.is_some(), "no cone spans both tropism generators");
        // Both generators are pretropisms themselves, so each must lie in
        // some maximal cell.
        assert!(recs.iter().any(|r| r.contains(&u)));
        assert!(recs.iter().any(|r| r.contains(&v)));
        check_ray_invariant(&recs, &c9);
    }

    #[test]
    fn sweep_is_deterministic_across_thread_counts() {
        let c9: crate::poly::PolySystem<Cyclotomic> = cyclic_system(9).unwrap();
        let one = pretropism_cones_with(&c9, 2, true, 1).unwrap();
        let four = pretropism_cones_with(&c9, 2, true, 4).unwrap();
        let as_json: Vec<String> = one.iter().map(|r| r.to_json().to_string()).collect();
        let as_json4: Vec<String> = four.iter().map(|r| r.to_json().to_string()).collect();
        assert_eq!(as_json, as_json4);
    }

    #[test]
    fn surface_system_rays_at_dimension_one() {
        let sys: crate::poly::PolySystem<Cyclotomic> = illus3();
        let recs = pretropism_cones(&sys, 1, true).unwrap();
        let all_rays: Vec<Vec<BigInt>> =
            recs.iter().flat_map(|r| r.cone.rays.clone()).collect();
        assert!(all_rays.contains(&big(&[1, 0, 0])));
        assert!(all_rays.contains(&big(&[0, 1, 0])));
        assert!(all_rays.contains(&big(&[1, 2, 3])));
        check_ray_invariant(&recs, &sys);
    }

    #[test]
    fn positive_first_filter_drops_the_pure_z_direction() {
        let sys: crate::poly::PolySystem<Cyclotomic> = illus3();
        let kept = pretropism_cones(&sys, 1, true).unwrap();
        let all = pretropism_cones(&sys, 1, false).unwrap();
        let z = big(&[0, 0, 1]);
        assert!(!kept.iter().any(|r| r.cone.rays.contains(&z) && r.cone.rays.len() == 1));
        assert!(all.iter().any(|r| r.cone.rays.contains(&z)));
        assert!(all.len() > kept.len());
        for r in &kept {
            assert!(
                r.cone.rays.iter().any(|v| v[0].is_positive())
                    || r.cone.lineality.iter().any(|l| !l[0].is_zero())
            );
        }
    }

    fn primitive_box_vectors(n: usize, bound: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let width = (2 * bound + 1) as usize;
        for idx in 0..width.pow(n as u32) {
            let mut v = Vec::with_capacity(n);
            let mut rest = idx;
            for _ in 0..n {
                v.push((rest % width) as i64 - bound);
                rest /= width;
            }
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let mut b = big(&v);
            crate::linalg::make_primitive(&mut b);
            if b == big(&v) {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn random_systems_match_ray_enumeration_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rays = primitive_box_vectors(3, 3);
        for _case in 0..12 {
            let mut polys = Vec::new();
            for _ in 0..2 {
                let mut f: crate::poly::LaurentPolynomial<Cyclotomic> =
                    crate::poly::LaurentPolynomial::zero(3);
                while f.num_terms() < 3 {
                    let e: Vec<i64> = (0..3).map(|_| rng.gen_range(0..5)).collect();
                    f.add_term(e, Cyclotomic::from_int(rng.gen_range(1..5)));
                }
                polys.push(f);
            }
            let sys = crate::poly::PolySystem::new(polys).unwrap();
            let supports: Vec<Vec<Vec<i64>>> =
                sys.polys.iter().map(|p| p.support()).collect();
            let recs = pretropism_cones(&sys, 1, false).unwrap();
            for v in &rays {
                let is_pre = supports
                    .iter()
                    .all(|a| initial_support(a, v).unwrap().len() >= 2);
                let in_records = recs.iter().any(|r| r.contains(&big(v)));
                assert_eq!(is_pre, in_records, "disagreement at {:?}", v);
            }
        }
    }

    #[test]
    fn forward_shift_orbits_partition_cyclic9_records() {
        let c9: crate::poly::PolySystem<Cyclotomic> = cyclic_system(9).unwrap();
        // No sign filter here: the filter is not shift-invariant, and this
        // test is about the symmetry of the full record set.
        let recs = pretropism_cones(&c9, 2, false).unwrap();
        let shift: Vec<usize> = (0..9).map(|i| (i + 1) % 9).collect();
        let classes = orbit_group(&recs, &shift).unwrap();
        let mut seen = vec![0usize; recs.len()];
        for cl in &classes {
            assert!(9 % cl.size == 0, "orbit size {} does not divide 9", cl.size);
            for &m in &cl.members {
                seen[m] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1), "classes do not partition the records");

        // The record set is closed under the shift: the system is symmetric.
        let keys: BTreeSet<String> = recs.iter().map(|r| r.cone.key()).collect();
        for r in &recs {
            assert!(keys.contains(&permute_cone(&r.cone, &shift).key()));
        }

        // The orbit of the cell spanning (u, v) consists of cells spanning
        // the coordinate shifts of (u, v).
        let u = [1i64, 1, -2, 1, 1, -2, 1, 1, -2];
        let v = [0i64, 1, -1, 0, 1, -1, 0, 1, -1];
        let shift_vec = |w: &[i64], by: usize| -> Vec<BigInt> {
            big(&(0..9).map(|i| w[(i + 9 - by) % 9]).collect::<Vec<_>>())
        };
        let (idx, _) = recs
            .iter()
            .enumerate()
            .find(|(_, r)| {
                span_contains(&r.cone, &shift_vec(&u, 0))
                    && span_contains(&r.cone, &shift_vec(&v, 0))
            })
            .unwrap();
        let class = classes.iter().find(|c| c.members.contains(&idx)).unwrap();
        for &m in &class.members {
            let cone = &recs[m].cone;
            let matches_some_shift = (0..9).any(|by| {
                span_contains(cone, &shift_vec(&u, by))
                    && span_contains(cone, &shift_vec(&v, by))
            });
            assert!(matches_some_shift, "orbit member does not span a shifted pair");
        }
        // Every member really is a shift image of the representative.
        for &m in &class.members {
            let cone = &recs[m].cone;
            let mut img = class.representative.clone();
            let mut found = cone.key() == img.key();
            for _ in 0..9 {
                img = permute_cone(&img, &shift);
                found = found || cone.key() == img.key();
            }
            assert!(found, "orbit member is not a shift of the representative");
        }
    }

    #[test]
    fn identity_orbits_are_singletons() {
        let sys: crate::poly::PolySystem<Cyclotomic> =
            parse_system("x0^2*x1*x2^4*x3^3 - 1;\nx0*x1*x2*x3 - 1;").unwrap();
        let recs = pretropism_cones(&sys, 2, true).unwrap();
        let classes = orbit_group(&recs, &[0, 1, 2, 3]).unwrap();
        assert_eq!(classes.len(), recs.len());
        assert!(classes.iter().all(|c| c.size == 1));
    }

    #[test]
    fn orbit_rejects_non_permutations() {
        assert!(orbit_group(&[], &[0, 0, 1]).is_err());
        assert!(orbit_group(&[], &[0, 3]).is_err());
    }
}
