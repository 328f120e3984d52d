use super::matrix::{dot, IntMatrix};
use super::normal_form::{hermite_normal_form, smith_normal_form};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coordinate change `x = t^M` used to turn a cone of tropisms into leading
/// parameters. Stored in row form: row `k` of `numer` holds the exponents of
/// the old variables in the new variable `t_k`, scaled by `denoms[k]`. Rows
/// `0..d` are the tropisms themselves; the remaining rows complete them to a
/// matrix that is unimodular after dividing row `k` by `denoms[k]`.
///
/// A monomial `x^a` pulls back to `prod_k t_k^(<row_k, a> / denoms[k])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnimodularTransform {
    numer: IntMatrix,
    denoms: Vec<BigInt>,
    d: usize,
}

impl UnimodularTransform {
    /// Identity change of coordinates (no tropism rows).
    pub fn identity(n: usize) -> Self {
        UnimodularTransform {
            numer: IntMatrix::identity(n),
            denoms: vec![BigInt::one(); n],
            d: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.numer.ncols()
    }

    /// Number of leading rows that came from tropisms.
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row_matrix(&self) -> &IntMatrix {
        &self.numer
    }

    /// The same transform with new variables indexing columns instead of
    /// rows (transpose of the row form; denominators become per-column).
    pub fn column_matrix(&self) -> IntMatrix {
        self.numer.transpose()
    }

    pub fn denominators(&self) -> &[BigInt] {
        &self.denoms
    }

    pub fn row(&self, k: usize) -> Vec<BigInt> {
        self.numer.row_vec(k)
    }

    /// Exponent vector of `x^a` after substitution, in the new variables.
    pub fn transformed_exponent(&self, a: &[BigInt]) -> Vec<BigRational> {
        (0..self.n())
            .map(|k| BigRational::new(dot(&self.numer.row_vec(k), a), self.denoms[k].clone()))
            .collect()
    }

    /// Like [`transformed_exponent`](Self::transformed_exponent), but
    /// requires every new exponent to be integral.
    pub fn transformed_exponent_int(&self, a: &[BigInt]) -> Result<Vec<BigInt>> {
        self.transformed_exponent(a)
            .into_iter()
            .map(|q| {
                if q.is_integer() {
                    Ok(q.to_integer())
                } else {
                    Err(Error::FractionalExponent(format!(
                        "exponent {} is not integral under this transform",
                        q
                    )))
                }
            })
            .collect()
    }

    /// `|det numer| == prod denoms`, i.e. the rational matrix with scaled
    /// rows has determinant of absolute value one.
    pub fn is_unimodular_over_rationals(&self) -> bool {
        let Ok(det) = self.numer.det() else {
            return false;
        };
        let prod: BigInt = self.denoms.iter().product();
        det.abs() == prod
    }
}

/// Columns of `b` that equal standard basis vectors, as a map
/// `row index -> smallest matching column`, if every row has one.
fn unit_column_assignment(b: &IntMatrix) -> Option<Vec<usize>> {
    let (d, n) = (b.nrows(), b.ncols());
    let mut assignment = vec![usize::MAX; d];
    for j in 0..n {
        let mut hit = None;
        let mut ok = true;
        for i in 0..d {
            let x = &b[(i, j)];
            if x.is_one() {
                if hit.is_some() {
                    ok = false;
                    break;
                }
                hit = Some(i);
            } else if !x.is_zero() {
                ok = false;
                break;
            }
        }
        if let (true, Some(i)) = (ok, hit) {
            if assignment[i] == usize::MAX {
                assignment[i] = j;
            }
        }
    }
    if assignment.iter().all(|&j| j != usize::MAX) {
        Some(assignment)
    } else {
        None
    }
}

fn unit_rows_on(cols: impl Iterator<Item = usize>, n: usize) -> Vec<Vec<BigInt>> {
    cols.map(|j| {
        let mut row = vec![BigInt::zero(); n];
        row[j] = BigInt::one();
        row
    })
    .collect()
}

/// Completes the tropism rows to a coordinate change with rational
/// determinant of absolute value one.
///
/// When the tropisms span a primitive lattice (all invariant factors 1), the
/// completion consists of unit rows whenever possible — on the columns not
/// matched by unit columns of the tropism block, else on the columns without
/// a Hermite pivot when the Hermite diagonal is all ones — and otherwise of
/// the trailing rows of the inverse Smith column transform. Non-primitive
/// tropisms get per-row denominators (the invariant factors if no row
/// operations were needed, else the Hermite diagonal) so that the scaled
/// matrix is still unimodular.
pub fn build_unimodular_transform(
    tropisms: &[Vec<BigInt>],
    n: usize,
) -> Result<UnimodularTransform> {
    let d = tropisms.len();
    if d == 0 || d > n {
        return Err(Error::Shape(format!(
            "need between 1 and {} tropisms, got {}",
            n, d
        )));
    }
    for t in tropisms {
        if t.len() != n {
            return Err(Error::Shape(format!(
                "tropism has {} coordinates, expected {}",
                t.len(),
                n
            )));
        }
    }
    let b = IntMatrix::from_rows(tropisms.to_vec());
    let rank = b.rank();
    if rank < d {
        return Err(Error::RankDeficient { rank, expected: d });
    }

    let smith = smith_normal_form(&b);
    let s_diag = smith.diagonal();
    let primitive = s_diag.iter().all(|x| x.is_one());

    let smith_completion = |v: &IntMatrix| -> Result<Vec<Vec<BigInt>>> {
        let v_inv = v
            .to_rational()
            .inverse()
            .ok()
            .and_then(|m| m.to_integer())
            .ok_or_else(|| Error::Invalid("column transform is not unimodular".into()))?;
        Ok((d..n).map(|i| v_inv.row_vec(i)).collect())
    };

    let mut denoms = vec![BigInt::one(); n];
    let completion: Vec<Vec<BigInt>> = if primitive {
        if let Some(assignment) = unit_column_assignment(&b) {
            unit_rows_on((0..n).filter(|j| !assignment.contains(j)), n)
        } else {
            let herm = hermite_normal_form(&b)?;
            if herm.diagonal().iter().all(|x| x.is_one()) {
                let pivots = herm.pivot_cols().to_vec();
                unit_rows_on((0..n).filter(|j| !pivots.contains(j)), n)
            } else {
                smith_completion(&smith.v)?
            }
        }
    } else if smith.u.is_identity() {
        denoms[..d].clone_from_slice(&s_diag);
        smith_completion(&smith.v)?
    } else {
        let herm = hermite_normal_form(&b)?;
        denoms[..d].clone_from_slice(&herm.diagonal());
        let pivots = herm.pivot_cols().to_vec();
        unit_rows_on((0..n).filter(|j| !pivots.contains(j)), n)
    };

    let mut rows: Vec<Vec<BigInt>> = tropisms.to_vec();
    rows.extend(completion);
    let numer = IntMatrix::from_rows(rows);
    let transform = UnimodularTransform { numer, denoms, d };
    if !transform.is_unimodular_over_rationals() {
        return Err(Error::Invalid(
            "completed transform failed the determinant check".into(),
        ));
    }
    Ok(transform)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bigs(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn kernel_pair_completes_with_unit_rows_on_leading_columns() {
        let u = bigs(&[-3, 2, 1, 0]);
        let v = bigs(&[-2, 1, 0, 1]);
        let t = build_unimodular_transform(&[u, v], 4).unwrap();
        assert_eq!(
            *t.row_matrix(),
            IntMatrix::from_i64(&[
                &[-3, 2, 1, 0],
                &[-2, 1, 0, 1],
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
            ])
        );
        assert_eq!(
            t.column_matrix(),
            IntMatrix::from_i64(&[
                &[-3, -2, 1, 0],
                &[2, 1, 0, 1],
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
            ])
        );
        assert!(t.denominators().iter().all(|x| x.is_one()));
        assert!(t.is_unimodular_over_rationals());
    }

    #[test]
    fn repeating_block_pair_completes_with_trailing_unit_rows() {
        let u = bigs(&[1, 1, -2, 1, 1, -2, 1, 1, -2]);
        let v = bigs(&[0, 1, -1, 0, 1, -1, 0, 1, -1]);
        let t = build_unimodular_transform(&[u.clone(), v.clone()], 9).unwrap();
        let mut expected = vec![u, v];
        for j in 2..9 {
            let mut row = vec![BigInt::zero(); 9];
            row[j] = BigInt::one();
            expected.push(row);
        }
        assert_eq!(*t.row_matrix(), IntMatrix::from_rows(expected));
        assert!(t.is_unimodular_over_rationals());

        // x_0*x_1 picks up exponents (u0+u1, v0+v1, a_2..a_8).
        let a = bigs(&[1, 1, 0, 0, 0, 0, 0, 0, 0]);
        let e = t.transformed_exponent_int(&a).unwrap();
        assert_eq!(e, bigs(&[2, 1, 0, 0, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn non_primitive_tropism_gets_a_denominator() {
        let t = build_unimodular_transform(&[bigs(&[2, 4])], 2).unwrap();
        assert_eq!(*t.row_matrix(), IntMatrix::from_i64(&[&[2, 4], &[0, 1]]));
        assert_eq!(t.denominators(), &[BigInt::from(2), BigInt::one()]);
        // The row is divisible by its denominator, so exponents stay integral.
        let e = t.transformed_exponent_int(&bigs(&[1, 1])).unwrap();
        assert_eq!(e, bigs(&[3, 1]));
    }

    #[test]
    fn non_primitive_lattice_produces_fractional_exponents() {
        let t = build_unimodular_transform(&[bigs(&[2, 0]), bigs(&[1, 1])], 2).unwrap();
        assert_eq!(t.denominators(), &[BigInt::one(), BigInt::from(2)]);
        let e = t.transformed_exponent(&bigs(&[1, 0]));
        assert_eq!(e[1], BigRational::new(BigInt::one(), BigInt::from(2)));
        assert!(t.transformed_exponent_int(&bigs(&[1, 0])).is_err());
    }

    #[test]
    fn full_dimensional_tropism_set_needs_no_completion() {
        let t = build_unimodular_transform(&[bigs(&[0, 1]), bigs(&[1, 0])], 2).unwrap();
        assert_eq!(*t.row_matrix(), IntMatrix::from_i64(&[&[0, 1], &[1, 0]]));
        assert_eq!(t.dim(), 2);
    }

    #[test]
    fn dependent_tropisms_are_rejected() {
        let err = build_unimodular_transform(&[bigs(&[1, 2]), bigs(&[2, 4])], 2).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { rank: 1, expected: 2 }));
    }

    proptest! {
        #[test]
        fn determinant_matches_denominator_product(
            raw in proptest::collection::vec(
                proptest::collection::vec(-9i64..=9, 4),
                1..=3,
            )
        ) {
            let rows: Vec<Vec<BigInt>> = raw.iter().map(|r| bigs(r)).collect();
            let b = IntMatrix::from_rows(rows.clone());
            prop_assume!(b.rank() == rows.len());
            let t = build_unimodular_transform(&rows, 4).unwrap();
            prop_assert!(t.is_unimodular_over_rationals());
            // Tropism rows are preserved verbatim on top.
            for (k, r) in rows.iter().enumerate() {
                prop_assert_eq!(&t.row(k), r);
            }
        }
    }
}
