use super::matrix::IntMatrix;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Smith normal form witness: `u * b * v = s` with `u`, `v` unimodular and `s`
/// diagonal, nonnegative, each diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.nrows().min(self.s.ncols());
        (0..n).map(|i| self.s[(i, i)].clone()).collect()
    }
}

/// Hermite normal form witness: `u * b = h` with `u` unimodular and `h` upper
/// triangular once its columns are read in `colperm` order (pivot columns
/// first, in the order pivots were found; remaining columns after, in their
/// original relative order). Pivots are positive and entries above each pivot
/// are reduced into `[0, pivot)`.
#[derive(Clone, Debug)]
pub struct HermiteDecomposition {
    pub u: IntMatrix,
    pub h: IntMatrix,
    pub colperm: Vec<usize>,
}

impl HermiteDecomposition {
    pub fn pivot_cols(&self) -> &[usize] {
        &self.colperm[..self.h.nrows().min(self.colperm.len())]
    }

    /// Diagonal of the permuted triangular form: entry i is `h[i, pivot_i]`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        self.pivot_cols().iter().enumerate().map(|(i, &c)| self.h[(i, c)].clone()).collect()
    }
}

/// Position of the entry with the smallest nonzero absolute value in the
/// trailing submatrix starting at (k, k); ties broken by lowest (row, col).
fn min_abs_pivot(m: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in k..m.nrows() {
        for j in k..m.ncols() {
            let x = &m[(i, j)];
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            match &best {
                Some((b, _, _)) if *b <= a => {}
                _ => best = Some((a, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Smith normal form by repeated gcd-pivot elimination. Deterministic: the
/// pivot is always the smallest nonzero absolute value in the trailing block,
/// ties broken by lowest (row, col).
pub fn smith_normal_form(b: &IntMatrix) -> SmithDecomposition {
    let (r, c) = (b.nrows(), b.ncols());
    let mut s = b.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for k in 0..r.min(c) {
        'pivot: loop {
            let Some((pi, pj)) = min_abs_pivot(&s, k) else {
                break 'pivot; // trailing block is zero
            };
            s.swap_rows(k, pi);
            u.swap_rows(k, pi);
            s.swap_cols(k, pj);
            v.swap_cols(k, pj);

            // Clear the pivot column with row operations.
            let mut dirty = false;
            for i in k + 1..r {
                if s[(i, k)].is_zero() {
                    continue;
                }
                let q = s[(i, k)].div_floor(&s[(k, k)]);
                s.add_row_multiple(i, k, &(-&q));
                u.add_row_multiple(i, k, &(-q));
                if !s[(i, k)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivot;
            }
            // Clear the pivot row with column operations.
            for j in k + 1..c {
                if s[(k, j)].is_zero() {
                    continue;
                }
                let q = s[(k, j)].div_floor(&s[(k, k)]);
                s.add_col_multiple(j, k, &(-&q));
                v.add_col_multiple(j, k, &(-q));
                if !s[(k, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivot;
            }
            // Divisibility: fold in any entry the pivot does not divide.
            for i in k + 1..r {
                for j in k + 1..c {
                    if !s[(i, j)].mod_floor(&s[(k, k)]).is_zero() {
                        let one = BigInt::one();
                        s.add_row_multiple(k, i, &one);
                        u.add_row_multiple(k, i, &one);
                        continue 'pivot;
                    }
                }
            }
            if s[(k, k)].is_negative() {
                s.negate_row(k);
                u.negate_row(k);
            }
            break 'pivot;
        }
    }
    SmithDecomposition { u, s, v }
}

/// Hermite normal form using row operations only. Columns are scanned left to
/// right; a column with no nonzero entry at or below the current row
/// contributes no pivot and is recorded after all pivot columns in `colperm`
/// (stable order). The form is fully reduced: positive pivots, entries above
/// each pivot in `[0, pivot)`.
///
/// Requires full row rank; otherwise reports the achieved rank.
pub fn hermite_normal_form(b: &IntMatrix) -> Result<HermiteDecomposition> {
    let (rows, cols) = (b.nrows(), b.ncols());
    let mut h = b.clone();
    let mut u = IntMatrix::identity(rows);
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;

    for c in 0..cols {
        if r == rows {
            break;
        }
        // Euclidean elimination below the working row in column c.
        loop {
            let mut best: Option<(BigInt, usize)> = None;
            for i in r..rows {
                let x = &h[(i, c)];
                if x.is_zero() {
                    continue;
                }
                let a = x.abs();
                match &best {
                    Some((bst, _)) if *bst <= a => {}
                    _ => best = Some((a, i)),
                }
            }
            let Some((_, pi)) = best else {
                break;
            };
            h.swap_rows(r, pi);
            u.swap_rows(r, pi);
            let mut dirty = false;
            for i in r + 1..rows {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = h[(i, c)].div_floor(&h[(r, c)]);
                h.add_row_multiple(i, r, &(-&q));
                u.add_row_multiple(i, r, &(-q));
                if !h[(i, c)].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                if h[(r, c)].is_negative() {
                    h.negate_row(r);
                    u.negate_row(r);
                }
                // Reduce the entries above the pivot into [0, pivot).
                for i in 0..r {
                    let q = h[(i, c)].div_floor(&h[(r, c)]);
                    if !q.is_zero() {
                        h.add_row_multiple(i, r, &(-&q));
                        u.add_row_multiple(i, r, &(-q));
                    }
                }
                pivots.push(c);
                r += 1;
                break;
            }
        }
    }

    if r < rows {
        return Err(Error::RankDeficient { rank: r, expected: rows });
    }
    let mut colperm = pivots.clone();
    colperm.extend((0..cols).filter(|c| !pivots.contains(c)));
    Ok(HermiteDecomposition { u, h, colperm })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_smith(b: &IntMatrix) {
        let d = smith_normal_form(b);
        assert_eq!(d.u.mul(b).mul(&d.v), d.s, "u*b*v != s");
        assert_eq!(d.u.det().unwrap().abs(), BigInt::one());
        assert_eq!(d.v.det().unwrap().abs(), BigInt::one());
        let diag = d.diagonal();
        for i in 0..diag.len() {
            assert!(!diag[i].is_negative());
            if i + 1 < diag.len() && !diag[i + 1].is_zero() {
                assert!(
                    !diag[i].is_zero() && diag[i + 1].mod_floor(&diag[i]).is_zero(),
                    "divisibility chain broken: {:?}",
                    diag
                );
            }
        }
        // Off-diagonal entries vanish.
        for i in 0..d.s.nrows() {
            for j in 0..d.s.ncols() {
                if i != j {
                    assert!(d.s[(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn smith_of_workbench_kernel_basis() {
        // Independently reduced by hand: gcd of entries 1, all 2x2 minors
        // have gcd 1, so the invariant factors are (1, 1).
        let b = IntMatrix::from_i64(&[&[-3, 2, 1, 0], &[-2, 1, 0, 1]]);
        check_smith(&b);
        let d = smith_normal_form(&b);
        assert_eq!(d.diagonal(), vec![BigInt::one(), BigInt::one()]);
    }

    #[test]
    fn smith_of_two_by_four_sample() {
        // Oracle (independent minor-gcd computation): gcd of entries is 1;
        // gcd of the six 2x2 minors (4, -42, -30, -160, -108, -66) is 2,
        // so the invariant factors are (1, 2).
        let b = IntMatrix::from_i64(&[&[2, 6, 17, 9], &[4, 14, 13, 3]]);
        check_smith(&b);
        let d = smith_normal_form(&b);
        assert_eq!(d.diagonal(), vec![BigInt::one(), BigInt::from(2)]);
    }

    #[test]
    fn smith_of_zero_matrix_is_zero_with_identity_witnesses() {
        let b = IntMatrix::zero(2, 3);
        let d = smith_normal_form(&b);
        assert!(d.u.is_identity());
        assert!(d.v.is_identity());
        assert_eq!(d.s, b);
    }

    #[test]
    fn hermite_of_two_by_four_sample() {
        // Oracle (independent row reduction): r1 -= 2*r0 gives
        // [[2,6,17,9],[0,2,-21,-15]]; reducing above the second pivot gives
        // [[2,0,80,54],[0,2,-21,-15]] with pivot columns (0, 1).
        let b = IntMatrix::from_i64(&[&[2, 6, 17, 9], &[4, 14, 13, 3]]);
        let d = hermite_normal_form(&b).unwrap();
        assert_eq!(d.u.mul(&b), d.h);
        assert_eq!(d.u.det().unwrap().abs(), BigInt::one());
        assert_eq!(d.pivot_cols(), &[0, 1]);
        assert_eq!(d.diagonal(), vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(d.h, IntMatrix::from_i64(&[&[2, 0, 80, 54], &[0, 2, -21, -15]]));
    }

    #[test]
    fn hermite_moves_zero_columns_right() {
        let b = IntMatrix::from_i64(&[&[0, 2, 1], &[0, 0, 3]]);
        let d = hermite_normal_form(&b).unwrap();
        assert_eq!(d.colperm, vec![1, 2, 0]);
        assert_eq!(d.u.mul(&b), d.h);
    }

    #[test]
    fn hermite_rejects_rank_deficiency() {
        let b = IntMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        match hermite_normal_form(&b) {
            Err(Error::RankDeficient { rank: 1, expected: 2 }) => {}
            other => panic!("expected rank deficiency, got {:?}", other.map(|d| d.h)),
        }
    }
}
