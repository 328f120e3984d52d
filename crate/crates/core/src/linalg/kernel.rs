use super::matrix::{lex_cmp, make_primitive, IntMatrix, RatMatrix};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Primitive integer basis of the right kernel of `a` (vectors `k` with
/// `a * k = 0`), one basis vector per row of the result.
///
/// The basis is canonical: it comes from the reduced row echelon form of `a`,
/// so each vector carries a 1 in "its" free column and 0 in the other free
/// columns, is scaled integer-primitive with positive free coordinate, and the
/// rows are sorted lexicographically.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let n = a.ncols();
    let mut m = a.to_rational();
    let pivot_cols = m.rref();
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();

    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(free_cols.len());
    for &f in &free_cols {
        // x_f = 1, other free coords 0; pivot coords read off the RREF.
        let mut num: Vec<num_rational::BigRational> =
            vec![num_rational::BigRational::zero(); n];
        num[f] = num_rational::BigRational::from_integer(BigInt::from(1));
        for (r, &p) in pivot_cols.iter().enumerate() {
            num[p] = -m[(r, f)].clone();
        }
        // Clear denominators, then strip the content.
        let mut lcm = BigInt::from(1);
        for q in &num {
            lcm = num_integer::lcm(lcm, q.denom().clone());
        }
        let mut row: Vec<BigInt> = num.iter().map(|q| q.numer() * &lcm / q.denom()).collect();
        make_primitive(&mut row);
        if row[f].is_negative() {
            for x in row.iter_mut() {
                *x = -(x.clone());
            }
        }
        rows.push(row);
    }
    rows.sort_by(|x, y| lex_cmp(x, y));
    if rows.is_empty() {
        IntMatrix::zero(0, n)
    } else {
        IntMatrix::from_rows(rows)
    }
}

/// Rank of an integer matrix via exact rational elimination.
pub fn rank(a: &IntMatrix) -> usize {
    a.rank()
}

#[allow(unused)]
fn rational(a: &IntMatrix) -> RatMatrix {
    a.to_rational()
}
