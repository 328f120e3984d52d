//! Binomial systems `x^A = c` and their exact parametric solutions.
//!
//! A system with two monomials per equation either has no solution in the
//! algebraic torus or its solution set is a finite union of translated
//! subtori. [`solve_binomial`] makes that concrete: a monomial coordinate
//! change turns the first `n - k` variables into free parameters, and the
//! remaining square system is solved exactly by root extraction on its Smith
//! normal form.

use crate::coeff::{cmp_points, Coeff};
use crate::error::{Error, Result};
use crate::linalg::{
    build_unimodular_transform, kernel_basis, smith_normal_form, IntMatrix, UnimodularTransform,
};
use crate::poly::{LaurentPolynomial, PolySystem};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

/// `x^A = c` with one row of `A` per equation and all right-hand sides
/// nonzero. `k` equations in `n >= k` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct BinomialSystem<C: Coeff> {
    a: IntMatrix,
    c: Vec<C>,
}

impl<C: Coeff> BinomialSystem<C> {
    pub fn new(a: IntMatrix, c: Vec<C>) -> Result<Self> {
        let (k, n) = (a.nrows(), a.ncols());
        if k == 0 {
            return Err(Error::EmptySystem);
        }
        if k != c.len() {
            return Err(Error::Shape(format!(
                "{} exponent rows but {} right-hand sides",
                k,
                c.len()
            )));
        }
        if k > n {
            return Err(Error::Shape(format!(
                "{} equations in only {} variables",
                k, n
            )));
        }
        if let Some(i) = c.iter().position(Coeff::is_zero) {
            return Err(Error::Invalid(format!(
                "right-hand side {} is zero; the system has no torus solutions",
                i
            )));
        }
        Ok(BinomialSystem { a, c })
    }

    /// Reads a polynomial system with exactly two terms per equation,
    /// rewriting `c1*x^a + c2*x^b = 0` (terms in the polynomial's stored
    /// order) as `x^(b-a) = -c1/c2`.
    pub fn from_system(sys: &PolySystem<C>) -> Result<Self> {
        let mut rows = Vec::with_capacity(sys.len());
        let mut c = Vec::with_capacity(sys.len());
        for (i, p) in sys.polys.iter().enumerate() {
            let terms: Vec<(&Vec<i64>, &C)> = p.terms().collect();
            match terms.len() {
                2 => {}
                1 => return Err(Error::SingleTerm { index: i }),
                t => return Err(Error::NotBinomial { index: i, terms: t }),
            }
            let (lo_exp, lo_c) = terms[0];
            let (hi_exp, hi_c) = terms[1];
            rows.push(
                hi_exp
                    .iter()
                    .zip(lo_exp.iter())
                    .map(|(h, l)| BigInt::from(h - l))
                    .collect(),
            );
            c.push(lo_c.neg().mul(&hi_c.inv()?));
        }
        BinomialSystem::new(IntMatrix::from_rows(rows), c)
    }

    pub fn exponent_matrix(&self) -> &IntMatrix {
        &self.a
    }

    pub fn constants(&self) -> &[C] {
        &self.c
    }

    pub fn nvars(&self) -> usize {
        self.a.ncols()
    }

    pub fn len(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.a.nrows() == 0
    }

    /// The system as polynomials `x^a - c`, in variables `x0..x{n-1}`.
    pub fn to_system(&self) -> Result<PolySystem<C>> {
        let n = self.nvars();
        let mut polys = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let exp: Vec<i64> = self.a.row(i).iter().map(to_i64).collect::<Result<_>>()?;
            let mut p = LaurentPolynomial::monomial(n, exp, C::one());
            p.add_term(vec![0; n], self.c[i].neg());
            polys.push(p);
        }
        PolySystem::new(polys)
    }
}

/// A `d`-parameter monomial map plus finitely many exact points: under
/// `x = y^M` the first `d` new variables are free parameters and each point
/// lists the values of the remaining `n - d`. Substituting any point with
/// any nonzero parameter values solves the system it came from.
#[derive(Clone, Debug)]
pub struct ParametricSolutionSet<C: Coeff> {
    pub transform: UnimodularTransform,
    /// Number of free parameters (`d`).
    pub parameters: usize,
    /// Values of the last `n - d` transformed variables, one vector per
    /// isolated choice; sorted canonically.
    pub points: Vec<Vec<C>>,
    /// Denominator carried by each parameter's exponents; entries `> 1`
    /// mean the written powers of that parameter are rational.
    pub param_denominators: Vec<BigInt>,
    /// Exponent block of the reduced square system in the last `n - d`
    /// variables.
    pub residual_exponents: IntMatrix,
    /// Right-hand sides of the reduced system (unchanged by the transform).
    pub residual_constants: Vec<C>,
}

impl<C: Coeff> ParametricSolutionSet<C> {
    pub fn nvars(&self) -> usize {
        self.transform.n()
    }

    /// The reduced square system `y^A' = c` as polynomials in the last
    /// `n - d` transformed variables (named to match their positions).
    pub fn residual_system(&self) -> Result<PolySystem<C>> {
        let k = self.residual_exponents.nrows();
        let names: Vec<String> = (0..k).map(|j| format!("y{}", self.parameters + j)).collect();
        let mut polys = Vec::with_capacity(k);
        for i in 0..k {
            let exp: Vec<i64> = self
                .residual_exponents
                .row(i)
                .iter()
                .map(to_i64)
                .collect::<Result<_>>()?;
            let mut p = LaurentPolynomial::monomial(k, exp, C::one());
            p.add_term(vec![0; k], self.residual_constants[i].neg());
            polys.push(p);
        }
        PolySystem::with_names(polys, names)
    }

    /// Evaluates `x = y^M` at point `idx` and the given parameter values.
    ///
    /// Parameters are taken after clearing exponent denominators: when a
    /// parameter row carries denominator `e`, the supplied value `s` stands
    /// for `t = s^e`, so every exponent used here is an integer. As `s`
    /// ranges over the nonzero scalars so does `t`; the set of evaluated
    /// points is unchanged by this reparametrization.
    pub fn point_on_component(&self, params: &[C], idx: usize) -> Result<Vec<C>> {
        if params.len() != self.parameters {
            return Err(Error::Shape(format!(
                "{} parameter values for {} parameters",
                params.len(),
                self.parameters
            )));
        }
        if params.iter().any(Coeff::is_zero) {
            return Err(Error::Invalid("parameter values must be nonzero".into()));
        }
        let point = self
            .points
            .get(idx)
            .ok_or_else(|| Error::Invalid(format!("no point with index {}", idx)))?;
        let n = self.nvars();
        let numer = self.transform.row_matrix();
        let mut x = Vec::with_capacity(n);
        for j in 0..n {
            let mut xj = C::one();
            for (k, base) in params.iter().chain(point.iter()).enumerate() {
                let e = to_i64(&numer[(k, j)])?;
                if e != 0 {
                    xj = xj.mul(&base.pow(e)?);
                }
            }
            x.push(xj);
        }
        Ok(x)
    }

    pub fn to_json(&self) -> Value {
        let numer = self.transform.row_matrix();
        let rows: Vec<Vec<String>> = (0..numer.nrows())
            .map(|i| numer.row(i).iter().map(BigInt::to_string).collect())
            .collect();
        json!({
            "variables": self.nvars(),
            "parameters": self.parameters,
            "transform": {
                "rows": rows,
                "denominators": self.transform.denominators().iter().map(BigInt::to_string).collect::<Vec<_>>(),
            },
            "parameter_denominators": self.param_denominators.iter().map(BigInt::to_string).collect::<Vec<_>>(),
            "residual": {
                "exponents": (0..self.residual_exponents.nrows())
                    .map(|i| self.residual_exponents.row(i).iter().map(BigInt::to_string).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "constants": self.residual_constants.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            },
            "point_count": self.points.len(),
            "points": self.points.iter()
                .map(|p| p.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Solves `x^A = c` for a full-row-rank `A`: the kernel of `A` supplies
/// `d = n - k` parameter directions, a unimodular completion turns them
/// into leading coordinates, and the reduced square system in the trailing
/// `k` coordinates is solved by [`solve_square_binomial`]. Returns the
/// transform together with all `|det|`-many trailing-coordinate points.
pub fn solve_binomial<C: Coeff>(sys: &BinomialSystem<C>) -> Result<ParametricSolutionSet<C>> {
    let (k, n) = (sys.a.nrows(), sys.a.ncols());
    let rank = sys.a.rank();
    if rank < k {
        return Err(Error::RankDeficient { rank, expected: k });
    }
    let d = n - k;
    let transform = if d == 0 {
        UnimodularTransform::identity(n)
    } else {
        let b = kernel_basis(&sys.a);
        debug_assert_eq!(b.nrows(), d);
        let rows: Vec<Vec<BigInt>> = (0..d).map(|i| b.row_vec(i)).collect();
        build_unimodular_transform(&rows, n)?
    };

    // Exponents of each equation in the new coordinates. The first d entries
    // vanish because the parameter rows annihilate every row of A; the rest
    // are integers because completion rows carry denominator one.
    let mut residual_rows = Vec::with_capacity(k);
    for i in 0..k {
        let e = transform.transformed_exponent_int(&sys.a.row_vec(i))?;
        debug_assert!(e[..d].iter().all(Zero::is_zero));
        residual_rows.push(e[d..].to_vec());
    }
    let residual = IntMatrix::from_rows(residual_rows);
    let points = solve_square_binomial(&residual, &sys.c)?;

    Ok(ParametricSolutionSet {
        param_denominators: transform.denominators()[..d].to_vec(),
        transform,
        parameters: d,
        points,
        residual_exponents: residual,
        residual_constants: sys.c.clone(),
    })
}

/// All torus solutions of a square system `y^A = c` with `det A != 0`.
///
/// With the Smith decomposition `U A V = S`, the substitution `y = z^V`
/// and a `U`-power of both sides leave the diagonal system
/// `z_i^{s_i} = prod_j c_j^{U[i][j]}`; each equation contributes its
/// `s_i` extracted roots, and mapping every combination back through `V`
/// yields exactly `|det A|` points, sorted canonically.
pub fn solve_square_binomial<C: Coeff>(a: &IntMatrix, c: &[C]) -> Result<Vec<Vec<C>>> {
    let k = a.nrows();
    if a.ncols() != k {
        return Err(Error::Shape(format!(
            "exponent matrix is {}x{}, expected square",
            k,
            a.ncols()
        )));
    }
    if c.len() != k {
        return Err(Error::Shape(format!(
            "{} right-hand sides for {} equations",
            c.len(),
            k
        )));
    }
    if let Some(i) = c.iter().position(Coeff::is_zero) {
        return Err(Error::Invalid(format!(
            "right-hand side {} is zero; the system has no torus solutions",
            i
        )));
    }
    if k == 0 {
        return Ok(vec![vec![]]);
    }
    let det = a.det()?;
    if det.is_zero() {
        return Err(Error::Singular);
    }

    let smith = smith_normal_form(a);
    let mut root_lists: Vec<Vec<C>> = Vec::with_capacity(k);
    for i in 0..k {
        let mut gamma = C::one();
        for j in 0..k {
            let e = to_i64(&smith.u[(i, j)])?;
            if e != 0 {
                gamma = gamma.mul(&c[j].pow(e)?);
            }
        }
        let s = u32::try_from(&smith.s[(i, i)])
            .map_err(|_| Error::Invalid(format!("diagonal entry {} too large", smith.s[(i, i)])))?;
        root_lists.push(gamma.nth_roots(s)?);
    }

    let total: usize = root_lists.iter().map(Vec::len).product();
    let mut points = Vec::with_capacity(total);
    for flat in 0..total {
        let mut digits = vec![0usize; k];
        let mut rem = flat;
        for i in (0..k).rev() {
            let m = root_lists[i].len();
            digits[i] = rem % m;
            rem /= m;
        }
        let mut y = Vec::with_capacity(k);
        for i in 0..k {
            let mut yi = C::one();
            for j in 0..k {
                let e = to_i64(&smith.v[(i, j)])?;
                if e != 0 {
                    yi = yi.mul(&root_lists[j][digits[j]].pow(e)?);
                }
            }
            y.push(yi);
        }
        points.push(y);
    }
    points.sort_by(|p, q| cmp_points(p, q));
    debug_assert_eq!(BigInt::from(points.len()), det.abs());
    Ok(points)
}

fn to_i64(x: &BigInt) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Invalid(format!("exponent {} out of range", x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{ComplexF64, Cyclotomic};
    use crate::poly::parse_system;
    use num_rational::BigRational;
    use num_traits::One;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(num: i64, den: i64) -> Cyclotomic {
        Cyclotomic::from_rational(&BigRational::new(num.into(), den.into()))
    }

    #[test]
    fn worked_four_variable_example_matches_the_pinned_transform() {
        let sys: PolySystem<Cyclotomic> =
            parse_system("x0^2*x1*x2^4*x3^3 - 1;\nx0*x1*x2*x3 - 1;").unwrap();
        let bin = BinomialSystem::from_system(&sys).unwrap();
        assert_eq!(
            bin.exponent_matrix(),
            &IntMatrix::from_i64(&[&[2, 1, 4, 3], &[1, 1, 1, 1]])
        );
        assert!(bin.constants().iter().all(Coeff::is_one));

        let sol = solve_binomial(&bin).unwrap();
        assert_eq!(sol.parameters, 2);
        // x0 = y0^-3 y1^-2 y2, x1 = y0^2 y1 y3, x2 = y0, x3 = y1.
        assert_eq!(
            sol.transform.column_matrix(),
            IntMatrix::from_i64(&[
                &[-3, -2, 1, 0],
                &[2, 1, 0, 1],
                &[1, 0, 0, 0],
                &[0, 1, 0, 0]
            ])
        );
        assert!(sol.param_denominators.iter().all(One::is_one));

        let expected: PolySystem<Cyclotomic> =
            parse_system("vars: y2,y3;\ny2^2*y3 - 1;\ny2*y3 - 1;").unwrap();
        assert_eq!(sol.residual_system().unwrap(), expected);
        assert_eq!(sol.points, vec![vec![Cyclotomic::one(), Cyclotomic::one()]]);
    }

    #[test]
    fn substituting_points_solves_the_original_system() {
        let sys: PolySystem<Cyclotomic> =
            parse_system("x0^2*x1*x2^4*x3^3 - 1;\nx0*x1*x2*x3 - 1;").unwrap();
        let sol = solve_binomial(&BinomialSystem::from_system(&sys).unwrap()).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let params: Vec<Cyclotomic> = (0..2)
                .map(|_| {
                    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                    q(sign * rng.gen_range(1..=6), rng.gen_range(1..=6))
                })
                .collect();
            let x = sol.point_on_component(&params, 0).unwrap();
            assert!(x.iter().all(|v| !v.is_zero()));
            let vals = sys.evaluate(&x).unwrap();
            assert!(vals.iter().all(Coeff::is_zero));
        }

        // Different parameter values land on different points of the set.
        let a = sol
            .point_on_component(&[Cyclotomic::one(), Cyclotomic::one()], 0)
            .unwrap();
        let b = sol
            .point_on_component(&[Cyclotomic::from_int(2), Cyclotomic::from_int(3)], 0)
            .unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn identity_exponents_give_the_constants_directly() {
        let c = vec![Cyclotomic::from_int(2), Cyclotomic::from_int(-3), q(5, 7)];
        let bin = BinomialSystem::new(IntMatrix::identity(3), c.clone()).unwrap();
        let sol = solve_binomial(&bin).unwrap();
        assert_eq!(sol.parameters, 0);
        assert_eq!(sol.points, vec![c]);
        assert!(sol.transform.row_matrix().is_identity());
    }

    #[test]
    fn one_variable_power_yields_all_roots_of_unity() {
        let bin = BinomialSystem::new(
            IntMatrix::from_i64(&[&[5]]),
            vec![Cyclotomic::one()],
        )
        .unwrap();
        let sol = solve_binomial(&bin).unwrap();
        let mut expected: Vec<Vec<Cyclotomic>> =
            (0..5).map(|j| vec![Cyclotomic::root_of_unity(5, j)]).collect();
        expected.sort_by(|p, q| cmp_points(p, q));
        assert_eq!(sol.points, expected);
    }

    #[test]
    fn diagonal_square_system_is_a_product_of_root_sets() {
        let a = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let pts =
            solve_square_binomial(&a, &[Cyclotomic::one(), Cyclotomic::one()]).unwrap();
        assert_eq!(pts.len(), 6);
        for p in &pts {
            assert!(p[0].pow(2).unwrap().is_one());
            assert!(p[1].pow(3).unwrap().is_one());
        }
        // All six square-root x cube-root combinations occur.
        let mut expected: Vec<Vec<Cyclotomic>> = (0..2)
            .flat_map(|i| {
                (0..3).map(move |j| {
                    vec![Cyclotomic::root_of_unity(2, i), Cyclotomic::root_of_unity(3, j)]
                })
            })
            .collect();
        expected.sort_by(|p, q| cmp_points(p, q));
        assert_eq!(pts, expected);
    }

    #[test]
    fn lower_triangular_pattern_has_determinant_many_points() {
        // t0^-3 t1^-1 = c0, t1 = c1: three points for any nonzero data.
        let a = IntMatrix::from_i64(&[&[-3, -1], &[0, 1]]);
        let c0 = Cyclotomic::root_of_unity(9, 1).mul(&q(1, 8));
        let c1 = Cyclotomic::root_of_unity(3, 1);
        let pts = solve_square_binomial(&a, &[c0.clone(), c1.clone()]).unwrap();
        assert_eq!(pts.len(), 3);
        for p in &pts {
            let lhs0 = p[0].pow(-3).unwrap().mul(&p[1].pow(-1).unwrap());
            assert!(lhs0.sub(&c0).is_zero());
            assert!(p[1].sub(&c1).is_zero());
        }
        // Distinct points.
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                assert_ne!(pts[i], pts[j]);
            }
        }
    }

    #[test]
    fn mixed_sign_two_term_equations_normalize() {
        let sys: PolySystem<Cyclotomic> = parse_system("2*x0^2 - 3*x1;").unwrap();
        let bin = BinomialSystem::from_system(&sys).unwrap();
        assert_eq!(bin.exponent_matrix(), &IntMatrix::from_i64(&[&[2, -1]]));
        assert_eq!(bin.constants(), &[q(3, 2)]);

        let sol = solve_binomial(&bin).unwrap();
        assert_eq!(sol.parameters, 1);
        assert_eq!(sol.points, vec![vec![q(2, 3)]]);
        let x = sol.point_on_component(&[Cyclotomic::from_int(5)], 0).unwrap();
        assert!(sys.evaluate(&x).unwrap().iter().all(Coeff::is_zero));
    }

    #[test]
    fn rank_deficient_exponent_rows_are_rejected() {
        let bin = BinomialSystem::new(
            IntMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]),
            vec![Cyclotomic::one(), Cyclotomic::from_int(2)],
        )
        .unwrap();
        assert!(matches!(
            solve_binomial(&bin),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let zero_rhs = BinomialSystem::new(
            IntMatrix::identity(2),
            vec![Cyclotomic::one(), Cyclotomic::zero()],
        );
        assert!(matches!(zero_rhs, Err(Error::Invalid(_))));

        let singular = solve_square_binomial(
            &IntMatrix::from_i64(&[&[1, 1], &[1, 1]]),
            &[Cyclotomic::one(), Cyclotomic::one()],
        );
        assert!(matches!(singular, Err(Error::Singular)));

        let sys: PolySystem<Cyclotomic> = parse_system("x0 + x1 + 1;").unwrap();
        assert!(matches!(
            BinomialSystem::from_system(&sys),
            Err(Error::NotBinomial { index: 0, terms: 3 })
        ));
        let sys: PolySystem<Cyclotomic> = parse_system("x0^2*x1;").unwrap();
        assert!(matches!(
            BinomialSystem::from_system(&sys),
            Err(Error::SingleTerm { index: 0 })
        ));
    }

    #[test]
    fn non_unity_roots_fall_back_to_the_float_domain() {
        // Square root of 2 is not exact here...
        let exact = BinomialSystem::new(
            IntMatrix::from_i64(&[&[2]]),
            vec![Cyclotomic::from_int(2)],
        )
        .unwrap();
        assert!(matches!(
            solve_binomial(&exact),
            Err(Error::RootExtraction { .. })
        ));

        // ...but the float domain returns both branches.
        let float = BinomialSystem::new(
            IntMatrix::from_i64(&[&[2]]),
            vec![ComplexF64::from_int(2)],
        )
        .unwrap();
        let sol = solve_binomial(&float).unwrap();
        assert_eq!(sol.points.len(), 2);
        for p in &sol.points {
            let sq = p[0].mul(&p[0]);
            assert!(sq.sub(&ComplexF64::from_int(2)).is_zero());
        }
    }

    proptest! {
        #[test]
        fn random_exact_systems_check_out(
            n in 1usize..=4,
            seed in 0u64..500,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = rng.gen_range(1..=n);
            let rows: Vec<Vec<BigInt>> = (0..k)
                .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-3i64..=3))).collect())
                .collect();
            let c: Vec<Cyclotomic> = (0..k)
                .map(|_| {
                    let m = rng.gen_range(1u32..=4);
                    Cyclotomic::root_of_unity(m, rng.gen_range(0..m))
                })
                .collect();
            let Ok(bin) = BinomialSystem::new(IntMatrix::from_rows(rows), c) else {
                return Ok(());
            };
            let sol = match solve_binomial(&bin) {
                Ok(sol) => sol,
                // Rank-deficient draws carry no d-dimensional component.
                Err(Error::RankDeficient { .. }) => return Ok(()),
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            };

            // Point count equals |det| of the residual block.
            let det = sol.residual_exponents.det().unwrap();
            prop_assert_eq!(BigInt::from(sol.points.len()), det.abs());

            // Every point solves the system for random nonzero parameters.
            let polys = bin.to_system().unwrap();
            for idx in 0..sol.points.len() {
                prop_assert!(sol.points[idx].iter().all(|v| !v.is_zero()));
                let params: Vec<Cyclotomic> = (0..sol.parameters)
                    .map(|_| {
                        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                        q(sign * rng.gen_range(1..=4), rng.gen_range(1..=4))
                    })
                    .collect();
                let x = sol.point_on_component(&params, idx).unwrap();
                let vals = polys.evaluate(&x).unwrap();
                prop_assert!(vals.iter().all(Coeff::is_zero));
            }
        }
    }
}
