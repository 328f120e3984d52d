//! Built-in benchmark systems, available to the library and through the
//! command-line registry (`cyclic:n`, `illus3`).

use num_rational::BigRational;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::poly::{LaurentPolynomial, PolySystem};

/// The cyclic n-roots system: for each k = 1..n-1 the sum over all cyclic
/// windows of length k of the product of k consecutive variables, and
/// finally the product of all variables minus one.
pub fn cyclic_system<C: Coeff>(n: usize) -> Result<PolySystem<C>> {
    if n < 2 {
        return Err(Error::Invalid(format!(
            "cyclic system needs at least 2 variables, got {}",
            n
        )));
    }
    let mut polys = Vec::with_capacity(n);
    for k in 1..n {
        let mut f = LaurentPolynomial::zero(n);
        for start in 0..n {
            let mut exp = vec![0i64; n];
            for j in 0..k {
                exp[(start + j) % n] += 1;
            }
            f.add_term(exp, C::one());
        }
        polys.push(f);
    }
    let mut last = LaurentPolynomial::monomial(n, vec![1; n], C::one());
    last.add_term(vec![0; n], C::one().neg());
    polys.push(last);
    PolySystem::new(polys)
}

/// Three polynomials in (x, y, z) whose solution set decomposes into the
/// unit sphere, four curves, and one isolated point; a small but fully
/// featured testbed for the polytope machinery.
pub fn illus3<C: Coeff>() -> PolySystem<C> {
    let n = 3;
    let x = LaurentPolynomial::<C>::variable(n, 0);
    let y = LaurentPolynomial::<C>::variable(n, 1);
    let z = LaurentPolynomial::<C>::variable(n, 2);
    let one = LaurentPolynomial::<C>::one(n);
    let half = LaurentPolynomial::<C>::constant(
        n,
        C::from_rational(&BigRational::new(1.into(), 2.into())),
    );

    let sphere = x
        .mul(&x)
        .add(&y.mul(&y))
        .add(&z.mul(&z))
        .sub(&one);
    let parabola = y.sub(&x.mul(&x)); // y - x^2
    let cubic = z.sub(&x.mul(&x).mul(&x)); // z - x^3

    let f1 = parabola.mul(&sphere).mul(&x.sub(&half));
    let f2 = cubic.mul(&sphere).mul(&y.sub(&half));
    let f3 = parabola.mul(&cubic).mul(&sphere).mul(&z.sub(&half));
    PolySystem::with_names(
        vec![f1, f2, f3],
        vec!["x".into(), "y".into(), "z".into()],
    )
    .expect("fixed shape")
}

/// Resolves a registry name: `cyclic:<n>` or `illus3`. Returns `None` when
/// the name is not a registry entry (so callers can fall back to reading a
/// file).
pub fn builtin_system<C: Coeff>(name: &str) -> Option<Result<PolySystem<C>>> {
    if let Some(rest) = name.strip_prefix("cyclic:") {
        let sys = match rest.parse::<usize>() {
            Ok(n) => cyclic_system(n),
            Err(_) => Err(Error::Invalid(format!(
                "bad cyclic system size '{}'",
                rest
            ))),
        };
        return Some(sys);
    }
    if name == "illus3" {
        return Some(Ok(illus3()));
    }
    None
}
