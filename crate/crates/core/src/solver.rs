//! Backends for the all-coordinates-nonzero solutions of transformed
//! initial-form systems: exact binomial dispatch when the reduced system is
//! binomial with isolated solutions, and an exhaustive roots-of-unity grid
//! otherwise. Points are always verified against every equation before
//! being returned — the grid accepts overdetermined input.

use crate::binomial::{solve_binomial, BinomialSystem};
use crate::coeff::{cmp_points, Coeff};
use crate::error::{Error, Result};
use crate::poly::{LaurentPolynomial, PolySystem};
use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Binomial dispatch when it yields isolated points, grid otherwise.
    Auto,
    Binomial,
    Grid,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "binomial" => Ok(Backend::Binomial),
            "grid" => Ok(Backend::Grid),
            other => Err(Error::Invalid(format!("unknown backend '{}'", other))),
        }
    }
}

/// Solver knobs. `seed` is carried along for downstream randomized steps;
/// the built-in backends themselves are deterministic.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub backend: Backend,
    /// The grid assigns m-th roots of unity for this order m.
    pub roots_order: u32,
    /// Enumeration aborts with a size error rather than exceeding this.
    pub max_grid: u64,
    /// Zero threshold on residual moduli in the float domain.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            backend: Backend::Auto,
            roots_order: 2,
            max_grid: 1_000_000,
            tolerance: 1e-10,
            seed: 0,
        }
    }
}

/// What is known about a returned solution's local structure. Binomial
/// dispatch proves regularity (nonsingular exponent block); the grid
/// proves nothing beyond membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Unknown,
    Regular,
}

/// A verified solution with all coordinates nonzero.
#[derive(Clone, Debug)]
pub struct SolutionPoint<C: Coeff> {
    pub coordinates: Vec<C>,
    /// Max residual modulus over the equations; exactly 0 in exact domains.
    pub residual: f64,
    pub multiplicity: Multiplicity,
}

/// Per-equation verdicts for a candidate point.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    /// Whether the verdicts are exact (no tolerance involved).
    pub exact: bool,
    pub zero: Vec<bool>,
    /// Rendered residual value of each equation.
    pub values: Vec<String>,
    /// Largest residual modulus, when the domain has one.
    pub max_magnitude: Option<f64>,
}

impl ResidualReport {
    pub fn all_zero(&self) -> bool {
        self.zero.iter().all(|&z| z)
    }
}

/// Divides every equation by its monomial content and then drops the first
/// `d` coordinates, which must no longer occur in any term. This turns a
/// transformed initial-form system — whose leading exponents are constant
/// within each equation — into a system in the trailing unknowns only.
pub fn strip_parameters<C: Coeff>(sys: &PolySystem<C>, d: usize) -> Result<PolySystem<C>> {
    if d >= sys.nvars {
        return Err(Error::Shape(format!(
            "cannot drop {} of {} variables",
            d, sys.nvars
        )));
    }
    let mut polys = Vec::with_capacity(sys.len());
    for (i, p) in sys.polys.iter().enumerate() {
        if p.is_zero() {
            return Err(Error::Invalid(format!("equation {} is identically zero", i)));
        }
        let mut min: Vec<i64> = p.terms().next().unwrap().0.clone();
        for (e, _) in p.terms().skip(1) {
            for (m, &x) in min.iter_mut().zip(e.iter()) {
                *m = (*m).min(x);
            }
        }
        let mut q = LaurentPolynomial::zero(sys.nvars - d);
        for (e, c) in p.terms() {
            let shifted: Vec<i64> = e.iter().zip(&min).map(|(x, m)| x - m).collect();
            if shifted[..d].iter().any(|&x| x != 0) {
                return Err(Error::Shape(format!(
                    "equation {} still involves one of the first {} variables",
                    i, d
                )));
            }
            q.add_term(shifted[d..].to_vec(), c.clone());
        }
        polys.push(q);
    }
    PolySystem::with_names(polys, sys.var_names[d..].to_vec())
}

pub fn solve_initial_form<C: Coeff>(
    f: &PolySystem<C>,
    cfg: &SolverConfig,
) -> Result<Vec<SolutionPoint<C>>> {
    solve_initial_form_with(f, cfg, 1)
}

/// Like [`solve_initial_form`], with the grid scan split over `threads`
/// worker threads. The result does not depend on the thread count.
pub fn solve_initial_form_with<C: Coeff>(
    f: &PolySystem<C>,
    cfg: &SolverConfig,
    threads: usize,
) -> Result<Vec<SolutionPoint<C>>> {
    for (i, p) in f.polys.iter().enumerate() {
        match p.num_terms() {
            0 => return Err(Error::Invalid(format!("equation {} is identically zero", i))),
            1 => return Err(Error::SingleTerm { index: i }),
            _ => {}
        }
    }
    match cfg.backend {
        Backend::Binomial => dispatch_binomial(f, cfg)?.ok_or_else(|| {
            Error::Invalid(
                "binomial dispatch does not apply: no isolated torus solutions in this form"
                    .into(),
            )
        }),
        Backend::Grid => grid_search(f, cfg, threads),
        Backend::Auto => {
            if f.polys.iter().all(|p| p.num_terms() == 2) {
                if let Some(points) = dispatch_binomial(f, cfg)? {
                    return Ok(points);
                }
            }
            grid_search(f, cfg, threads)
        }
    }
}

/// Evaluates every equation at the point and reports exact or tolerance
/// verdicts, depending on the domain.
pub fn verify_point<C: Coeff>(
    f: &PolySystem<C>,
    coordinates: &[C],
    tolerance: f64,
) -> Result<ResidualReport> {
    let mut zero = Vec::with_capacity(f.len());
    let mut values = Vec::with_capacity(f.len());
    let mut max_magnitude: Option<f64> = None;
    for p in &f.polys {
        let v = p.evaluate(coordinates)?;
        let verdict = match v.magnitude() {
            Some(m) => {
                max_magnitude = Some(max_magnitude.map_or(m, |x| x.max(m)));
                m <= tolerance
            }
            None => v.is_zero(),
        };
        zero.push(verdict);
        values.push(v.to_string());
    }
    Ok(ResidualReport {
        exact: C::is_exact(),
        zero,
        values,
        max_magnitude,
    })
}

/// `Ok(None)` means the dispatch is inapplicable (the system is not square
/// of full rank after parameter elimination) and the caller should fall
/// back to the grid; hard errors (zero right-hand side, failed exact root
/// extraction) surface as errors.
fn dispatch_binomial<C: Coeff>(
    f: &PolySystem<C>,
    cfg: &SolverConfig,
) -> Result<Option<Vec<SolutionPoint<C>>>> {
    let bin = match BinomialSystem::from_system(f) {
        Ok(b) => b,
        Err(Error::Shape(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let sol = match solve_binomial(&bin) {
        Ok(s) => s,
        Err(Error::RankDeficient { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    if sol.parameters > 0 {
        return Ok(None);
    }
    let mut points = Vec::with_capacity(sol.points.len());
    for coordinates in sol.points {
        let report = verify_point(f, &coordinates, cfg.tolerance)?;
        debug_assert!(report.all_zero());
        points.push(SolutionPoint {
            coordinates,
            residual: report.max_magnitude.unwrap_or(0.0),
            multiplicity: Multiplicity::Regular,
        });
    }
    Ok(Some(points))
}

fn grid_search<C: Coeff>(
    f: &PolySystem<C>,
    cfg: &SolverConfig,
    threads: usize,
) -> Result<Vec<SolutionPoint<C>>> {
    if cfg.roots_order == 0 {
        return Err(Error::Invalid("roots order must be positive".into()));
    }
    let n = f.nvars;
    let size = u128::from(cfg.roots_order)
        .checked_pow(n as u32)
        .ok_or_else(|| Error::EnumerationCap {
            size: u128::MAX,
            cap: cfg.max_grid,
        })?;
    if size > u128::from(cfg.max_grid) {
        return Err(Error::EnumerationCap {
            size,
            cap: cfg.max_grid,
        });
    }
    let total = size as usize;
    let roots: Vec<C> = (0..cfg.roots_order)
        .map(|k| C::root_of_unity(cfg.roots_order, k))
        .collect();

    let workers = threads.max(1).min(total.max(1));
    let chunk = total.div_ceil(workers);
    let found: Vec<(Vec<C>, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|t| {
                let lo = t * chunk;
                let hi = ((t + 1) * chunk).min(total);
                let roots = &roots;
                scope.spawn(move || {
                    let mut hits = Vec::new();
                    let mut point = vec![C::one(); n];
                    for flat in lo..hi {
                        let mut rem = flat;
                        for j in (0..n).rev() {
                            point[j] = roots[rem % roots.len()].clone();
                            rem /= roots.len();
                        }
                        if let Some(residual) = residual_if_zero(f, &point, cfg.tolerance) {
                            hits.push((point.clone(), residual));
                        }
                    }
                    hits
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("grid worker panicked"))
            .collect()
    });

    let mut points: Vec<SolutionPoint<C>> = found
        .into_iter()
        .map(|(coordinates, residual)| SolutionPoint {
            coordinates,
            residual,
            multiplicity: Multiplicity::Unknown,
        })
        .collect();
    points.sort_by(|a, b| cmp_points(&a.coordinates, &b.coordinates));
    points.dedup_by(|a, b| cmp_points(&a.coordinates, &b.coordinates) == Ordering::Equal);
    Ok(points)
}

/// Max residual modulus when the point satisfies every equation, `None` as
/// soon as one equation fails.
fn residual_if_zero<C: Coeff>(f: &PolySystem<C>, point: &[C], tol: f64) -> Option<f64> {
    let mut max = 0.0f64;
    for p in &f.polys {
        let v = p.evaluate(point).ok()?;
        match v.magnitude() {
            Some(m) => {
                if m > tol {
                    return None;
                }
                max = max.max(m);
            }
            None => {
                if !v.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Cyclotomic;
    use crate::linalg::build_unimodular_transform;
    use crate::poly::parse_system;
    use crate::polytope::initial_form_system;
    use crate::systems::cyclic_system;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn w3(k: u32) -> Cyclotomic {
        Cyclotomic::root_of_unity(3, k)
    }

    #[test]
    fn binomial_pairs_dispatch_to_the_exact_solver() {
        let f: PolySystem<Cyclotomic> =
            parse_system("vars: y2,y3;\ny2^2*y3 - 1;\ny2*y3 - 1;").unwrap();
        let sols = solve_initial_form(&f, &SolverConfig::default()).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].coordinates, vec![Cyclotomic::one(), Cyclotomic::one()]);
        assert_eq!(sols[0].residual, 0.0);
        assert_eq!(sols[0].multiplicity, Multiplicity::Regular);
    }

    #[test]
    fn grid_recovers_the_nine_variable_benchmark_point() {
        let u = vec![1i64, 1, -2, 1, 1, -2, 1, 1, -2];
        let v = vec![0i64, 1, -1, 0, 1, -1, 0, 1, -1];
        let c9: PolySystem<Cyclotomic> = cyclic_system(9).unwrap();
        let init = initial_form_system(&c9, &[u.clone(), v.clone()]).unwrap();
        let big = |w: &[i64]| w.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let m = build_unimodular_transform(&[big(&u), big(&v)], 9).unwrap();
        let transformed = init.substitute_monomial_transform(&m).unwrap();
        let stripped = strip_parameters(&transformed, 2).unwrap();
        assert_eq!(stripped.nvars, 7);

        let cfg = SolverConfig { roots_order: 3, ..Default::default() };
        let sols = solve_initial_form(&stripped, &cfg).unwrap();
        let target = vec![w3(2), w3(1), w3(1), w3(0), w3(2), w3(2), w3(1)];
        assert!(sols.iter().any(|s| s.coordinates == target));
        for s in &sols {
            assert!(s.coordinates.iter().all(|c| !c.is_zero()));
            assert_eq!(s.residual, 0.0);
            assert_eq!(s.multiplicity, Multiplicity::Unknown);
            assert!(verify_point(&stripped, &s.coordinates, 1e-10).unwrap().all_zero());
        }
    }

    #[test]
    fn grid_and_binomial_backends_agree_on_binomial_instances() {
        let f: PolySystem<Cyclotomic> = parse_system("x0^2 - 1;\nx1^3 - 1;").unwrap();
        let from_binomial = solve_initial_form(
            &f,
            &SolverConfig { backend: Backend::Binomial, ..Default::default() },
        )
        .unwrap();
        let from_grid = solve_initial_form(
            &f,
            &SolverConfig {
                backend: Backend::Grid,
                roots_order: 6,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(from_binomial.len(), 6);
        let a: Vec<_> = from_binomial.iter().map(|s| s.coordinates.clone()).collect();
        let b: Vec<_> = from_grid.iter().map(|s| s.coordinates.clone()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_equations_are_rejected() {
        let f: PolySystem<Cyclotomic> = parse_system("x0*x1;\nx0 - 1;").unwrap();
        assert!(matches!(
            solve_initial_form(&f, &SolverConfig::default()),
            Err(Error::SingleTerm { index: 0 })
        ));

        let zero = PolySystem::new(vec![LaurentPolynomial::<Cyclotomic>::zero(2)]).unwrap();
        assert!(matches!(
            solve_initial_form(&zero, &SolverConfig::default()),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn enumeration_stops_at_the_cap() {
        let f: PolySystem<Cyclotomic> =
            parse_system("x0 + x1 + x2 + x3 + x4 - 5;").unwrap();
        let cfg = SolverConfig {
            backend: Backend::Grid,
            roots_order: 3,
            max_grid: 100,
            ..Default::default()
        };
        assert!(matches!(
            solve_initial_form(&f, &cfg),
            Err(Error::EnumerationCap { size: 243, cap: 100 })
        ));
    }

    #[test]
    fn parameter_stripping_drops_constant_leading_exponents() {
        let sys: PolySystem<Cyclotomic> =
            parse_system("vars: y0,y1,y2;\ny0^3*y1 - y0^3*y2;").unwrap();
        let stripped = strip_parameters(&sys, 1).unwrap();
        let expected: PolySystem<Cyclotomic> = parse_system("vars: y1,y2;\ny1 - y2;").unwrap();
        assert_eq!(stripped, expected);

        let bad: PolySystem<Cyclotomic> = parse_system("vars: y0,y1,y2;\ny0*y1 - y2;").unwrap();
        assert!(matches!(strip_parameters(&bad, 1), Err(Error::Shape(_))));
    }

    #[test]
    fn verification_reports_exact_verdicts() {
        let c9: PolySystem<Cyclotomic> = cyclic_system(9).unwrap();
        // Block pattern (1,1,u^2 | u,u,1 | u^2,u^2,u) with u a cube root of
        // unity lies on the solution set.
        let point = vec![
            w3(0), w3(0), w3(2),
            w3(1), w3(1), w3(0),
            w3(2), w3(2), w3(1),
        ];
        let report = verify_point(&c9, &point, 1e-10).unwrap();
        assert!(report.exact);
        assert!(report.all_zero());
        assert!(report.max_magnitude.is_none());

        // Fourth-roots-of-unity blocks solve the sixteen-variable analogue.
        let c16: PolySystem<Cyclotomic> = cyclic_system(16).unwrap();
        let point16: Vec<Cyclotomic> = (0..16)
            .map(|j| Cyclotomic::root_of_unity(4, j / 4))
            .collect();
        assert!(verify_point(&c16, &point16, 1e-10).unwrap().all_zero());

        // The all-ones point misses: the first equation sums to nine.
        let ones = vec![Cyclotomic::one(); 9];
        let report = verify_point(&c9, &ones, 1e-10).unwrap();
        assert!(!report.all_zero());
        assert!(!report.zero[0]);
        assert_eq!(report.values[0], "9");
    }

    proptest! {
        #[test]
        fn chunked_grid_matches_naive_enumeration(
            seed in 0u64..200,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1usize..=3);
            let m = rng.gen_range(1u32..=3);
            let npolys = rng.gen_range(1usize..=3);
            let polys: Vec<LaurentPolynomial<Cyclotomic>> = (0..npolys)
                .map(|_| {
                    let mut p = LaurentPolynomial::zero(n);
                    for _ in 0..rng.gen_range(2usize..=3) {
                        let exp: Vec<i64> =
                            (0..n).map(|_| rng.gen_range(-2i64..=2)).collect();
                        let k = rng.gen_range(0..m);
                        p.add_term(exp, Cyclotomic::root_of_unity(m, k));
                    }
                    p
                })
                .collect();
            if polys.iter().any(|p| p.num_terms() < 2) {
                return Ok(());
            }
            let f = PolySystem::new(polys).unwrap();
            let cfg = SolverConfig {
                backend: Backend::Grid,
                roots_order: m,
                ..Default::default()
            };
            let fast = solve_initial_form(&f, &cfg).unwrap();
            let threaded = solve_initial_form_with(&f, &cfg, 3).unwrap();

            // Naive oracle: independent full enumeration.
            let roots: Vec<Cyclotomic> =
                (0..m).map(|k| Cyclotomic::root_of_unity(m, k)).collect();
            let mut expected: Vec<Vec<Cyclotomic>> = Vec::new();
            let total = (m as usize).pow(n as u32);
            for flat in 0..total {
                let mut rem = flat;
                let mut point = Vec::with_capacity(n);
                for _ in 0..n {
                    point.push(roots[rem % roots.len()].clone());
                    rem /= roots.len();
                }
                let vals = f.evaluate(&point).unwrap();
                if vals.iter().all(Coeff::is_zero) {
                    expected.push(point);
                }
            }
            expected.sort_by(|p, q| cmp_points(p, q));

            let got: Vec<Vec<Cyclotomic>> =
                fast.iter().map(|s| s.coordinates.clone()).collect();
            let got_threaded: Vec<Vec<Cyclotomic>> =
                threaded.iter().map(|s| s.coordinates.clone()).collect();
            prop_assert_eq!(&got, &expected);
            prop_assert_eq!(&got_threaded, &expected);
        }
    }
}
