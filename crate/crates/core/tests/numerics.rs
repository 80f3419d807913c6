use std::f64::consts::PI;

use num_complex::Complex64;
use padelab::algebra::{BigComplex, Poly};
use padelab::cli::config::{ProblemConfig, PAPER_SECTION4};
use padelab::measure::{argument_variation, cauchy_transform, eval_f_many, moments, DensityExpr};
use padelab::pade::{error_eval_many, solve_approximant, solve_qn, solve_with_escalation};
use padelab::potential::{
    balayage, cell_potential, equilibrium_measure, log_potential, DiscreteMeasure, IntervalSystem, DEFAULT_NODES,
};
use padelab::problem::{ComponentSpec, PoleSpec, Problem, ProblemSpec};
use rug::Float;

const P: u32 = 256;

fn section4() -> ProblemSpec {
    ProblemConfig::from_json(PAPER_SECTION4).unwrap().problem
}

fn on_interval(a: &str, b: &str, density: &str) -> ProblemSpec {
    ProblemSpec {
        measure: vec![ComponentSpec {
            a: a.into(),
            b: b.into(),
            density: DensityExpr::parse(density).unwrap(),
            weight: Default::default(),
        }],
        ..ProblemSpec::markov_arcsine()
    }
}

/// Points of the annulus `r0 <= |z| <= r1` on a golden-angle spiral.
fn annulus(count: usize, r0: f64, r1: f64) -> Vec<Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let r = r0 + (r1 - r0) * (k as f64 + 0.5) / count as f64;
            Complex64::from_polar(r, golden * k as f64 + 0.3)
        })
        .collect()
}

#[test]
fn error_formula_matches_direct_difference_in_an_annulus() {
    for (spec, ns, r0, r1) in [
        (ProblemSpec::markov_arcsine(), vec![4, 8], 1.3, 3.0),
        (section4(), vec![10], 1.6, 2.5),
    ] {
        let pr = Problem::build(&spec, P).unwrap();
        for n in ns {
            let a = solve_approximant(&pr, n).unwrap();
            let zs: Vec<BigComplex> = annulus(20, r0, r1)
                .into_iter()
                .map(|z| BigComplex::from_c64(P, z))
                .collect();
            let formula = error_eval_many(&pr, &a, &zs).unwrap();
            let f = eval_f_many(&pr.measure, &pr.rational, &zs, &pr.numerics.quad).unwrap();
            let quad_tol = pr.numerics.tol.quad.to_f64();
            for ((z, e), fz) in zs.iter().zip(formula).zip(&f) {
                let direct = fz - &a.eval(z);
                let bound = 10.0 * (quad_tol + a.residual) * (1.0 + fz.abs_f64());
                let diff = (&e.unwrap() - &direct).abs_f64();
                assert!(diff <= bound, "n = {n}, z = {}: {diff:e} > {bound:e}", z.to_c64());
            }
        }
    }
}

#[test]
fn defect_stays_within_the_angle_bound() {
    let pr = Problem::build(&ProblemSpec::markov_arcsine(), P).unwrap();
    for n in 1..=16 {
        assert_eq!(solve_qn(&pr, n).unwrap().defect, 0, "n = {n}");
    }
    let pr = Problem::build(&section4(), P).unwrap();
    let budget = padelab::checkers::Budget::for_problem(&pr, 0.0).unwrap();
    for n in [10, 12, 14] {
        let d = solve_qn(&pr, n).unwrap().defect as f64;
        assert!(d * PI <= budget.rhs(), "n = {n}: defect {d}");
    }
}

/// Non-Hermitian Gram–Schmidt for `∫ t^j (1 + i t) dt` on [0, 1].
fn complex_gram_schmidt(n: usize) -> Vec<Poly> {
    let moment = |j: usize| {
        BigComplex::from_parts(
            Float::with_val(P, 1) / (j as u32 + 1),
            Float::with_val(P, 1) / (j as u32 + 2),
        )
    };
    let form = |a: &Poly, b: &Poly| {
        let mut s = BigComplex::zero(P);
        for (i, x) in a.coeffs().iter().enumerate() {
            for (j, y) in b.coeffs().iter().enumerate() {
                s = &s + &(&(x * y) * &moment(i + j));
            }
        }
        s
    };
    let mut out: Vec<Poly> = Vec::new();
    for k in 0..=n {
        let xk = Poly::one(P).shift(k);
        let mut c = xk.coeffs().to_vec();
        for b in &out {
            let f = &form(&xk, b) / &form(b, b);
            for (i, v) in b.coeffs().iter().enumerate() {
                c[i] = &c[i] - &(&f * v);
            }
        }
        out.push(Poly::new(c));
    }
    out
}

#[test]
fn denominators_match_gram_schmidt_for_a_complex_density() {
    let pr = Problem::build(&on_interval("0", "1", "1 + i*t"), P).unwrap();
    let oracle = complex_gram_schmidt(8);
    for n in 1..=8 {
        let q = solve_qn(&pr, n).unwrap().q;
        assert_eq!(q.degree(), n as isize);
        for (a, b) in q.coeffs().iter().zip(oracle[n].coeffs()) {
            assert!((a - b).abs_f64() < 1e-40, "n = {n}");
        }
    }
}

#[test]
fn linearized_error_decays_at_infinity() {
    let pr = Problem::build(&on_interval("0", "1", "1 + t"), P).unwrap();
    for n in [2usize, 4, 6] {
        let a = solve_approximant(&pr, n).unwrap();
        let at = |r: f64| {
            let z = BigComplex::from_f64(P, r * 0.6, r * 0.8);
            let f = cauchy_transform(&pr.measure, &z, &pr.numerics.quad).unwrap();
            (&(&a.q.eval(&z) * &f) - &a.p.eval(&z)).abs_f64()
        };
        let slope = (at(2e4) / at(1e4)).log2();
        assert!((slope + (n as f64 + 1.0)).abs() < 0.05, "n = {n}: slope {slope}");
    }
}

#[test]
fn conjugate_problem_gives_conjugate_approximants() {
    let mut spec = on_interval("0", "1", "(1+2i)*t + 1");
    spec.poles.push(PoleSpec {
        eta: "1/2+1i".into(),
        coeffs: vec!["2-1i".into(), "1/3i".into()],
    });
    let mut conj = on_interval("0", "1", "(1-2i)*t + 1");
    conj.poles.push(PoleSpec {
        eta: "1/2-1i".into(),
        coeffs: vec!["2+1i".into(), "-1/3i".into()],
    });
    let a = Problem::build(&spec, P).unwrap();
    let b = Problem::build(&conj, P).unwrap();
    for n in [3usize, 5] {
        let qa = solve_approximant(&a, n).unwrap();
        let qb = solve_approximant(&b, n).unwrap();
        for (x, y) in qa.q.coeffs().iter().zip(qb.q.coeffs()) {
            assert!((&x.conj() - y).abs_f64() < 1e-50);
        }
        for (x, y) in qa.p.coeffs().iter().zip(qb.p.coeffs()) {
            assert!((&x.conj() - y).abs_f64() < 1e-50);
        }
    }
}

#[test]
fn ill_conditioned_solve_escalates_precision() {
    let s = solve_with_escalation(&ProblemSpec::markov_arcsine(), 30, 128).unwrap();
    let e = s.escalation.expect("128 bits do not resolve n = 30");
    assert_eq!((e.from_bits, e.to_bits), (128, 256));
    assert_eq!(s.approximant.prec, 256);
    assert_eq!(s.approximant.defect, 0);
    assert_eq!(s.approximant.nullspace_dim, 1);
    assert!(e.reason.contains("nullspace dimension"));
}

#[test]
fn cauchy_transform_approaches_the_mass_along_rays() {
    let pr = Problem::build(&on_interval("0", "1", "1 + t"), P).unwrap();
    let (c0, c1) = (1.5, 0.5 + 1.0 / 3.0);
    for dir in [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-0.6, -0.8),
    ] {
        let zc = |r: f64| {
            let z = BigComplex::from_c64(P, dir * r);
            (&z * &cauchy_transform(&pr.measure, &z, &pr.numerics.quad).unwrap()).to_c64()
        };
        for r in [1e2, 1e4, 1e6] {
            let d = (zc(r) - c0).norm();
            assert!(d <= 1.01 * c1 / r, "r = {r}: {d:e}");
            // Richardson removes the 1/z term
            let rich = 2.0 * zc(2.0 * r) - zc(r);
            assert!((rich - c0).norm() <= 2.0 / (r * r), "r = {r}");
        }
    }
}

#[test]
fn moments_match_taylor_coefficients_at_infinity() {
    let mut spec = ProblemSpec::markov_arcsine();
    spec.poles.push(PoleSpec {
        eta: "2i".into(),
        coeffs: vec!["1".into()],
    });
    let pr = Problem::build(&spec, P).unwrap();
    let j = 10;
    let c = moments(&pr.measure, &pr.rational, j, &pr.numerics.quad).unwrap();
    // F(1/w) = Σ c_j w^{j+1}, analytic for |w| < 1/2; trapezoid rule on |w| = 1/4
    let m = 256;
    let r = Float::with_val(P, 0.25);
    let pi2 = BigComplex::pi(P) * 2u32;
    let ws: Vec<BigComplex> = (0..m)
        .map(|k| BigComplex::cis(&(Float::with_val(P, &pi2 * k as u32) / m as u32)).scale(&r))
        .collect();
    let zs: Vec<BigComplex> = ws.iter().map(BigComplex::recip).collect();
    let f = eval_f_many(&pr.measure, &pr.rational, &zs, &pr.numerics.quad).unwrap();
    for (k, ck) in c.iter().enumerate() {
        let mut s = BigComplex::zero(P);
        for (fw, w) in f.iter().zip(&ws) {
            s = &s + &(fw * &w.powi(-(k as i32 + 1)));
        }
        let s = s.scale(&(Float::with_val(P, 1) / m as u32));
        assert!((&s - ck).abs_f64() < 1e-20, "j = {k}");
    }
}

#[test]
fn argument_variation_grows_under_refinement() {
    let pr = Problem::build(&section4(), P).unwrap();
    let vals: Vec<f64> = (7..=12)
        .filter_map(|k| argument_variation(&pr.measure, 1 << k).ok())
        .collect();
    assert!(vals.len() >= 3);
    for w in vals.windows(2) {
        assert!(w[1] >= w[0] - 1e-12, "{vals:?}");
    }
}

/// Validation points strictly between collocation nodes on the interior 90%.
fn validation_grid(sys: &IntervalSystem) -> Vec<f64> {
    let mut xs = Vec::new();
    for &(a, b) in sys.intervals() {
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        for k in 0..997 {
            xs.push(c + 0.9 * h * (-1.0 + 2.0 * (k as f64 + 0.5) / 997.0));
        }
    }
    xs
}

#[test]
fn equilibrium_potential_is_flat() {
    for iv in [vec![(-1.0, 1.0)], vec![(-1.0, -0.3), (0.2, 1.0)]] {
        let sys = IntervalSystem::new(iv, DEFAULT_NODES).unwrap();
        let eq = equilibrium_measure(&sys).unwrap();
        let u: Vec<f64> = validation_grid(&sys)
            .into_iter()
            .map(|x| cell_potential(&eq.system, eq.measure.weights(), Complex64::new(x, 0.0)))
            .collect();
        let spread = u.iter().copied().fold(f64::MIN, f64::max) - u.iter().copied().fold(f64::MAX, f64::min);
        assert!(spread <= 5e-3, "{spread}");
    }
}

#[test]
fn balayage_potential_matches_up_to_a_constant() {
    let sys = IntervalSystem::new(vec![(-1.0, -0.3), (0.2, 1.0)], DEFAULT_NODES).unwrap();
    let mu = DiscreteMeasure::new(
        vec![Complex64::new(0.0, 1.5), Complex64::new(2.5, -0.5)],
        vec![0.7, 0.3],
    )
    .unwrap();
    let b = balayage(&mu, &sys).unwrap();
    let d: Vec<f64> = validation_grid(&sys)
        .into_iter()
        .map(|x| {
            let z = Complex64::new(x, 0.0);
            cell_potential(&b.system, b.measure.weights(), z) - log_potential(&mu, z).unwrap()
        })
        .collect();
    let spread = d.iter().copied().fold(f64::MIN, f64::max) - d.iter().copied().fold(f64::MAX, f64::min);
    // |U^b - U^mu - c| <= 5e-3 for the midrange constant c
    assert!(spread / 2.0 <= 5e-3, "{spread}");
}

#[test]
fn capacity_converges_under_refinement() {
    let mut sys = IntervalSystem::new(vec![(-1.0, -0.4), (0.1, 1.0)], 32).unwrap();
    let mut caps = Vec::new();
    for _ in 0..4 {
        caps.push(equilibrium_measure(&sys).unwrap().capacity);
        sys = sys.refined();
    }
    for w in caps.windows(3) {
        assert!((w[2] - w[1]).abs() < (w[1] - w[0]).abs(), "{caps:?}");
    }
}
