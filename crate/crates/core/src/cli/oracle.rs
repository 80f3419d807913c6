//! Closed-form oracle suites behind `padelab oracle`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rug::Float;

use super::CliError;
use crate::algebra::{BigComplex, Poly};
use crate::measure::binomial;
use crate::pade::{error_eval, solve_approximant};
use crate::potential::{
    balayage, equilibrium_measure, green_unit_interval, AsymptoticDistribution, DiscreteMeasure, GreenSolver,
    IntervalSystem, DEFAULT_NODES,
};
use crate::problem::{Problem, ProblemSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for OracleLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn line(name: &str, passed: bool, detail: String) -> OracleLine {
    OracleLine {
        name: name.into(),
        passed,
        detail,
    }
}

/// Moments of the arcsine measure on [-1, 1]: `C(2k, k)/4^k` at even
/// orders, zero at odd ones.
pub fn arcsine_moment(j: usize, prec: u32) -> Float {
    if j % 2 == 1 {
        return Float::new(prec);
    }
    let k = j / 2;
    binomial(2 * k, k, prec) >> (2 * k as u32)
}

/// Monic orthogonal polynomials `π_0..π_n` for a real moment functional,
/// built by Gram–Schmidt on `1, x, x², …`.
pub fn gram_schmidt(moment: impl Fn(usize) -> Float, n: usize, prec: u32) -> Vec<Vec<Float>> {
    let inner = |a: &[Float], b: &[Float]| {
        let mut s = Float::new(prec);
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                s += Float::with_val(prec, ai * bj) * moment(i + j);
            }
        }
        s
    };
    let mut out: Vec<Vec<Float>> = Vec::with_capacity(n + 1);
    let mut norms: Vec<Float> = Vec::new();
    for k in 0..=n {
        let mut xk = vec![Float::new(prec); k + 1];
        xk[k] = Float::with_val(prec, 1);
        let mut pk = xk.clone();
        for (pj, nj) in out.iter().zip(&norms) {
            let c = Float::with_val(prec, inner(&xk, pj) / nj);
            for (i, v) in pj.iter().enumerate() {
                pk[i] -= Float::with_val(prec, &c * v);
            }
        }
        norms.push(inner(&pk, &pk));
        out.push(pk);
    }
    out
}

/// `max_i |p_i - oracle_i|` at full precision.
fn max_coeff_diff(p: &Poly, oracle: &[Float]) -> f64 {
    let prec = oracle.first().map_or(crate::algebra::DEFAULT_PRECISION, Float::prec);
    let len = p.coeffs().len().max(oracle.len());
    (0..len)
        .map(|i| {
            let c = p.coeffs().get(i).cloned().unwrap_or_else(|| BigComplex::zero(prec));
            let b = oracle.get(i).cloned().unwrap_or_else(|| Float::new(prec));
            (&c - &BigComplex::from_real(b)).abs_f64()
        })
        .fold(0.0, f64::max)
}

pub fn markov_suite(prec: u32) -> Result<Vec<OracleLine>, CliError> {
    let pr = Problem::build(&ProblemSpec::markov_arcsine(), prec).map_err(|e| CliError::Setup(e.to_string()))?;
    let oracle = gram_schmidt(|j| arcsine_moment(j, prec), 10, prec);
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    let mut failed = None;
    let mut approx = Vec::new();
    for n in 1..=10 {
        match solve_approximant(&pr, n) {
            Ok(a) => {
                let d = max_coeff_diff(&a.q, &oracle[n]);
                worst = worst.max(d);
                approx.push(a);
            }
            Err(e) => failed = Some(format!("n = {n}: {e}")),
        }
    }
    out.push(match failed {
        Some(e) => line("chebyshev_denominators", false, e),
        None => line(
            "chebyshev_denominators",
            worst <= 1e-20,
            format!("max |q_n - gram_schmidt_n| over n <= 10 is {worst:e}"),
        ),
    });
    if approx.len() >= 2 {
        let one = BigComplex::one(prec);
        let d1 = max_coeff_diff(&approx[0].q, &[Float::new(prec), Float::with_val(prec, 1)])
            .max((&approx[0].p.coeffs()[0] - &one).abs_f64());
        out.push(line("pi_1 = 1/z", d1 <= 1e-20, format!("max coefficient error {d1:e}")));
        let half = Float::with_val(prec, -0.5);
        let dq = max_coeff_diff(&approx[1].q, &[half, Float::new(prec), Float::with_val(prec, 1)]);
        let dp = max_coeff_diff(&approx[1].p, &[Float::new(prec), Float::with_val(prec, 1)]);
        let d2 = dq.max(dp);
        out.push(line(
            "pi_2 = z/(z^2 - 1/2)",
            d2 <= 1e-20,
            format!("max coefficient error {d2:e}"),
        ));
        let two = BigComplex::from_i64(prec, 2);
        match error_eval(&pr, &approx[0], &two) {
            Ok(e) => {
                let want = 1.0 / 3f64.sqrt() - 0.5;
                let d = (e.to_c64() - want).norm();
                out.push(line("e_1(2) = 1/sqrt(3) - 1/2", d <= 1e-14, format!("error {d:e}")));
            }
            Err(e) => out.push(line("e_1(2) = 1/sqrt(3) - 1/2", false, e.to_string())),
        }
    }
    Ok(out)
}

pub fn potential_suite() -> Result<Vec<OracleLine>, CliError> {
    let setup = |e: crate::potential::PotentialError| CliError::Setup(e.to_string());
    let unit = IntervalSystem::new(vec![(-1.0, 1.0)], DEFAULT_NODES).map_err(setup)?;
    let mut out = Vec::new();
    let eq = equilibrium_measure(&unit).map_err(setup)?;
    out.push(line(
        "capacity [-1,1] = 1/2",
        (eq.capacity - 0.5).abs() <= 1e-3,
        format!("capacity {}", eq.capacity),
    ));
    let wide = IntervalSystem::new(vec![(-2.0, 2.0)], DEFAULT_NODES).map_err(setup)?;
    let c2 = equilibrium_measure(&wide).map_err(setup)?.capacity;
    out.push(line(
        "capacity [-2,2] = 1",
        (c2 - 1.0).abs() <= 2e-3,
        format!("capacity {c2}"),
    ));
    let x0 = 2.0;
    let mu = DiscreteMeasure::new(vec![Complex64::new(x0, 0.0)], vec![1.0]).map_err(setup)?;
    let b = balayage(&mu, &unit).map_err(setup)?;
    let mut worst = 0.0f64;
    for (k, (&x, &l)) in unit.nodes().iter().zip(unit.cells()).enumerate() {
        if x.abs() > 0.9 {
            continue;
        }
        let dens = (x0 * x0 - 1.0).sqrt() / (PI * (x0 - x) * (1.0 - x * x).sqrt()) * l;
        worst = worst.max((b.measure.weights()[k] / dens - 1.0).abs());
    }
    out.push(line(
        "balayage of delta_2 onto [-1,1]",
        worst <= 0.02,
        format!("max relative density error {worst:e} on the interior 90%"),
    ));
    let green = GreenSolver::new(&AsymptoticDistribution::at_infinity(2.0), &unit).map_err(setup)?;
    let z = Complex64::new(2.0, 0.0);
    let g = green.green_potential(z).map_err(setup)?;
    let want = 2.0 * green_unit_interval(z);
    out.push(line(
        "green potential of 2 delta_inf at 2",
        (g - want).abs() <= 5e-3,
        format!("{g} vs {want}"),
    ));
    Ok(out)
}

pub fn run_suite(name: &str, prec: u32) -> Result<Vec<OracleLine>, CliError> {
    match name {
        "markov" => markov_suite(prec),
        "potential" => potential_suite(),
        "all" => {
            let mut v = markov_suite(prec)?;
            v.extend(potential_suite()?);
            Ok(v)
        }
        other => Err(CliError::InvalidConfig(format!(
            "unknown oracle suite `{other}` (expected markov, potential or all)"
        ))),
    }
}
