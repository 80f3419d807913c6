//! Orthogonality systems for the denominators, numerator recovery, and the
//! integral representation of the error.

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    group_roots, nullspace_solve, poly_roots, solve_consistent, AlgebraError, BigComplex, Matrix, Poly,
};
use crate::measure::{self, binomial, MeasureError, Quadrature};
use crate::problem::{Problem, ProblemError, ProblemSpec};
use crate::scheme::SchemeError;

/// Roots of `q` closer than this (relative) are reported as one pole.
pub const POLE_GROUPING_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PadeError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("pole {pole} of the rational part is an interpolation node")]
    PoleOnNode { pole: usize },
    #[error("error formula needs n > s (n = {n}, s = {s})")]
    DegenerateChoice { n: usize, s: usize },
    #[error("point is a zero of the denominator in the error formula")]
    ZeroDenominator,
    #[error("invalid request: {0}")]
    Invalid(String),
}

impl PadeError {
    /// Failures that a higher working precision may cure.
    pub fn is_precision_related(&self) -> bool {
        matches!(
            self,
            PadeError::Algebra(AlgebraError::SolveFailure { .. }) | PadeError::Algebra(AlgebraError::RootFailure(_))
        )
    }
}

/// Taylor coefficients `[1/v]_0..[1/v]_order` at `eta`, by the recursion
/// `w_k = -(1/v_0) Σ_{a=1}^{k} v_a w_{k-a}` on the Taylor coefficients of `v`.
///
/// `η` counts as a node when `|v(η)| ≤ drop · Σ |v_k| |η|^k`.
fn reciprocal_taylor(
    v: &Poly,
    eta: &BigComplex,
    order: usize,
    pole: usize,
    drop: &Float,
) -> Result<Vec<BigComplex>, PadeError> {
    let prec = eta.prec();
    let r = eta.abs();
    let mut scale = Float::new(prec);
    for c in v.coeffs().iter().rev() {
        scale = Float::with_val(prec, &scale * &r) + c.abs();
    }
    let mut fact = Float::with_val(prec, 1);
    let mut vt = Vec::with_capacity(order + 1);
    for a in 0..=order {
        if a > 0 {
            fact *= a as u32;
        }
        let d = v.derivative_at(eta, a);
        vt.push(d.scale(&Float::with_val(prec, fact.recip_ref())));
    }
    if vt[0].abs() <= Float::with_val(prec, &scale * drop) {
        return Err(PadeError::PoleOnNode { pole });
    }
    let w0 = vt[0].recip();
    let mut w = vec![w0.clone()];
    for k in 1..=order {
        let mut acc = BigComplex::zero(prec);
        for a in 1..=k {
            acc += &(&vt[a] * &w[k - a]);
        }
        w.push(-(&acc * &w0));
    }
    Ok(w)
}

/// Moments `m_l = ∫ t^l dλ/v + Σ_η Σ_k r_k [t^l/v]_k(η)`, with the
/// integral part kept separately.
#[derive(Clone, Debug)]
pub struct WeightedMoments {
    pub integral: Vec<BigComplex>,
    pub total: Vec<BigComplex>,
}

pub fn weighted_moments(problem: &Problem, v: &Poly, count: usize) -> Result<WeightedMoments, PadeError> {
    let prec = problem.prec();
    let integral = problem.measure.integrate_vec(&problem.numerics.quad, count, |t, out| {
        let tc = BigComplex::from_real(t.clone());
        let mut p = v.eval(&tc).recip();
        for o in out.iter_mut() {
            *o = p.clone();
            p = &p * &tc;
        }
    })?;
    let mut total = integral.clone();
    for (pi, pole) in problem.rational.poles().iter().enumerate() {
        let m = pole.multiplicity();
        let w = reciprocal_taylor(v, &pole.eta, m - 1, pi, &problem.numerics.tol.drop)?;
        // eta^0 .. eta^{count-1}
        let mut pw = Vec::with_capacity(count);
        let mut e = BigComplex::one(prec);
        for _ in 0..count {
            pw.push(e.clone());
            e = &e * &pole.eta;
        }
        for (l, slot) in total.iter_mut().enumerate() {
            for (k, r) in pole.coeffs.iter().enumerate() {
                if r.is_zero() {
                    continue;
                }
                let mut tk = BigComplex::zero(prec);
                for a in 0..=k.min(l) {
                    let term = (&pw[l - a] * &w[k - a]).scale(&binomial(l, a, prec));
                    tk += &term;
                }
                *slot += &(r * &tk);
            }
        }
    }
    Ok(WeightedMoments { integral, total })
}

/// The `n x (n+1)` system whose kernel holds the coefficients of `q_n`:
/// row `j`, column `i` is `m_{i+j}`.
pub fn assemble_orthogonality_system(
    problem: &Problem,
    n: usize,
) -> Result<(Matrix, WeightedMoments, Poly), PadeError> {
    if n == 0 {
        return Err(PadeError::Invalid("n must be at least 1".into()));
    }
    let prec = problem.prec();
    let v = problem.scheme.build_v2n(n, prec)?;
    let mom = weighted_moments(problem, &v, 2 * n)?;
    let m = Matrix::from_fn(n, n + 1, |j, i| mom.total[i + j].clone());
    Ok((m, mom, v))
}

#[derive(Clone, Debug)]
pub struct Denominator {
    pub q: Poly,
    pub defect: usize,
    pub residual: f64,
    pub nullspace_dim: usize,
    /// Largest relative residual of `∫ t^k Q_s q dλ/v = 0`, `k < n-s`.
    pub cross_check: Option<f64>,
    pub v: Poly,
}

pub fn solve_qn(problem: &Problem, n: usize) -> Result<Denominator, PadeError> {
    let prec = problem.prec();
    let tol = &problem.numerics.tol;
    let (m, mom, v) = assemble_orthogonality_system(problem, n)?;
    let sol = nullspace_solve(&m, &tol.drop, &tol.nullspace)?;
    let q = Poly::trimmed(sol.vector, &tol.drop);
    let defect = n - q.degree().max(0) as usize;
    let s = problem.rational.s();
    let cross_check = if n > s {
        let qs = problem.rational.q_s(prec);
        let mut worst = 0.0f64;
        for k in 0..(n - s) {
            let mut val = BigComplex::zero(prec);
            let mut scale = Float::new(prec);
            for (a, qa) in qs.coeffs().iter().enumerate() {
                for (i, qi) in q.coeffs().iter().enumerate() {
                    let mm = &mom.integral[a + k + i];
                    let c = qa * qi;
                    scale += Float::with_val(prec, c.abs() * mm.abs());
                    val += &(&c * mm);
                }
            }
            if !scale.is_zero() {
                worst = worst.max(Float::with_val(prec, val.abs() / &scale).to_f64());
            }
        }
        Some(worst)
    } else {
        None
    };
    Ok(Denominator {
        q,
        defect,
        residual: sol.residual.to_f64(),
        nullspace_dim: sol.dimension,
        cross_check,
        v,
    })
}

/// Taylor coefficients `[F]_0..[F]_order` at a point off the support and
/// off the poles.
fn f_taylor(problem: &Problem, z: &BigComplex, order: usize) -> Result<Vec<BigComplex>, PadeError> {
    let prec = problem.prec();
    problem.measure.check_off_support(z)?;
    // [1/(z-t)]_a = (-1)^a / (z-t)^{a+1}
    let mut out = problem
        .measure
        .integrate_vec(&problem.numerics.quad, order + 1, |t, o| {
            let inv = (z - &BigComplex::from_real(t.clone())).recip();
            let mut p = inv.clone();
            for (a, slot) in o.iter_mut().enumerate() {
                *slot = if a % 2 == 0 { p.clone() } else { -p.clone() };
                p = &p * &inv;
            }
        })?;
    for (pi, pole) in problem.rational.poles().iter().enumerate() {
        let d = z - &pole.eta;
        if d.is_zero() {
            return Err(MeasureError::PointAtPole { index: pi }.into());
        }
        let inv = d.recip();
        for (k, r) in pole.coeffs.iter().enumerate() {
            // [(z-η)^{-(k+1)}]_a = (-1)^a C(k+a, a) (z-η)^{-(k+1+a)}
            let mut p = inv.powi(k as i32 + 1);
            for (a, slot) in out.iter_mut().enumerate() {
                let mut term = (r * &p).scale(&binomial(k + a, a, prec));
                if a % 2 == 1 {
                    term = -term;
                }
                *slot += &term;
                p = &p * &inv;
            }
        }
    }
    Ok(out)
}

/// Numerator of type `n-1` matching `q`.
///
/// Classical schemes read it from the polynomial part of `qF` at infinity.
/// Otherwise `(qF - p)` must vanish at every finite node to the node's
/// multiplicity and its Laurent coefficients at infinity must vanish from
/// `z^{n-1}` down to `z^{max(0, d-n)}`; the stacked system is solved and
/// every condition verified.
pub fn recover_p(problem: &Problem, n: usize, q: &Poly) -> Result<(Poly, f64), PadeError> {
    let prec = problem.prec();
    let tol = &problem.numerics.tol;
    let c = measure::moments(
        &problem.measure,
        &problem.rational,
        n.saturating_sub(1),
        &problem.numerics.quad,
    )?;
    let qc = q.coeffs();
    let laurent = |l: usize| {
        let mut acc = BigComplex::zero(prec);
        for k in (l + 1)..qc.len() {
            acc += &(&qc[k] * &c[k - l - 1]);
        }
        acc
    };
    if problem.scheme.is_classical() {
        let p = Poly::trimmed((0..n).map(laurent).collect(), &tol.drop);
        return Ok((p, 0.0));
    }
    let nodes = problem.scheme.nodes(n, prec)?.finite;
    let d = nodes.len();
    // distinct nodes with multiplicities, first-occurrence order
    let mut groups: Vec<(BigComplex, usize)> = Vec::new();
    for z in nodes {
        match groups.iter_mut().find(|(g, _)| *g == z) {
            Some(entry) => entry.1 += 1,
            None => groups.push((z, 1)),
        }
    }
    let mut rows: Vec<Vec<BigComplex>> = Vec::new();
    let mut rhs: Vec<BigComplex> = Vec::new();
    for l in d.saturating_sub(n)..n {
        let mut row = vec![BigComplex::zero(prec); n];
        row[l] = BigComplex::one(prec);
        rows.push(row);
        rhs.push(laurent(l));
    }
    for (z, mult) in &groups {
        let ft = f_taylor(problem, z, mult - 1)?;
        for a in 0..*mult {
            // [qF]_a = Σ_b [q]_b [F]_{a-b}
            let mut val = BigComplex::zero(prec);
            for b in 0..=a {
                let qb = q.derivative_at(z, b).scale(&factorial_recip(b, prec));
                val += &(&qb * &ft[a - b]);
            }
            let row: Vec<BigComplex> = (0..n)
                .map(|i| {
                    if i < a {
                        BigComplex::zero(prec)
                    } else {
                        z.powi((i - a) as i32).scale(&binomial(i, a, prec))
                    }
                })
                .collect();
            rows.push(row);
            rhs.push(val);
        }
    }
    let a = Matrix::from_fn(rows.len(), n, |i, j| rows[i][j].clone());
    let (x, res) = solve_consistent(&a, &rhs, &tol.drop, &tol.nullspace)?;
    Ok((Poly::trimmed(x, &tol.drop), res.to_f64()))
}

fn factorial_recip(k: usize, prec: u32) -> Float {
    let mut f = Float::with_val(prec, 1);
    for i in 2..=k {
        f *= i as u32;
    }
    f.recip()
}

/// One member `Π_n = p/q` of the family.
#[derive(Clone, Debug)]
pub struct PadeApproximant {
    pub n: usize,
    pub prec: u32,
    pub q: Poly,
    pub p: Poly,
    pub defect: usize,
    pub scheme_kind: String,
    pub residual: f64,
    pub nullspace_dim: usize,
    pub cross_check: Option<f64>,
    pub p_residual: f64,
    pub v: Poly,
    /// Zeros of `q` with multiplicity.
    pub roots: Vec<BigComplex>,
    /// Distinct zeros of `q` with their multiplicities.
    pub poles: Vec<(BigComplex, usize)>,
}

impl PadeApproximant {
    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        &self.p.eval(z) / &self.q.eval(z)
    }

    pub fn roots_c64(&self) -> Vec<Complex64> {
        self.roots.iter().map(BigComplex::to_c64).collect()
    }
}

pub fn solve_approximant(problem: &Problem, n: usize) -> Result<PadeApproximant, PadeError> {
    let den = solve_qn(problem, n)?;
    let roots = if den.q.degree() >= 1 {
        poly_roots(&den.q, &problem.numerics.tol.root)?
    } else {
        Vec::new()
    };
    let poles = group_roots(&roots, POLE_GROUPING_TOL);
    let (p, p_residual) = recover_p(problem, n, &den.q)?;
    Ok(PadeApproximant {
        n,
        prec: problem.prec(),
        q: den.q,
        p,
        defect: den.defect,
        scheme_kind: problem.scheme.kind().to_string(),
        residual: den.residual,
        nullspace_dim: den.nullspace_dim,
        cross_check: den.cross_check,
        p_residual,
        v: den.v,
        roots,
        poles,
    })
}

/// A solve together with the precision it finally used.
#[derive(Clone, Debug)]
pub struct Solved {
    pub approximant: PadeApproximant,
    pub problem: Problem,
    pub escalation: Option<Escalation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Escalation {
    pub n: usize,
    pub from_bits: u32,
    pub to_bits: u32,
    pub reason: String,
}

/// Solves at `prec` bits and retries once at `2 prec` when the solve fails
/// for precision-related reasons or the kernel is numerically more than
/// one-dimensional. A higher-precision kernel of the same dimension keeps
/// the first vector, as without escalation.
pub fn solve_with_escalation(spec: &ProblemSpec, n: usize, prec: u32) -> Result<Solved, PadeError> {
    let problem = Problem::build(spec, prec)?;
    let reason = match solve_approximant(&problem, n) {
        Ok(a) if a.nullspace_dim <= 1 => {
            return Ok(Solved {
                approximant: a,
                problem,
                escalation: None,
            })
        }
        Ok(a) => format!("nullspace dimension {} at {prec} bits", a.nullspace_dim),
        Err(e) if e.is_precision_related() => e.to_string(),
        Err(e) => return Err(e),
    };
    let to = prec * 2;
    log::warn!("n = {n}: {reason}; retrying at {to} bits");
    let problem = Problem::build(spec, to)?;
    let a = solve_approximant(&problem, n)?;
    Ok(Solved {
        approximant: a,
        problem,
        escalation: Some(Escalation {
            n,
            from_bits: prec,
            to_bits: to,
            reason,
        }),
    })
}

/// `P = p_{n-s} Q_s` times `q`, with `p_{n-s}` monic on the zeros of `q`
/// nearest the hull of the support.
fn error_numerator(problem: &Problem, approx: &PadeApproximant) -> Result<Poly, PadeError> {
    let prec = problem.prec();
    let n = approx.n;
    let s = problem.rational.s();
    if n <= s {
        return Err(PadeError::DegenerateChoice { n, s });
    }
    let mut order: Vec<(Float, usize)> = approx
        .roots
        .iter()
        .enumerate()
        .map(|(i, r)| (problem.measure.distance_to_hull(r), i))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances").then(a.1.cmp(&b.1)));
    let take = (n - s).min(approx.roots.len());
    let chosen: Vec<BigComplex> = order[..take].iter().map(|(_, i)| approx.roots[*i].clone()).collect();
    Ok(Poly::from_roots(&chosen, prec)
        .mul(&problem.rational.q_s(prec))
        .mul(&approx.q))
}

/// `F(z) - Π_n(z)` through
/// `v(z)/(P q)(z) · ∫ (P q)(t)/v(t) dλ(t)/(z-t)` with `P = p_{n-s} Q_s`,
/// where `p_{n-s}` is monic on the zeros of `q` nearest the hull of the
/// support.
pub fn error_eval(problem: &Problem, approx: &PadeApproximant, z: &BigComplex) -> Result<BigComplex, PadeError> {
    error_eval_many(problem, approx, std::slice::from_ref(z))?
        .pop()
        .expect("one point")
}

/// [`error_eval`] at many points through one vector quadrature. Points
/// that are zeros of the denominator get their own error.
pub fn error_eval_many(
    problem: &Problem,
    approx: &PadeApproximant,
    zs: &[BigComplex],
) -> Result<Vec<Result<BigComplex, PadeError>>, PadeError> {
    error_eval_many_with(problem, approx, zs, &problem.numerics.quad)
}

/// [`error_eval_many`] with a caller-chosen quadrature rule. The integrand
/// has the size of the result, so a looser tolerance still gives the error
/// to about that relative accuracy.
pub fn error_eval_many_with(
    problem: &Problem,
    approx: &PadeApproximant,
    zs: &[BigComplex],
    quad: &Quadrature,
) -> Result<Vec<Result<BigComplex, PadeError>>, PadeError> {
    let pq = error_numerator(problem, approx)?;
    for z in zs {
        problem.measure.check_off_support(z)?;
    }
    let v = &approx.v;
    let integrals = problem.measure.integrate_vec(quad, zs.len(), |t, out| {
        let tc = BigComplex::from_real(t.clone());
        let w = &pq.eval(&tc) / &v.eval(&tc);
        for (o, z) in out.iter_mut().zip(zs) {
            *o = &w / &(z - &tc);
        }
    })?;
    Ok(zs
        .iter()
        .zip(integrals)
        .map(|(z, i)| {
            let den = pq.eval(z);
            if den.is_zero() {
                Err(PadeError::ZeroDenominator)
            } else {
                Ok(&(&v.eval(z) * &i) / &den)
            }
        })
        .collect())
}

/// `F(z) - Π_n(z)` by direct subtraction.
pub fn direct_error(problem: &Problem, approx: &PadeApproximant, z: &BigComplex) -> Result<BigComplex, PadeError> {
    let f = measure::eval_f(&problem.measure, &problem.rational, z, &problem.numerics.quad)?;
    Ok(&f - &approx.eval(z))
}

/// [`direct_error`] at many points.
pub fn direct_error_many(
    problem: &Problem,
    approx: &PadeApproximant,
    zs: &[BigComplex],
) -> Result<Vec<BigComplex>, PadeError> {
    let f = measure::eval_f_many(&problem.measure, &problem.rational, zs, &problem.numerics.quad)?;
    Ok(f.iter().zip(zs).map(|(f, z)| f - &approx.eval(z)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::PoleSpec;

    const P: u32 = 256;

    fn arcsine() -> Problem {
        Problem::build(&ProblemSpec::markov_arcsine(), P).unwrap()
    }

    fn coeffs(p: &Poly) -> Vec<Complex64> {
        p.coeffs().iter().map(BigComplex::to_c64).collect()
    }

    fn close(a: &[Complex64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn arcsine_low_orders() {
        let pr = arcsine();
        let a1 = solve_approximant(&pr, 1).unwrap();
        assert!(close(&coeffs(&a1.q), &[0.0, 1.0], 1e-30));
        assert!(close(&coeffs(&a1.p), &[1.0], 1e-30));
        let a2 = solve_approximant(&pr, 2).unwrap();
        assert!(close(&coeffs(&a2.q), &[-0.5, 0.0, 1.0], 1e-30));
        assert!(close(&coeffs(&a2.p), &[0.0, 1.0], 1e-30));
        assert_eq!(a2.defect, 0);
        let e = error_eval(&pr, &a1, &BigComplex::from_i64(P, 2)).unwrap().to_c64();
        assert!((e.re - (1.0 / 3f64.sqrt() - 0.5)).abs() < 1e-15 && e.im.abs() < 1e-30);
    }

    #[test]
    fn chebyshev_zeros_at_n5() {
        let a = solve_approximant(&arcsine(), 5).unwrap();
        for k in 1..=5 {
            let x = ((2 * k - 1) as f64 * std::f64::consts::PI / 10.0).cos();
            assert!(a.roots_c64().iter().any(|r| (r - x).norm() < 1e-14));
        }
        // parity: odd n has vanishing even coefficients
        for (i, c) in a.q.coeffs().iter().enumerate() {
            if i % 2 == 0 {
                assert!(c.abs_f64() < 1e-60);
            }
        }
    }

    fn with_pole() -> Problem {
        let mut spec = ProblemSpec::markov_arcsine();
        spec.poles.push(PoleSpec {
            eta: "2".into(),
            coeffs: vec!["1".into()],
        });
        Problem::build(&spec, P).unwrap()
    }

    #[test]
    fn residue_rows_match_contour_oracle() {
        // trapezoid rule for ∮ z^j q(z) F(z) dz on |z| = 10 must vanish
        let pr = with_pole();
        let d = solve_qn(&pr, 2).unwrap();
        let qc = coeffs(&d.q);
        let m = 1 << 14;
        let f = |z: Complex64| ((z - 1.0).sqrt() * (z + 1.0).sqrt()).inv() + (z - 2.0).inv();
        for j in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m {
                let z = Complex64::from_polar(10.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64);
                let q: Complex64 = qc.iter().rev().fold(Complex64::new(0.0, 0.0), |a, c| a * z + c);
                acc += z.powi(j) * q * f(z) * z;
            }
            acc /= m as f64;
            assert!(acc.norm() < 1e-10, "j = {j}: {acc}");
        }
        assert!(d.cross_check.unwrap() < 1e-30);
    }

    #[test]
    fn error_formula_agrees_with_direct_difference() {
        let pr = with_pole();
        for n in [3, 6] {
            let a = solve_approximant(&pr, n).unwrap();
            for z in [
                Complex64::new(0.3, 1.2),
                Complex64::new(-2.5, -0.4),
                Complex64::new(1.5, 0.5),
            ] {
                let zb = BigComplex::from_c64(P, z);
                let e1 = error_eval(&pr, &a, &zb).unwrap();
                let e2 = direct_error(&pr, &a, &zb).unwrap();
                assert!((&e1 - &e2).abs_f64() <= 1e-30 * (1.0 + e2.abs_f64()), "n {n} z {z}");
            }
        }
    }

    #[test]
    fn degenerate_error_choice() {
        let pr = with_pole();
        let a = solve_approximant(&pr, 1).unwrap();
        assert!(matches!(
            error_eval(&pr, &a, &BigComplex::from_i64(P, 3)),
            Err(PadeError::DegenerateChoice { n: 1, s: 1 })
        ));
    }

    #[test]
    fn multipoint_interpolates_at_nodes() {
        let mut spec = ProblemSpec::markov_arcsine();
        spec.scheme = crate::scheme::SchemeSpec::Circle {
            center: "0".into(),
            radius: "3".into(),
            samples: 1024,
        };
        let pr = Problem::build(&spec, P).unwrap();
        for n in [1, 4, 7] {
            let a = solve_approximant(&pr, n).unwrap();
            assert!(a.p.degree() < n as isize);
            let nodes = pr.scheme.nodes(n, P).unwrap().finite;
            for z in &nodes {
                let e = direct_error(&pr, &a, z).unwrap();
                assert!(e.abs_f64() < 1e-40, "n {n}: {e:?}");
            }
            let zb = BigComplex::from_f64(P, 0.4, 0.9);
            let e1 = error_eval(&pr, &a, &zb).unwrap();
            let e2 = direct_error(&pr, &a, &zb).unwrap();
            assert!((&e1 - &e2).abs_f64() < 1e-30);
        }
    }

    #[test]
    fn pole_on_node_is_rejected() {
        let mut spec = ProblemSpec::markov_arcsine();
        spec.scheme = crate::scheme::SchemeSpec::Circle {
            center: "0".into(),
            radius: "3".into(),
            samples: 1024,
        };
        spec.poles.push(PoleSpec {
            eta: "3".into(),
            coeffs: vec!["1".into()],
        });
        let pr = Problem::build(&spec, P).unwrap();
        assert!(matches!(solve_qn(&pr, 2), Err(PadeError::PoleOnNode { pole: 0 })));
    }

    #[test]
    fn escalation_is_not_needed_for_small_n() {
        let s = solve_with_escalation(&ProblemSpec::markov_arcsine(), 8, P).unwrap();
        assert!(s.escalation.is_none());
        assert_eq!(s.approximant.prec, P);
    }
}
