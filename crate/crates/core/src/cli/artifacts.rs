//! Per-order output files.

use std::fmt::Write as _;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::algebra::{group_roots, poly_roots, BigComplex, Poly};
use crate::pade::{Escalation, PadeApproximant, PadeError, Solved, POLE_GROUPING_TOL};
use crate::problem::Problem;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleSummary {
    pub max: f64,
    pub median: f64,
    pub theta_at_max: f64,
    /// Samples that fell on the support or on a pole.
    pub undefined: usize,
}

impl CircleSummary {
    pub fn from_samples(samples: &[(f64, f64)]) -> Self {
        let mut finite: Vec<(f64, f64)> = samples.iter().copied().filter(|s| s.1.is_finite()).collect();
        let undefined = samples.len() - finite.len();
        let (theta_at_max, max) = finite.iter().copied().fold((f64::NAN, f64::NAN), |acc, s| {
            if acc.1.is_nan() || s.1 > acc.1 {
                s
            } else {
                acc
            }
        });
        finite.sort_by(|a, b| a.1.total_cmp(&b.1));
        let median = if finite.is_empty() {
            f64::NAN
        } else {
            let m = finite.len();
            if m % 2 == 1 {
                finite[m / 2].1
            } else {
                (finite[m / 2 - 1].1 + finite[m / 2].1) / 2.0
            }
        };
        CircleSummary {
            max,
            median,
            theta_at_max,
            undefined,
        }
    }
}

/// `re,im,nearest_singularity,distance` for every zero of `q_n`.
pub fn poles_csv(problem: &Problem, a: &PadeApproximant) -> String {
    let mut s = String::from("re,im,nearest_singularity,distance\n");
    for r in &a.roots {
        let z = r.to_c64();
        let mut best = ("support".to_string(), problem.measure.distance_to_support(r).to_f64());
        for (p, spec) in problem.rational.poles().iter().zip(&problem.spec.poles) {
            let d = (&p.eta - r).abs_f64();
            if d < best.1 {
                best = (format!("pole {}", spec.eta), d);
            }
        }
        let _ = writeln!(s, "{:e},{:e},{},{:e}", z.re, z.im, best.0, best.1);
    }
    s
}

/// `theta,abs_error` rows.
pub fn circle_csv(samples: &[(f64, f64)]) -> String {
    let mut s = String::from("theta,abs_error\n");
    for (t, e) in samples {
        let _ = writeln!(s, "{t:e},{e:e}");
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleEntry {
    pub re: String,
    pub im: String,
    pub multiplicity: usize,
}

/// Contents of `approximant_n{N}.json`; coefficients are decimal strings
/// that read back to the same binary value at `precision`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximantArtifact {
    pub n: usize,
    pub precision: u32,
    pub scheme: String,
    pub defect: usize,
    pub residual: f64,
    pub nullspace_dim: usize,
    pub cross_check: Option<f64>,
    pub p_residual: f64,
    /// Ascending `[re, im]` pairs.
    pub q: Vec<[String; 2]>,
    pub p: Vec<[String; 2]>,
    pub poles: Vec<PoleEntry>,
    pub escalation: Option<Escalation>,
}

fn parts(p: &Poly) -> Vec<[String; 2]> {
    p.coeffs()
        .iter()
        .map(|c| {
            let (re, im) = c.to_decimal_parts();
            [re, im]
        })
        .collect()
}

fn parse_float(s: &str, prec: u32) -> Result<Float, PadeError> {
    Float::parse(s)
        .map(|v| Float::with_val(prec, v))
        .map_err(|e| PadeError::Invalid(format!("coefficient `{s}`: {e}")))
}

fn read_poly(c: &[[String; 2]], prec: u32) -> Result<Poly, PadeError> {
    let coeffs = c
        .iter()
        .map(|[re, im]| Ok(BigComplex::from_parts(parse_float(re, prec)?, parse_float(im, prec)?)))
        .collect::<Result<Vec<_>, PadeError>>()?;
    Ok(Poly::new(coeffs))
}

impl ApproximantArtifact {
    pub fn from_solved(s: &Solved) -> Self {
        let a = &s.approximant;
        ApproximantArtifact {
            n: a.n,
            precision: a.prec,
            scheme: a.scheme_kind.clone(),
            defect: a.defect,
            residual: a.residual,
            nullspace_dim: a.nullspace_dim,
            cross_check: a.cross_check,
            p_residual: a.p_residual,
            q: parts(&a.q),
            p: parts(&a.p),
            poles: a
                .poles
                .iter()
                .map(|(z, m)| {
                    let (re, im) = z.to_decimal_parts();
                    PoleEntry {
                        re,
                        im,
                        multiplicity: *m,
                    }
                })
                .collect(),
            escalation: s.escalation.clone(),
        }
    }

    /// Rebuilds the approximant; zeros of `q` are recomputed.
    pub fn to_approximant(&self, problem: &Problem) -> Result<PadeApproximant, PadeError> {
        let prec = self.precision;
        let q = read_poly(&self.q, prec)?;
        let p = read_poly(&self.p, prec)?;
        let roots = if q.degree() >= 1 {
            poly_roots(&q, &problem.numerics.tol.root)?
        } else {
            Vec::new()
        };
        Ok(PadeApproximant {
            n: self.n,
            prec,
            poles: group_roots(&roots, POLE_GROUPING_TOL),
            roots,
            q,
            p,
            defect: self.defect,
            scheme_kind: self.scheme.clone(),
            residual: self.residual,
            nullspace_dim: self.nullspace_dim,
            cross_check: self.cross_check,
            p_residual: self.p_residual,
            v: problem.scheme.build_v2n(self.n, prec)?,
        })
    }
}
