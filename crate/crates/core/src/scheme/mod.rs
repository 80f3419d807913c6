//! Interpolation schemes: per-n node multisets, the node polynomial
//! `v_{2n}`, the limit distribution of the nodes and admissibility
//! diagnostics.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{BigComplex, Poly};
use crate::measure::{parse_complex_literal, ExprError};
use crate::potential::{AsymptoticDistribution, DiscreteMeasure};

/// Points on the circle used to represent the limit distribution.
pub const DEFAULT_CIRCLE_SAMPLES: usize = 1024;
/// Grid size for the admissibility diagnostics on the hull.
pub const ADMISSIBILITY_GRID: usize = 512;
/// A log-log growth slope above this flags a diagnostic.
pub const GROWTH_SLOPE: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error(transparent)]
    Parse(#[from] ExprError),
    #[error("invalid scheme: {0}")]
    Invalid(String),
    #[error("no explicit nodes given for n = {0}")]
    MissingNodes(usize),
}

/// Explicit node list for one `n`: finite nodes plus a count at infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitNodes {
    #[serde(default)]
    pub finite: Vec<String>,
    #[serde(default)]
    pub infinity: usize,
}

/// Scheme as written in a problem description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SchemeSpec {
    Classical,
    Circle {
        center: String,
        radius: String,
        #[serde(default = "default_circle_samples")]
        samples: usize,
    },
    Explicit {
        nodes: BTreeMap<usize, ExplicitNodes>,
    },
}

fn default_circle_samples() -> usize {
    DEFAULT_CIRCLE_SAMPLES
}

/// Node multiset for one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    pub finite: Vec<BigComplex>,
    pub infinity: usize,
}

#[derive(Clone, Debug)]
pub enum InterpolationScheme {
    Classical,
    /// `2n` nodes `z0 + ρ e^{iπk/n}`, `k = 0..2n-1`.
    Circle {
        center: BigComplex,
        radius: BigComplex,
        samples: usize,
    },
    Explicit(BTreeMap<usize, NodeSet>),
}

impl InterpolationScheme {
    pub fn from_spec(spec: &SchemeSpec, prec: u32) -> Result<Self, SchemeError> {
        Ok(match spec {
            SchemeSpec::Classical => InterpolationScheme::Classical,
            SchemeSpec::Circle {
                center,
                radius,
                samples,
            } => {
                let center = parse_complex_literal(center, prec)?;
                let radius = parse_complex_literal(radius, prec)?;
                if !radius.im.is_zero() || radius.re <= 0 {
                    return Err(SchemeError::Invalid("circle radius must be a positive real".into()));
                }
                InterpolationScheme::Circle {
                    center,
                    radius,
                    samples: (*samples).max(2),
                }
            }
            SchemeSpec::Explicit { nodes } => {
                let mut map = BTreeMap::new();
                for (&n, e) in nodes {
                    let finite = e
                        .finite
                        .iter()
                        .map(|s| parse_complex_literal(s, prec))
                        .collect::<Result<Vec<_>, _>>()?;
                    if finite.len() + e.infinity != 2 * n {
                        return Err(SchemeError::Invalid(format!(
                            "n = {n} needs 2n = {} nodes, got {} finite + {} at infinity",
                            2 * n,
                            finite.len(),
                            e.infinity
                        )));
                    }
                    map.insert(
                        n,
                        NodeSet {
                            finite,
                            infinity: e.infinity,
                        },
                    );
                }
                InterpolationScheme::Explicit(map)
            }
        })
    }

    pub fn is_classical(&self) -> bool {
        matches!(self, InterpolationScheme::Classical)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InterpolationScheme::Classical => "classical",
            InterpolationScheme::Circle { .. } => "circle",
            InterpolationScheme::Explicit(_) => "explicit",
        }
    }

    pub fn nodes(&self, n: usize, prec: u32) -> Result<NodeSet, SchemeError> {
        match self {
            InterpolationScheme::Classical => Ok(NodeSet {
                finite: Vec::new(),
                infinity: 2 * n,
            }),
            InterpolationScheme::Circle { center, radius, .. } => {
                // upper half computed, lower half mirrored so that a real
                // center gives an exactly conjugation-symmetric multiset
                let pi = BigComplex::pi(prec);
                let mut unit = Vec::with_capacity(2 * n);
                for k in 0..=n {
                    let th = rug::Float::with_val(prec, &pi * k as u32) / n as u32;
                    unit.push(BigComplex::cis(&th));
                }
                unit[0] = BigComplex::one(prec);
                unit[n] = BigComplex::from_i64(prec, -1);
                for k in (n + 1)..(2 * n) {
                    let c = unit[2 * n - k].conj();
                    unit.push(c);
                }
                let finite = unit.iter().map(|u| center + &(u * radius)).collect();
                Ok(NodeSet { finite, infinity: 0 })
            }
            InterpolationScheme::Explicit(map) => map.get(&n).cloned().ok_or(SchemeError::MissingNodes(n)),
        }
    }

    /// `v_{2n}(z) = Π (z - ζ)` over the finite nodes.
    pub fn build_v2n(&self, n: usize, prec: u32) -> Result<Poly, SchemeError> {
        let nodes = self.nodes(n, prec)?;
        Ok(Poly::from_roots(&nodes.finite, prec))
    }

    /// Weak-* limit of `(1/n) Σ δ_ζ` (mass 2). For explicit schemes the
    /// largest listed `n` stands in for the limit.
    pub fn asymptotic_distribution(&self, prec: u32) -> Result<AsymptoticDistribution, SchemeError> {
        match self {
            InterpolationScheme::Classical => Ok(AsymptoticDistribution::at_infinity(2.0)),
            InterpolationScheme::Circle {
                center,
                radius,
                samples,
            } => Ok(AsymptoticDistribution {
                finite: Some(DiscreteMeasure::uniform_circle(
                    center.to_c64(),
                    radius.re.to_f64(),
                    *samples,
                    2.0,
                )),
                infinity_mass: 0.0,
            }),
            InterpolationScheme::Explicit(map) => {
                let (&n, _) = map
                    .iter()
                    .next_back()
                    .ok_or_else(|| SchemeError::Invalid("explicit scheme lists no n".into()))?;
                let nodes = self.nodes(n, prec)?;
                let pts: Vec<Complex64> = nodes.finite.iter().map(BigComplex::to_c64).collect();
                let finite = if pts.is_empty() {
                    None
                } else {
                    Some(
                        DiscreteMeasure::counting(&pts, 1.0 / n as f64)
                            .map_err(|e| SchemeError::Invalid(e.to_string()))?,
                    )
                };
                Ok(AsymptoticDistribution {
                    finite,
                    infinity_mass: nodes.infinity as f64 / n as f64,
                })
            }
        }
    }

    pub fn admissibility_report(
        &self,
        hull: (f64, f64),
        poles: &[Complex64],
        n_range: &[usize],
        clearance: f64,
        prec: u32,
    ) -> Result<AdmissibilityReport, SchemeError> {
        let grid: Vec<f64> = (0..ADMISSIBILITY_GRID)
            .map(|k| hull.0 + (hull.1 - hull.0) * k as f64 / (ADMISSIBILITY_GRID - 1) as f64)
            .collect();
        let mut per_n = Vec::with_capacity(n_range.len());
        for &n in n_range {
            let nodes: Vec<Complex64> = self.nodes(n, prec)?.finite.iter().map(BigComplex::to_c64).collect();
            per_n.push(diagnose(n, &nodes, hull, poles, &grid, clearance));
        }
        let slope_of = |f: &dyn Fn(&NodeDiagnostics) -> f64| growth_slope(&per_n, f);
        let arg_slope = slope_of(&|d| d.arg_derivative_sup);
        let suffast_slope = slope_of(&|d| d.suffast_sup);
        let var_slope = slope_of(&|d| d.arg_variation);
        let mut flags = Vec::new();
        if per_n.iter().any(|d| !d.clearance_ok) {
            flags.push("nodes closer than the clearance to the hull or a pole".to_string());
        }
        for (name, s) in [
            ("arg derivative", arg_slope),
            ("imaginary Cauchy transform", suffast_slope),
            ("arg variation", var_slope),
        ] {
            if s.is_some_and(|s| s > GROWTH_SLOPE) {
                flags.push(format!("{name} grows with n"));
            }
        }
        let v_a = per_n.iter().map(|d| d.arg_variation).fold(0.0, f64::max);
        Ok(AdmissibilityReport {
            kind: self.kind().to_string(),
            per_n,
            arg_derivative_slope: arg_slope,
            suffast_slope,
            arg_variation_slope: var_slope,
            v_a,
            admissible: flags.is_empty(),
            flags,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDiagnostics {
    pub n: usize,
    /// Smallest distance from a finite node to the hull or a pole.
    pub min_distance: Option<f64>,
    pub clearance_ok: bool,
    /// `sup |d/dx arg v_{2n}(x)|` over the grid on the hull.
    pub arg_derivative_sup: f64,
    /// `sup n |Im ∫ dσ_n(t)/(x-t)|` over the grid.
    pub suffast_sup: f64,
    /// Unwrapped variation of `arg v_{2n}` along the hull.
    pub arg_variation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub kind: String,
    pub per_n: Vec<NodeDiagnostics>,
    pub arg_derivative_slope: Option<f64>,
    pub suffast_slope: Option<f64>,
    pub arg_variation_slope: Option<f64>,
    /// Largest observed variation, the constant bounding `V(arg v_{2n})`.
    pub v_a: f64,
    pub admissible: bool,
    pub flags: Vec<String>,
}

/// Sum in which equal and opposite terms cancel exactly: positive and
/// negative parts are each added in sorted order.
fn symmetric_sum(terms: &mut [f64]) -> f64 {
    terms.sort_by(f64::total_cmp);
    let neg: f64 = terms
        .iter()
        .filter(|t| **t < 0.0)
        .rev()
        .map(|t| -t)
        .fold(0.0, |a, b| a + b);
    let pos: f64 = terms.iter().filter(|t| **t > 0.0).fold(0.0, |a, b| a + b);
    pos - neg
}

fn diagnose(
    n: usize,
    nodes: &[Complex64],
    hull: (f64, f64),
    poles: &[Complex64],
    grid: &[f64],
    clearance: f64,
) -> NodeDiagnostics {
    let min_distance = nodes
        .iter()
        .map(|z| {
            let dh = if z.re >= hull.0 && z.re <= hull.1 {
                z.im.abs()
            } else {
                (z - hull.0).norm().min((z - hull.1).norm())
            };
            poles.iter().map(|p| (z - p).norm()).fold(dh, f64::min)
        })
        .reduce(f64::min);
    let mut sup = 0.0f64;
    let mut terms = Vec::with_capacity(nodes.len());
    for &x in grid {
        terms.clear();
        terms.extend(nodes.iter().map(|z| (Complex64::new(x, 0.0) - z).inv().im));
        // d/dx arg v(x) = Im v'/v = Σ Im 1/(x-ζ); n·Im ∫dσ_n/(x-t) is the same sum
        sup = sup.max(symmetric_sum(&mut terms).abs());
    }
    let mut variation = 0.0;
    for w in grid.windows(2) {
        let mut inc: Vec<f64> = nodes
            .iter()
            .map(|z| ((Complex64::new(w[1], 0.0) - z) / (Complex64::new(w[0], 0.0) - z)).arg())
            .collect();
        variation += symmetric_sum(&mut inc).abs();
    }
    NodeDiagnostics {
        n,
        min_distance,
        clearance_ok: min_distance.is_none_or(|d| d >= clearance),
        arg_derivative_sup: sup,
        suffast_sup: sup,
        arg_variation: variation,
    }
}

/// Least-squares slope of `log f` against `log n` over the entries with
/// positive values; `None` when fewer than two remain.
fn growth_slope(per_n: &[NodeDiagnostics], f: &dyn Fn(&NodeDiagnostics) -> f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = per_n
        .iter()
        .filter(|d| f(d) > 0.0 && d.n > 0)
        .map(|d| ((d.n as f64).ln(), f(d).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn circle(center: &str, radius: &str) -> InterpolationScheme {
        InterpolationScheme::from_spec(
            &SchemeSpec::Circle {
                center: center.into(),
                radius: radius.into(),
                samples: DEFAULT_CIRCLE_SAMPLES,
            },
            P,
        )
        .unwrap()
    }

    fn real_coeffs(p: &Poly) -> Vec<f64> {
        p.coeffs().iter().map(|c| c.re.to_f64()).collect()
    }

    #[test]
    fn v2n_examples() {
        let v = InterpolationScheme::Classical.build_v2n(13, P).unwrap();
        assert_eq!(v, Poly::one(P));
        let c = circle("0", "3");
        let v1 = c.build_v2n(1, P).unwrap();
        let r = real_coeffs(&v1);
        assert!((r[0] + 9.0).abs() < 1e-60 && r[1].abs() < 1e-60 && r[2] == 1.0);
        let v2 = c.build_v2n(2, P).unwrap();
        let r = real_coeffs(&v2);
        assert!((r[0] + 81.0).abs() < 1e-50);
        for k in 1..4 {
            assert!(v2.coeffs()[k].abs_f64() < 1e-50);
        }
        for n in 1..12 {
            let v = c.build_v2n(n, P).unwrap();
            assert_eq!(v.degree(), 2 * n as isize);
            assert!(v.coeffs().iter().all(|z| z.im.to_f64().abs() < 1e-60));
        }
    }

    #[test]
    fn circle_nodes_are_conjugate_symmetric() {
        let c = circle("1/2", "3");
        let nodes = c.nodes(7, P).unwrap().finite;
        for z in &nodes {
            assert!(nodes.contains(&z.conj()));
        }
    }

    #[test]
    fn classical_admissibility_is_zero() {
        let rep = InterpolationScheme::Classical
            .admissibility_report((-1.0, 1.0), &[], &[2, 4, 8], 0.1, P)
            .unwrap();
        for d in &rep.per_n {
            assert_eq!(d.min_distance, None);
            assert_eq!(d.arg_derivative_sup, 0.0);
            assert_eq!(d.suffast_sup, 0.0);
        }
        assert!(rep.admissible);
    }

    #[test]
    fn symmetric_circle_has_zero_imaginary_transform() {
        let rep = circle("0", "3")
            .admissibility_report((-1.0, 1.0), &[], &[1, 2, 5, 10, 20], 0.5, P)
            .unwrap();
        for d in &rep.per_n {
            assert_eq!(d.suffast_sup, 0.0);
        }
        assert!(rep.admissible, "{:?}", rep.flags);
    }

    #[test]
    fn clustered_nodes_are_flagged() {
        let mut nodes = BTreeMap::new();
        for n in 2..=20 {
            nodes.insert(
                n,
                ExplicitNodes {
                    finite: vec!["3i".into(); 2 * n],
                    infinity: 0,
                },
            );
        }
        let s = InterpolationScheme::from_spec(&SchemeSpec::Explicit { nodes }, P).unwrap();
        let ns: Vec<usize> = (2..=20).collect();
        let rep = s.admissibility_report((-1.0, 1.0), &[], &ns, 0.5, P).unwrap();
        assert!(rep.per_n.iter().all(|d| d.suffast_sup > 0.5));
        assert!(!rep.admissible);
        let sigma = s.asymptotic_distribution(P).unwrap();
        assert!((sigma.mass() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_counts_are_checked() {
        let mut nodes = BTreeMap::new();
        nodes.insert(
            2,
            ExplicitNodes {
                finite: vec!["1".into()],
                infinity: 1,
            },
        );
        assert!(InterpolationScheme::from_spec(&SchemeSpec::Explicit { nodes }, P).is_err());
    }

    #[test]
    fn spec_serde_round_trip() {
        let s = SchemeSpec::Circle {
            center: "0".into(),
            radius: "3".into(),
            samples: 1024,
        };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<SchemeSpec>(&j).unwrap(), s);
        let c: SchemeSpec = serde_json::from_str(r#"{"kind":"classical"}"#).unwrap();
        assert_eq!(c, SchemeSpec::Classical);
    }
}
