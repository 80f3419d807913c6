//! Textual problem descriptions and their instantiation at a precision.

use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Tolerances;
use crate::measure::{
    parse_complex_literal, ComplexMeasure, Component, DensityExpr, EndpointWeight, ExprError, MeasureError, Pole,
    Quadrature, RationalPart, DEFAULT_DENSITY_FLOOR,
};
use crate::scheme::{InterpolationScheme, SchemeError, SchemeSpec};

/// Default minimal distance between finite nodes and the hull or poles.
pub const DEFAULT_CLEARANCE: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error(transparent)]
    Parse(#[from] ExprError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("invalid problem: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub a: String,
    pub b: String,
    pub density: DensityExpr,
    #[serde(default)]
    pub weight: EndpointWeight,
}

/// `Σ_k coeffs[k] / (z - eta)^{k+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleSpec {
    pub eta: String,
    pub coeffs: Vec<String>,
}

/// Relative tolerances; unset entries follow the precision.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nullspace: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<f64>,
}

fn default_floor() -> f64 {
    DEFAULT_DENSITY_FLOOR
}

fn default_clearance() -> f64 {
    DEFAULT_CLEARANCE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub measure: Vec<ComponentSpec>,
    #[serde(default)]
    pub poles: Vec<PoleSpec>,
    pub scheme: SchemeSpec,
    #[serde(default = "default_floor")]
    pub density_floor: f64,
    #[serde(default)]
    pub waive_density_floor: bool,
    #[serde(default = "default_clearance")]
    pub clearance: f64,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
}

impl ProblemSpec {
    /// Arcsine measure on [-1, 1], no rational part, classical scheme.
    pub fn markov_arcsine() -> Self {
        ProblemSpec {
            measure: vec![ComponentSpec {
                a: "-1".into(),
                b: "1".into(),
                density: DensityExpr::parse("1/pi").expect("constant"),
                weight: EndpointWeight::Chebyshev,
            }],
            poles: Vec::new(),
            scheme: SchemeSpec::Classical,
            density_floor: DEFAULT_DENSITY_FLOOR,
            waive_density_floor: false,
            clearance: DEFAULT_CLEARANCE,
            tolerances: ToleranceSpec::default(),
        }
    }
}

/// Tolerances and the quadrature rule of one precision.
#[derive(Clone, Debug)]
pub struct Numerics {
    pub tol: Tolerances,
    pub quad: Quadrature,
}

impl Numerics {
    pub fn new(prec: u32, overrides: &ToleranceSpec) -> Self {
        let mut tol = Tolerances::for_precision(prec);
        let set = |slot: &mut Float, v: Option<f64>| {
            if let Some(v) = v {
                *slot = Float::with_val(prec, v);
            }
        };
        set(&mut tol.drop, overrides.drop);
        set(&mut tol.nullspace, overrides.nullspace);
        set(&mut tol.root, overrides.root);
        set(&mut tol.quad, overrides.quad);
        let quad = Quadrature::new(prec, tol.quad.clone());
        Numerics { tol, quad }
    }

    pub fn prec(&self) -> u32 {
        self.tol.prec
    }
}

/// A problem instantiated at one working precision.
#[derive(Clone, Debug)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub measure: ComplexMeasure,
    pub rational: RationalPart,
    pub scheme: InterpolationScheme,
    pub numerics: Numerics,
}

fn parse_real(s: &str, prec: u32) -> Result<Float, ProblemError> {
    let z = parse_complex_literal(s, prec)?;
    if !z.im.is_zero() {
        return Err(ProblemError::Invalid(format!("interval endpoint `{s}` is not real")));
    }
    Ok(z.re)
}

impl Problem {
    pub fn build(spec: &ProblemSpec, prec: u32) -> Result<Self, ProblemError> {
        if prec < crate::algebra::MIN_PRECISION {
            return Err(ProblemError::Invalid(format!(
                "precision {prec} is below the minimum {}",
                crate::algebra::MIN_PRECISION
            )));
        }
        let comps = spec
            .measure
            .iter()
            .map(|c| {
                Ok(Component::new(
                    parse_real(&c.a, prec)?,
                    parse_real(&c.b, prec)?,
                    c.density.clone(),
                    c.weight,
                ))
            })
            .collect::<Result<Vec<_>, ProblemError>>()?;
        let measure = if comps.is_empty() {
            ComplexMeasure::empty(prec)
        } else {
            ComplexMeasure::new(comps, prec, spec.density_floor, spec.waive_density_floor)?
        };
        let poles = spec
            .poles
            .iter()
            .map(|p| {
                Ok(Pole {
                    eta: parse_complex_literal(&p.eta, prec)?,
                    coeffs: p
                        .coeffs
                        .iter()
                        .map(|c| parse_complex_literal(c, prec))
                        .collect::<Result<_, _>>()?,
                })
            })
            .collect::<Result<Vec<_>, ProblemError>>()?;
        let rational = RationalPart::new(poles)?;
        rational.check_against(&measure)?;
        let scheme = InterpolationScheme::from_spec(&spec.scheme, prec)?;
        Ok(Problem {
            spec: spec.clone(),
            measure,
            rational,
            scheme,
            numerics: Numerics::new(prec, &spec.tolerances),
        })
    }

    pub fn prec(&self) -> u32 {
        self.numerics.prec()
    }
}
