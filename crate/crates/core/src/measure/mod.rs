//! Complex measures on finite unions of real intervals, rational parts,
//! and the integrals built from them.

pub mod expr;
pub mod quad;

use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{BigComplex, Poly};
pub use expr::{parse_complex_literal, Compiled, DensityExpr, ExprError};
pub use quad::{GaussLegendre, Quadrature};

/// Sample count used to validate densities at construction.
pub const VALIDATION_SAMPLES: usize = 257;
/// Default lower bound on |density| over the validation samples.
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error(transparent)]
    Parse(#[from] ExprError),
    #[error("quadrature did not converge within {panels} panels")]
    QuadFailure { panels: usize },
    #[error("point lies on the support (distance {distance:e})")]
    PointOnSupport { distance: f64 },
    #[error("point coincides with pole {index} of the rational part")]
    PointAtPole { index: usize },
    #[error("argument jump {jump:.3} at t = {position} on component {component} (grid too coarse)")]
    UnwrapFailure { component: usize, position: f64, jump: f64 },
    #[error("density on component {component} drops to {min:e}, below the floor {floor:e}")]
    DensityFloor { component: usize, min: f64, floor: f64 },
}

/// How the density relates to `dλ` on an interval.
///
/// With `Chebyshev`, `dλ(t) = h(t) dt / sqrt((t-a)(b-t))` and integrals are
/// taken in `θ` after `t = m + r cos θ`, where the weight cancels exactly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointWeight {
    #[default]
    None,
    Chebyshev,
}

#[derive(Clone, Debug)]
pub struct Component {
    pub a: Float,
    pub b: Float,
    pub density: DensityExpr,
    pub weight: EndpointWeight,
    compiled: Compiled,
}

impl Component {
    pub fn new(a: Float, b: Float, density: DensityExpr, weight: EndpointWeight) -> Self {
        let compiled = density.compile(a.prec());
        Component {
            a,
            b,
            density,
            weight,
            compiled,
        }
    }

    /// `h(t)` at a real point.
    pub fn density_at(&self, t: &Float) -> BigComplex {
        self.compiled.eval(&BigComplex::from_real(t.clone()))
    }

    fn sample(&self, k: usize, count: usize) -> Float {
        let prec = self.a.prec();
        let len = Float::with_val(prec, &self.b - &self.a);
        Float::with_val(prec, len * k as u32) / (count - 1) as u32 + &self.a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FloorStatus {
    Satisfied,
    Waived,
}

/// Sampled lower bound on |density| recorded at construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCheck {
    pub floor: f64,
    pub observed_min: f64,
    pub status: FloorStatus,
}

#[derive(Clone, Debug)]
pub struct ComplexMeasure {
    components: Vec<Component>,
    check: DensityCheck,
    prec: u32,
}

impl ComplexMeasure {
    /// Validates and sorts the components by left endpoint.
    ///
    /// Densities are sampled on a uniform grid including the endpoints and
    /// must be finite there. Unless `waive_floor` is set, the smallest
    /// sampled |h| must reach `floor`.
    pub fn new(mut components: Vec<Component>, prec: u32, floor: f64, waive_floor: bool) -> Result<Self, MeasureError> {
        components.sort_by(|x, y| x.a.partial_cmp(&y.a).expect("finite endpoints"));
        for (j, c) in components.iter().enumerate() {
            if !c.a.is_finite() || !c.b.is_finite() || c.a >= c.b {
                return Err(MeasureError::InvalidMeasure(format!(
                    "component {j} has empty or non-finite interval [{}, {}]",
                    c.a.to_f64(),
                    c.b.to_f64()
                )));
            }
            if j > 0 && components[j - 1].b >= c.a {
                return Err(MeasureError::InvalidMeasure(format!(
                    "components {} and {j} overlap",
                    j - 1
                )));
            }
        }
        let mut observed_min = f64::INFINITY;
        for (j, c) in components.iter().enumerate() {
            let mut comp_min = f64::INFINITY;
            for k in 0..VALIDATION_SAMPLES {
                let t = c.sample(k, VALIDATION_SAMPLES);
                let h = c.density_at(&t);
                if !h.is_finite() {
                    return Err(MeasureError::InvalidMeasure(format!(
                        "density `{}` is not finite at t = {}",
                        c.density,
                        t.to_f64()
                    )));
                }
                comp_min = comp_min.min(h.abs_f64());
            }
            if !waive_floor && comp_min < floor {
                return Err(MeasureError::DensityFloor {
                    component: j,
                    min: comp_min,
                    floor,
                });
            }
            observed_min = observed_min.min(comp_min);
        }
        let status = if waive_floor {
            FloorStatus::Waived
        } else {
            FloorStatus::Satisfied
        };
        Ok(ComplexMeasure {
            components,
            check: DensityCheck {
                floor,
                observed_min,
                status,
            },
            prec,
        })
    }

    /// The zero measure (no components).
    pub fn empty(prec: u32) -> Self {
        ComplexMeasure {
            components: Vec::new(),
            check: DensityCheck {
                floor: 0.0,
                observed_min: f64::INFINITY,
                status: FloorStatus::Waived,
            },
            prec,
        }
    }

    pub fn arcsine(prec: u32) -> Self {
        let c = Component::new(
            Float::with_val(prec, -1),
            Float::with_val(prec, 1),
            DensityExpr::parse("1/pi").expect("constant density"),
            EndpointWeight::Chebyshev,
        );
        ComplexMeasure::new(vec![c], prec, 0.0, false).expect("valid arcsine measure")
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn density_check(&self) -> &DensityCheck {
        &self.check
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Convex hull of the support, if any.
    pub fn hull(&self) -> Option<(Float, Float)> {
        let first = self.components.first()?;
        let last = self.components.last()?;
        Some((first.a.clone(), last.b.clone()))
    }

    pub fn intervals_f64(&self) -> Vec<(f64, f64)> {
        self.components.iter().map(|c| (c.a.to_f64(), c.b.to_f64())).collect()
    }

    pub fn distance_to_support(&self, z: &BigComplex) -> Float {
        let mut best = Float::with_val(self.prec, f64::INFINITY);
        for c in &self.components {
            let d = interval_distance(&c.a, &c.b, z);
            if d < best {
                best = d;
            }
        }
        best
    }

    /// Distance to the closed convex hull of the support.
    pub fn distance_to_hull(&self, z: &BigComplex) -> Float {
        match self.hull() {
            Some((a, b)) => interval_distance(&a, &b, z),
            None => Float::with_val(self.prec, f64::INFINITY),
        }
    }

    /// `∫ f(t) dλ(t)` for a vector of integrands written by `f(t, out)`.
    pub fn integrate_vec<F>(&self, quad: &Quadrature, dim: usize, mut f: F) -> Result<Vec<BigComplex>, MeasureError>
    where
        F: FnMut(&Float, &mut [BigComplex]),
    {
        let prec = self.prec;
        let mut acc = vec![BigComplex::zero(prec); dim];
        for c in &self.components {
            let part = match c.weight {
                EndpointWeight::None => quad.integrate_vec(&c.a, &c.b, dim, |t, out| {
                    f(t, out);
                    let h = c.density_at(t);
                    for o in out.iter_mut() {
                        *o = &*o * &h;
                    }
                })?,
                EndpointWeight::Chebyshev => {
                    let mid = Float::with_val(prec, &c.a + &c.b) / 2u32;
                    let rad = Float::with_val(prec, &c.b - &c.a) / 2u32;
                    let zero = Float::new(prec);
                    let pi = BigComplex::pi(prec);
                    quad.integrate_vec(&zero, &pi, dim, |th, out| {
                        let t = Float::with_val(prec, th.cos_ref()) * &rad + &mid;
                        f(&t, out);
                        let h = c.density_at(&t);
                        for o in out.iter_mut() {
                            *o = &*o * &h;
                        }
                    })?
                }
            };
            for (a, p) in acc.iter_mut().zip(&part) {
                *a += p;
            }
        }
        Ok(acc)
    }

    pub fn integrate<F>(&self, quad: &Quadrature, mut f: F) -> Result<BigComplex, MeasureError>
    where
        F: FnMut(&Float) -> BigComplex,
    {
        let v = self.integrate_vec(quad, 1, |t, out| out[0] = f(t))?;
        Ok(v.into_iter().next().expect("one component"))
    }

    /// Rejects `z` within `10 · 2^-prec · (1+|z|)` of the support.
    pub fn check_off_support(&self, z: &BigComplex) -> Result<(), MeasureError> {
        let d = self.distance_to_support(z);
        let eps = Float::with_val(self.prec, 1) >> self.prec;
        let guard = Float::with_val(self.prec, z.abs() + 1u32) * eps * 10u32;
        if d <= guard {
            return Err(MeasureError::PointOnSupport { distance: d.to_f64() });
        }
        Ok(())
    }
}

fn interval_distance(a: &Float, b: &Float, z: &BigComplex) -> Float {
    let prec = z.prec();
    if z.re >= *a && z.re <= *b {
        Float::with_val(prec, z.im.abs_ref())
    } else {
        let ra = (z - &BigComplex::from_real(a.clone())).abs();
        let rb = (z - &BigComplex::from_real(b.clone())).abs();
        if ra < rb {
            ra
        } else {
            rb
        }
    }
}

/// One pole `η` of the rational part with Laurent coefficients
/// `r_0..r_{m-1}`, contributing `Σ_k r_k / (z-η)^{k+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pole {
    pub eta: BigComplex,
    pub coeffs: Vec<BigComplex>,
}

impl Pole {
    pub fn multiplicity(&self) -> usize {
        self.coeffs.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RationalPart {
    poles: Vec<Pole>,
}

impl RationalPart {
    pub fn new(poles: Vec<Pole>) -> Result<Self, MeasureError> {
        for (i, p) in poles.iter().enumerate() {
            if p.coeffs.last().is_none_or(BigComplex::is_zero) {
                return Err(MeasureError::InvalidMeasure(format!(
                    "pole {i} needs a nonzero leading Laurent coefficient"
                )));
            }
            for (j, q) in poles.iter().enumerate().take(i) {
                if p.eta == q.eta {
                    return Err(MeasureError::InvalidMeasure(format!("poles {j} and {i} coincide")));
                }
            }
        }
        Ok(RationalPart { poles })
    }

    pub fn empty() -> Self {
        RationalPart::default()
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Total multiplicity `s`.
    pub fn s(&self) -> usize {
        self.poles.iter().map(Pole::multiplicity).sum()
    }

    /// `Q_s(z) = Π (z-η)^{m(η)}`.
    pub fn q_s(&self, prec: u32) -> Poly {
        let mut roots = Vec::with_capacity(self.s());
        for p in &self.poles {
            for _ in 0..p.multiplicity() {
                roots.push(p.eta.clone());
            }
        }
        Poly::from_roots(&roots, prec)
    }

    /// Rejects poles lying on the support of `lambda`.
    pub fn check_against(&self, lambda: &ComplexMeasure) -> Result<(), MeasureError> {
        for (i, p) in self.poles.iter().enumerate() {
            if lambda.check_off_support(&p.eta).is_err() {
                return Err(MeasureError::InvalidMeasure(format!("pole {i} lies on the support")));
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: &BigComplex) -> Result<BigComplex, MeasureError> {
        let prec = z.prec();
        let mut acc = BigComplex::zero(prec);
        for (i, p) in self.poles.iter().enumerate() {
            let d = z - &p.eta;
            if d.is_zero() {
                return Err(MeasureError::PointAtPole { index: i });
            }
            let inv = d.recip();
            let mut pw = inv.clone();
            for r in &p.coeffs {
                acc += &(r * &pw);
                pw = &pw * &inv;
            }
        }
        Ok(acc)
    }

    /// Coefficient of `z^{-j-1}` in the expansion at infinity.
    pub fn laurent_moment(&self, j: usize, prec: u32) -> BigComplex {
        let mut acc = BigComplex::zero(prec);
        for p in &self.poles {
            for (k, r) in p.coeffs.iter().enumerate() {
                if k > j {
                    break;
                }
                let b = binomial(j, k, prec);
                let term = (r * &p.eta.powi((j - k) as i32)).scale(&b);
                acc += &term;
            }
        }
        acc
    }
}

/// `binom(j, k)` as an exact float (exact while it fits in `prec` bits).
pub fn binomial(j: usize, k: usize, prec: u32) -> Float {
    if k > j {
        return Float::new(prec);
    }
    let k = k.min(j - k);
    let mut b = Float::with_val(prec, 1);
    for i in 0..k {
        b *= (j - i) as u32;
        b /= (i + 1) as u32;
    }
    b
}

/// `∫ dλ(t) / (z - t)`.
pub fn cauchy_transform(
    lambda: &ComplexMeasure,
    z: &BigComplex,
    quad: &Quadrature,
) -> Result<BigComplex, MeasureError> {
    lambda.check_off_support(z)?;
    lambda.integrate(quad, |t| (z - &BigComplex::from_real(t.clone())).recip())
}

/// `∫ dλ(t) / (z - t)` at many points through one vector quadrature.
pub fn cauchy_transform_many(
    lambda: &ComplexMeasure,
    zs: &[BigComplex],
    quad: &Quadrature,
) -> Result<Vec<BigComplex>, MeasureError> {
    for z in zs {
        lambda.check_off_support(z)?;
    }
    lambda.integrate_vec(quad, zs.len(), |t, out| {
        let tc = BigComplex::from_real(t.clone());
        for (o, z) in out.iter_mut().zip(zs) {
            *o = (z - &tc).recip();
        }
    })
}

/// `F(z) = ∫ dλ(t)/(z-t) + R(z)`.
pub fn eval_f(
    lambda: &ComplexMeasure,
    r: &RationalPart,
    z: &BigComplex,
    quad: &Quadrature,
) -> Result<BigComplex, MeasureError> {
    let rz = r.eval(z)?;
    Ok(cauchy_transform(lambda, z, quad)? + rz)
}

/// `F` at many points.
pub fn eval_f_many(
    lambda: &ComplexMeasure,
    r: &RationalPart,
    zs: &[BigComplex],
    quad: &Quadrature,
) -> Result<Vec<BigComplex>, MeasureError> {
    let rz = zs.iter().map(|z| r.eval(z)).collect::<Result<Vec<_>, _>>()?;
    let ct = cauchy_transform_many(lambda, zs, quad)?;
    Ok(ct.into_iter().zip(&rz).map(|(c, r)| &c + r).collect())
}

/// Coefficients `c_0..c_J` of `F(z) = Σ c_j z^{-j-1}` at infinity.
pub fn moments(
    lambda: &ComplexMeasure,
    r: &RationalPart,
    j_max: usize,
    quad: &Quadrature,
) -> Result<Vec<BigComplex>, MeasureError> {
    let prec = lambda.prec();
    let mut c = lambda.integrate_vec(quad, j_max + 1, |t, out| {
        let mut p = BigComplex::one(prec);
        let tc = BigComplex::from_real(t.clone());
        for o in out.iter_mut() {
            *o = p.clone();
            p = &p * &tc;
        }
    })?;
    for (j, cj) in c.iter_mut().enumerate() {
        *cj += &r.laurent_moment(j, prec);
    }
    Ok(c)
}

/// Grid lower bound on the total variation of `arg h` over the support.
///
/// Each component is sampled at `grid_n` equispaced points and unwrapped by
/// nearest-branch continuation; consecutive components are joined by the
/// smallest jump between the end value of one and the start value of the
/// next.
pub fn argument_variation(lambda: &ComplexMeasure, grid_n: usize) -> Result<f64, MeasureError> {
    let grid_n = grid_n.max(2);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut total = 0.0;
    let mut prev_end: Option<BigComplex> = None;
    for (j, c) in lambda.components().iter().enumerate() {
        let mut prev: Option<BigComplex> = None;
        for k in 0..grid_n {
            let t = c.sample(k, grid_n);
            let h = c.density_at(&t);
            if h.is_zero() {
                return Err(MeasureError::UnwrapFailure {
                    component: j,
                    position: t.to_f64(),
                    jump: f64::NAN,
                });
            }
            if let Some(p) = &prev {
                let jump = (&h * &p.conj()).arg().to_f64();
                if jump.abs() >= half_pi {
                    return Err(MeasureError::UnwrapFailure {
                        component: j,
                        position: t.to_f64(),
                        jump,
                    });
                }
                total += jump.abs();
            } else if let Some(e) = &prev_end {
                total += (&h * &e.conj()).arg().to_f64().abs();
            }
            prev = Some(h);
        }
        prev_end = prev;
    }
    Ok(total)
}
