//! Quantitative verdicts on solved families: angle budgets, pole
//! distribution, pole attraction and convergence rates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::algebra::BigComplex;
use crate::measure::{argument_variation, MeasureError, Quadrature};
use crate::pade::{direct_error_many, error_eval_many_with, PadeApproximant, PadeError};
use crate::potential::{weakstar_distance, DiscreteMeasure, GreenSolver, IntervalSystem};
use crate::problem::Problem;

/// Poles farther than this from the support are left out of the counting
/// measure compared against the balayage.
pub const DEFAULT_RESTRICTION: f64 = 0.1;
pub const DEFAULT_DISTRIBUTION_THRESHOLD: f64 = 0.15;
pub const DEFAULT_EPS_CAP: f64 = 0.1;
pub const DEFAULT_MAX_FRACTION: f64 = 0.1;
/// Increases tolerated in a sequence that should decrease.
pub const ALLOWED_INVERSIONS: usize = 1;
/// Relative quadrature tolerance `2^-RATE_QUAD_BITS` for the error integral
/// behind observed rates.
pub const RATE_QUAD_BITS: u32 = 96;
/// Grid points per component for `V(φ)`.
pub const VARIATION_GRID: usize = 4096;

/// What the checkers read from one member of a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub n: usize,
    pub defect: usize,
    /// Zeros of `q_n` with multiplicity.
    pub poles: Vec<Complex64>,
}

impl From<&PadeApproximant> for FamilyMember {
    fn from(a: &PadeApproximant) -> Self {
        FamilyMember {
            n: a.n,
            defect: a.defect,
            poles: a.roots_c64(),
        }
    }
}

/// Principal argument in `(-π, π]` with `Arg(0) = π`, left continuous on ℝ.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.im == 0.0 && z.re <= 0.0 {
        PI
    } else {
        z.arg()
    }
}

/// Total angle under which the intervals are seen from `xi`.
pub fn angle(xi: Complex64, intervals: &[(f64, f64)]) -> f64 {
    intervals
        .iter()
        .map(|&(a, b)| (principal_arg(Complex64::new(a, 0.0) - xi) - principal_arg(Complex64::new(b, 0.0) - xi)).abs())
        .sum()
}

fn inversions(seq: &[f64]) -> usize {
    seq.windows(2).filter(|w| w[1] > w[0]).count()
}

/// Least-squares slope of `ys` against `xs`.
fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Right-hand side ingredients of the angle bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub covering: Vec<(f64, f64)>,
    /// `V(φ)` of the density argument.
    pub v_phi: f64,
    pub v_a: f64,
    /// `Σ_η m(η) Θ(η)`.
    pub pole_term: f64,
    pub s: usize,
}

impl Budget {
    /// Budget for the problem's own intervals as covering.
    pub fn for_problem(problem: &Problem, v_a: f64) -> Result<Self, MeasureError> {
        let covering = problem.measure.intervals_f64();
        let v_phi = if problem.measure.is_empty() {
            0.0
        } else {
            argument_variation(&problem.measure, VARIATION_GRID)?
        };
        let pole_term = problem
            .rational
            .poles()
            .iter()
            .map(|p| p.multiplicity() as f64 * angle(p.eta.to_c64(), &covering))
            .sum();
        Ok(Budget {
            covering,
            v_phi,
            v_a,
            pole_term,
            s: problem.rational.s(),
        })
    }

    /// `V(φ) + V_A + Σ m(η)Θ(η) + (m + s - 1)π`.
    pub fn rhs(&self) -> f64 {
        let m = self.covering.len() as f64;
        self.v_phi + self.v_a + self.pole_term + (m + self.s as f64 - 1.0) * PI
    }

    /// `V` bounding the excess attraction: `V(φ) + V_A + (m-1)π + 2 Σ m(η)Θ(η)`.
    pub fn excess_bound(&self) -> f64 {
        let m = self.covering.len() as f64;
        self.v_phi + self.v_a + (m - 1.0) * PI + 2.0 * self.pole_term
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetRow {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub budget: Budget,
    pub per_n: Vec<BudgetRow>,
    pub pass: bool,
}

/// `Σ_roots (π - Θ(ξ)) + (n - deg q_n) π`.
pub fn budget_lhs(member: &FamilyMember, covering: &[(f64, f64)]) -> f64 {
    let roots: f64 = member.poles.iter().map(|&xi| PI - angle(xi, covering)).sum();
    roots + member.defect as f64 * PI
}

pub fn variation_budget(family: &[FamilyMember], budget: &Budget) -> BudgetReport {
    let rhs = budget.rhs();
    let per_n: Vec<BudgetRow> = family
        .iter()
        .map(|m| {
            let lhs = budget_lhs(m, &budget.covering);
            BudgetRow {
                n: m.n,
                lhs,
                rhs,
                slack: rhs - lhs,
                ok: lhs <= rhs,
            }
        })
        .collect();
    let pass = per_n.iter().all(|r| r.ok);
    BudgetReport {
        budget: budget.clone(),
        per_n,
        pass,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub n: usize,
    pub near: usize,
    pub far: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub restriction: f64,
    pub threshold: f64,
    pub per_n: Vec<DistributionRow>,
    pub trend: Option<f64>,
    pub inversions: usize,
    pub pass: bool,
}

/// Kolmogorov distance between the unit-normalized counting measure of the
/// poles near `system` and the unit-normalized `sigma_hat`.
pub fn check_pole_distribution(
    family: &[FamilyMember],
    sigma_hat: &DiscreteMeasure,
    system: &IntervalSystem,
    restriction: f64,
    threshold: f64,
) -> DistributionReport {
    let target = sigma_hat.normalized_to(1.0);
    let per_n: Vec<DistributionRow> = family
        .iter()
        .map(|m| {
            let near: Vec<Complex64> = m
                .poles
                .iter()
                .filter(|&&p| system.distance(p) <= restriction)
                .map(|p| Complex64::new(p.re, 0.0))
                .collect();
            let distance = if near.is_empty() {
                1.0
            } else {
                DiscreteMeasure::counting(&near, 1.0)
                    .and_then(|nu| weakstar_distance(&nu.normalized_to(1.0), &target))
                    .unwrap_or(1.0)
            };
            DistributionRow {
                n: m.n,
                near: near.len(),
                far: m.poles.len() - near.len(),
                distance,
            }
        })
        .collect();
    let ns: Vec<f64> = per_n.iter().map(|r| r.n as f64).collect();
    let ds: Vec<f64> = per_n.iter().map(|r| r.distance).collect();
    let inv = inversions(&ds);
    let pass = !ds.is_empty() && inv <= ALLOWED_INVERSIONS && ds[ds.len() - 1] <= threshold;
    DistributionReport {
        restriction,
        threshold,
        trend: ls_slope(&ns, &ds),
        inversions: inv,
        per_n,
        pass,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractionRow {
    pub eta: Complex64,
    pub multiplicity: usize,
    pub radius: f64,
    /// `(n, count)` for every member.
    pub counts: Vec<(usize, usize)>,
    /// Smallest distance from `η` to a pole of `Π_n`, per member.
    pub nearest: Vec<(usize, f64)>,
    /// Min and max of the counts over the top third of the range.
    pub lower: usize,
    pub upper: usize,
    pub lower_ok: bool,
    pub excess: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractionReport {
    pub per_pole: Vec<AttractionRow>,
    /// `Σ_η (upper - m(η)) (π - Θ(η))`.
    pub excess_sum: f64,
    pub excess_bound: f64,
    pub pass: bool,
}

/// Half the distance from `eta` to the support and the other poles.
pub fn attraction_radius(eta: Complex64, others: &[Complex64], system: &IntervalSystem) -> f64 {
    let mut d = system.distance(eta);
    for &o in others {
        if o != eta {
            d = d.min((o - eta).norm());
        }
    }
    d / 2.0
}

/// Pole counts in disks around the poles of the rational part; limits in
/// `n` are proxied by min and max over the top third of the range.
pub fn check_pole_attraction(
    family: &[FamilyMember],
    poles: &[(Complex64, usize)],
    system: &IntervalSystem,
    budget: &Budget,
) -> AttractionReport {
    let etas: Vec<Complex64> = poles.iter().map(|p| p.0).collect();
    let mut sorted: Vec<&FamilyMember> = family.iter().collect();
    sorted.sort_by_key(|m| m.n);
    let top = sorted.len().div_ceil(3);
    let tail = &sorted[sorted.len() - top..];
    let mut excess_sum = 0.0;
    let per_pole: Vec<AttractionRow> = poles
        .iter()
        .map(|&(eta, mult)| {
            let radius = attraction_radius(eta, &etas, system);
            let count = |m: &FamilyMember| m.poles.iter().filter(|p| (**p - eta).norm() < radius).count();
            let counts: Vec<(usize, usize)> = sorted.iter().map(|m| (m.n, count(m))).collect();
            let nearest = sorted
                .iter()
                .map(|m| {
                    (
                        m.n,
                        m.poles.iter().map(|p| (p - eta).norm()).fold(f64::INFINITY, f64::min),
                    )
                })
                .collect();
            let lower = tail.iter().map(|m| count(m)).min().unwrap_or(0);
            let upper = tail.iter().map(|m| count(m)).max().unwrap_or(0);
            let excess = upper.saturating_sub(mult);
            excess_sum += excess as f64 * (PI - angle(eta, &budget.covering));
            AttractionRow {
                eta,
                multiplicity: mult,
                radius,
                counts,
                nearest,
                lower,
                upper,
                lower_ok: lower >= mult,
                excess,
            }
        })
        .collect();
    let excess_bound = budget.excess_bound();
    let pass = per_pole.iter().all(|r| r.lower_ok) && excess_sum <= excess_bound;
    AttractionReport {
        per_pole,
        excess_sum,
        excess_bound,
        pass,
    }
}

/// Rectangular grid for the convergence-in-capacity proxy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityGrid {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Points this close to the support are dropped.
    pub support_margin: f64,
    /// Radius of the disks dropped around poles of `R` and spurious poles.
    pub pole_radius: f64,
}

impl CapacityGrid {
    /// Hull widened by one in every direction, 13 x 13 points.
    pub fn around(hull: (f64, f64)) -> Self {
        CapacityGrid {
            re: (hull.0 - 1.0, hull.1 + 1.0),
            im: (-1.0, 1.0),
            nx: 13,
            ny: 13,
            support_margin: 0.05,
            pole_radius: 0.1,
        }
    }

    pub fn points(&self) -> Vec<Complex64> {
        let step = |lo: f64, hi: f64, k: usize, n: usize| {
            if n <= 1 {
                (lo + hi) / 2.0
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for k in 0..self.nx {
                out.push(Complex64::new(
                    step(self.re.0, self.re.1, k, self.nx),
                    step(self.im.0, self.im.1, j, self.ny),
                ));
            }
        }
        out
    }
}

/// `|F(z) - Π_n(z)|^{1/2n}`; the error integral is used when it is
/// defined, since it keeps full relative accuracy where the error is far
/// below the quadrature tolerance.
pub fn observed_rate(problem: &Problem, approx: &PadeApproximant, z: Complex64) -> Result<f64, PadeError> {
    observed_rates(problem, approx, &[z])?.pop().expect("one point")
}

/// [`observed_rate`] at many points with one quadrature.
pub fn observed_rates(
    problem: &Problem,
    approx: &PadeApproximant,
    zs: &[Complex64],
) -> Result<Vec<Result<f64, PadeError>>, PadeError> {
    let zb: Vec<BigComplex> = zs.iter().map(|&z| BigComplex::from_c64(problem.prec(), z)).collect();
    let quad = Quadrature::new(problem.prec(), Float::with_val(problem.prec(), 1) >> RATE_QUAD_BITS);
    let errs = match error_eval_many_with(problem, approx, &zb, &quad) {
        Err(PadeError::DegenerateChoice { .. }) => {
            direct_error_many(problem, approx, &zb)?.into_iter().map(Ok).collect()
        }
        other => other?,
    };
    let k = 1.0 / (2.0 * approx.n as f64);
    Ok(errs.into_iter().map(|e| e.map(|e| e.abs_f64().powf(k))).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub n: usize,
    pub points: usize,
    /// Grid fraction with `|observed - exp(-U^σ/2)| > ε`.
    pub fraction: f64,
    /// Grid fraction with `|observed - exp(-U^σ)| > ε`.
    pub fraction_literal: f64,
    pub median_deviation: f64,
    pub median_deviation_literal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub grid: CapacityGrid,
    pub eps: f64,
    pub max_fraction: f64,
    pub proxy: String,
    pub per_n: Vec<CapacityRow>,
    /// Verdict against `exp(-U^σ/2)`, the rate of `σ` rescaled to unit mass.
    pub pass: bool,
    /// Verdict against `exp(-U^σ)` with `σ` of mass 2.
    pub pass_literal: bool,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn deviation_pass(fr: &[f64], max_fraction: f64) -> bool {
    !fr.is_empty() && fr[fr.len() - 1] <= max_fraction && inversions(fr) <= ALLOWED_INVERSIONS
}

/// `family` pairs each approximant with the problem instance (and so the
/// precision) it was solved at.
pub fn check_capacity_convergence(
    family: &[(&Problem, &PadeApproximant)],
    green: &GreenSolver,
    grid: &CapacityGrid,
    eps: f64,
    max_fraction: f64,
) -> CapacityReport {
    let system = &green.equilibrium().system;
    let system_poles: Vec<Complex64> = family
        .first()
        .map(|(pr, _)| pr.rational.poles().iter().map(|p| p.eta.to_c64()).collect())
        .unwrap_or_default();
    let base: Vec<(Complex64, f64)> = grid
        .points()
        .into_iter()
        .filter(|&z| {
            system.distance(z) > grid.support_margin && system_poles.iter().all(|p| (p - z).norm() > grid.pole_radius)
        })
        .filter_map(|z| green.green_potential(z).ok().map(|u| (z, u)))
        .collect();
    let mut sorted: Vec<&(&Problem, &PadeApproximant)> = family.iter().collect();
    sorted.sort_by_key(|(_, a)| a.n);
    let per_n: Vec<CapacityRow> = sorted
        .iter()
        .map(|&&(problem, a)| {
            let spurious: Vec<Complex64> = a
                .roots_c64()
                .into_iter()
                .filter(|&p| system.distance(p) > DEFAULT_RESTRICTION)
                .collect();
            let kept: Vec<(Complex64, f64)> = base
                .iter()
                .copied()
                .filter(|(z, _)| spurious.iter().all(|p| (p - z).norm() > grid.pole_radius))
                .collect();
            let zs: Vec<Complex64> = kept.iter().map(|k| k.0).collect();
            let obs = observed_rates(problem, a, &zs).unwrap_or_default();
            let devs: Vec<(f64, f64)> = kept
                .iter()
                .zip(obs)
                .filter_map(|(&(_, u), o)| {
                    let o = o.ok()?;
                    Some(((o - (-u / 2.0).exp()).abs(), (o - (-u).exp()).abs()))
                })
                .collect();
            let pts = devs.len().max(1) as f64;
            CapacityRow {
                n: a.n,
                points: devs.len(),
                fraction: devs.iter().filter(|d| d.0 > eps).count() as f64 / pts,
                fraction_literal: devs.iter().filter(|d| d.1 > eps).count() as f64 / pts,
                median_deviation: median(devs.iter().map(|d| d.0).collect()),
                median_deviation_literal: median(devs.iter().map(|d| d.1).collect()),
            }
        })
        .collect();
    let fr: Vec<f64> = per_n.iter().map(|r| r.fraction).collect();
    let fl: Vec<f64> = per_n.iter().map(|r| r.fraction_literal).collect();
    CapacityReport {
        grid: grid.clone(),
        eps,
        max_fraction,
        proxy: "exceptional set measured by grid fraction, not by capacity".into(),
        pass: deviation_pass(&fr, max_fraction),
        pass_literal: deviation_pass(&fl, max_fraction),
        per_n,
    }
}
