//! Logarithmic potentials, equilibrium measures and balayage onto finite
//! unions of real intervals, discretized by Chebyshev collocation.
//!
//! Everything here runs in `f64`: the quantities are compared at tolerances
//! of `1e-3` and coarser.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default collocation nodes per interval.
pub const DEFAULT_NODES: usize = 256;
/// Self-cell constant: the diagonal of the collocation matrix is
/// `log(1/(GAMMA · cell length))`.
pub const GAMMA: f64 = 0.25;
/// Masses compared by `weakstar_distance` must agree to this tolerance.
pub const MASS_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("evaluation point {0} is a carrier point")]
    CarrierHit(Complex64),
    #[error("collocation did not produce a nonnegative measure at N = {nodes}")]
    ConvergenceFailure { nodes: usize },
    #[error("masses differ: {0} vs {1}")]
    MassMismatch(f64, f64),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Finitely many weighted point masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    points: Vec<Complex64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Coincident points are merged by adding their weights.
    pub fn new(points: Vec<Complex64>, weights: Vec<f64>) -> Result<Self, PotentialError> {
        if points.len() != weights.len() {
            return Err(PotentialError::Invalid("points and weights differ in length".into()));
        }
        let mut pts: Vec<Complex64> = Vec::with_capacity(points.len());
        let mut ws: Vec<f64> = Vec::with_capacity(points.len());
        for (p, w) in points.into_iter().zip(weights) {
            if !(w >= 0.0) || !p.re.is_finite() || !p.im.is_finite() {
                return Err(PotentialError::Invalid(format!("bad mass {w} at {p}")));
            }
            match pts.iter().position(|q| *q == p) {
                Some(i) => ws[i] += w,
                None => {
                    pts.push(p);
                    ws.push(w);
                }
            }
        }
        Ok(DiscreteMeasure {
            points: pts,
            weights: ws,
        })
    }

    /// Counting measure scaled by `weight` per point.
    pub fn counting(points: &[Complex64], weight: f64) -> Result<Self, PotentialError> {
        DiscreteMeasure::new(points.to_vec(), vec![weight; points.len()])
    }

    /// Uniform measure of total `mass` on `count` equispaced circle points.
    pub fn uniform_circle(center: Complex64, radius: f64, count: usize, mass: f64) -> Self {
        let w = mass / count as f64;
        let points = (0..count)
            .map(|k| center + Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.5) / count as f64))
            .collect();
        DiscreteMeasure {
            points,
            weights: vec![w; count],
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scaled(&self, k: f64) -> Self {
        DiscreteMeasure {
            points: self.points.clone(),
            weights: self.weights.iter().map(|w| w * k).collect(),
        }
    }

    /// Total mass renormalized to `mass`.
    pub fn normalized_to(&self, mass: f64) -> Self {
        let m = self.mass();
        if m == 0.0 {
            return self.clone();
        }
        self.scaled(mass / m)
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: impl Fn(Complex64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum()
    }
}

/// `U^μ(z) = Σ w log(1/|z - p|)`.
pub fn log_potential(mu: &DiscreteMeasure, z: Complex64) -> Result<f64, PotentialError> {
    let mut acc = 0.0;
    for (p, w) in mu.points.iter().zip(&mu.weights) {
        let d = (z - p).norm();
        if d == 0.0 {
            return Err(PotentialError::CarrierHit(z));
        }
        acc -= w * d.ln();
    }
    Ok(acc)
}

/// `U(z)` of a measure on `system` whose weight `w_i` is spread uniformly
/// over collocation cell `i`; continuous across the nodes, unlike the
/// potential of the point masses.
pub fn cell_potential(system: &IntervalSystem, weights: &[f64], z: Complex64) -> f64 {
    // ∫ log|t - z| dt = Re[(t - z) Log(t - z) - (t - z)]
    let anti = |t: f64| {
        let u = Complex64::new(t, 0.0) - z;
        if u.norm() == 0.0 {
            0.0
        } else {
            (u * u.ln() - u).re
        }
    };
    system
        .cell_bounds()
        .iter()
        .zip(weights)
        .map(|(&(lo, hi), &w)| -w * (anti(hi) - anti(lo)) / (hi - lo))
        .sum()
}

/// Disjoint real intervals with Chebyshev collocation nodes on each.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSystem {
    intervals: Vec<(f64, f64)>,
    nodes_per: usize,
    nodes: Vec<f64>,
    cells: Vec<f64>,
    bounds: Vec<(f64, f64)>,
}

impl IntervalSystem {
    pub fn new(mut intervals: Vec<(f64, f64)>, nodes_per: usize) -> Result<Self, PotentialError> {
        if intervals.is_empty() || nodes_per < 2 {
            return Err(PotentialError::Invalid(
                "need at least one interval and two nodes".into(),
            ));
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (j, &(a, b)) in intervals.iter().enumerate() {
            if !(a < b) {
                return Err(PotentialError::Invalid(format!("interval [{a}, {b}] is empty")));
            }
            if j > 0 && intervals[j - 1].1 >= a {
                return Err(PotentialError::Invalid("intervals overlap".into()));
            }
        }
        let n = nodes_per;
        let mut nodes = Vec::with_capacity(n * intervals.len());
        let mut cells = Vec::with_capacity(n * intervals.len());
        let mut bounds = Vec::with_capacity(n * intervals.len());
        for &(a, b) in &intervals {
            let m = 0.5 * (a + b);
            let r = 0.5 * (b - a);
            for k in 1..=n {
                let th = (2 * k - 1) as f64 * PI / (2 * n) as f64;
                nodes.push(m - r * th.cos());
                let lo = ((k - 1) as f64 * PI / n as f64).cos();
                let hi = (k as f64 * PI / n as f64).cos();
                cells.push(r * (lo - hi));
                bounds.push((m - r * lo, m - r * hi));
            }
        }
        Ok(IntervalSystem {
            intervals,
            nodes_per,
            nodes,
            cells,
            bounds,
        })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn nodes_per(&self) -> usize {
        self.nodes_per
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    /// Collocation cells `[lo, hi]`, one per node.
    pub fn cell_bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn refined(&self) -> Self {
        IntervalSystem::new(self.intervals.clone(), self.nodes_per * 2).expect("already validated")
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| {
                if z.re >= a && z.re <= b {
                    z.im.abs()
                } else {
                    (z - a).norm().min((z - b).norm())
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn hull(&self) -> (f64, f64) {
        (self.intervals[0].0, self.intervals[self.intervals.len() - 1].1)
    }
}

/// LU factorization of the bordered collocation matrix
/// `[[A, -1], [1^T, 0]]` for a fixed interval system.
pub struct Collocation {
    system: IntervalSystem,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Collocation {
    pub fn new(system: IntervalSystem) -> Self {
        let x = system.nodes();
        let l = system.cells();
        let m = x.len();
        let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..m {
                a[(i, j)] = if i == j {
                    -(GAMMA * l[i]).ln()
                } else {
                    -(x[i] - x[j]).abs().ln()
                };
            }
            a[(i, m)] = -1.0;
            a[(m, i)] = 1.0;
        }
        Collocation { lu: a.lu(), system }
    }

    pub fn system(&self) -> &IntervalSystem {
        &self.system
    }

    /// Weights `w` and constant `c` with `Σ_j A_ij w_j - c = rhs_i` and
    /// `Σ w = mass`.
    pub fn solve(&self, rhs: &[f64], mass: f64) -> Result<(Vec<f64>, f64), PotentialError> {
        let m = self.system.nodes().len();
        let mut b = DVector::<f64>::zeros(m + 1);
        for (i, r) in rhs.iter().enumerate() {
            b[i] = *r;
        }
        b[m] = mass;
        let x = self.lu.solve(&b).ok_or(PotentialError::ConvergenceFailure {
            nodes: self.system.nodes_per(),
        })?;
        Ok((x.iter().take(m).copied().collect(), x[m]))
    }

    fn measure(&self, w: Vec<f64>) -> Result<DiscreteMeasure, PotentialError> {
        if w.iter().any(|v| !(*v >= 0.0)) {
            return Err(PotentialError::ConvergenceFailure {
                nodes: self.system.nodes_per(),
            });
        }
        let pts = self.system.nodes().iter().map(|&x| Complex64::new(x, 0.0)).collect();
        DiscreteMeasure::new(pts, w)
    }
}

/// Equilibrium measure of an interval system with its capacity and the
/// constant value `log(1/cap)` of its potential on the system.
#[derive(Clone, Debug)]
pub struct Equilibrium {
    pub measure: DiscreteMeasure,
    pub capacity: f64,
    pub robin: f64,
    pub system: IntervalSystem,
}

fn with_refinement<T>(
    system: &IntervalSystem,
    f: impl Fn(&Collocation) -> Result<T, PotentialError>,
) -> Result<(T, Collocation), PotentialError> {
    let col = Collocation::new(system.clone());
    match f(&col) {
        Ok(v) => Ok((v, col)),
        Err(PotentialError::ConvergenceFailure { .. }) => {
            let col = Collocation::new(system.refined());
            let v = f(&col)?;
            Ok((v, col))
        }
        Err(e) => Err(e),
    }
}

pub fn equilibrium_measure(system: &IntervalSystem) -> Result<Equilibrium, PotentialError> {
    let ((measure, c), col) = with_refinement(system, |col| {
        let rhs = vec![0.0; col.system().nodes().len()];
        let (w, c) = col.solve(&rhs, 1.0)?;
        Ok((col.measure(w)?, c))
    })?;
    Ok(Equilibrium {
        measure,
        capacity: (-c).exp(),
        robin: c,
        system: col.system().clone(),
    })
}

/// Result of sweeping a measure onto an interval system.
#[derive(Clone, Debug)]
pub struct Balayage {
    pub measure: DiscreteMeasure,
    /// `c` in `U^{μ̂} = U^μ + c` on the system.
    pub constant: f64,
    /// System the weights live on, refined if collocation needed it.
    pub system: IntervalSystem,
}

/// Balayage of a finite measure with carrier off the system.
pub fn balayage(mu: &DiscreteMeasure, system: &IntervalSystem) -> Result<Balayage, PotentialError> {
    for p in mu.points() {
        if p.im == 0.0 && system.contains(p.re) {
            return Err(PotentialError::Invalid(format!("carrier point {p} lies on the system")));
        }
    }
    let mass = mu.mass();
    let ((measure, constant), col) = with_refinement(system, |col| {
        let rhs: Vec<f64> = col
            .system()
            .nodes()
            .iter()
            .map(|&x| log_potential(mu, Complex64::new(x, 0.0)))
            .collect::<Result<_, _>>()?;
        let (w, c) = col.solve(&rhs, mass)?;
        Ok((col.measure(w)?, c))
    })?;
    Ok(Balayage {
        measure,
        constant,
        system: col.system().clone(),
    })
}

/// A measure that may carry mass at infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticDistribution {
    pub finite: Option<DiscreteMeasure>,
    pub infinity_mass: f64,
}

impl AsymptoticDistribution {
    pub fn at_infinity(mass: f64) -> Self {
        AsymptoticDistribution {
            finite: None,
            infinity_mass: mass,
        }
    }

    pub fn mass(&self) -> f64 {
        self.infinity_mass + self.finite.as_ref().map_or(0.0, DiscreteMeasure::mass)
    }
}

/// Balayage of an asymptotic distribution; the atom at infinity sweeps to
/// its mass times the equilibrium measure.
pub fn balayage_distribution(
    sigma: &AsymptoticDistribution,
    eq: &Equilibrium,
) -> Result<DiscreteMeasure, PotentialError> {
    let mut pts: Vec<Complex64> = Vec::new();
    let mut ws: Vec<f64> = Vec::new();
    if sigma.infinity_mass > 0.0 {
        let m = eq.measure.scaled(sigma.infinity_mass);
        pts.extend_from_slice(m.points());
        ws.extend_from_slice(m.weights());
    }
    if let Some(f) = &sigma.finite {
        let b = balayage(f, &eq.system)?;
        pts.extend_from_slice(b.measure.points());
        ws.extend_from_slice(b.measure.weights());
    }
    DiscreteMeasure::new(pts, ws)
}

/// Green potentials `U_D^σ` of the complement of an interval system.
pub struct GreenSolver {
    eq: Equilibrium,
    sweep: Option<(DiscreteMeasure, Balayage)>,
    infinity_mass: f64,
}

impl GreenSolver {
    pub fn new(sigma: &AsymptoticDistribution, system: &IntervalSystem) -> Result<Self, PotentialError> {
        let eq = equilibrium_measure(system)?;
        let sweep = match &sigma.finite {
            Some(f) if !f.is_empty() => Some((f.clone(), balayage(f, &eq.system)?)),
            _ => None,
        };
        Ok(GreenSolver {
            eq,
            sweep,
            infinity_mass: sigma.infinity_mass,
        })
    }

    pub fn equilibrium(&self) -> &Equilibrium {
        &self.eq
    }

    /// `g(z, ∞) = log(1/cap) - U^{μ_S}(z)`.
    pub fn green_infinity(&self, z: Complex64) -> Result<f64, PotentialError> {
        Ok(self.eq.robin - log_potential(&self.eq.measure, z)?)
    }

    /// `U_D^σ(z)`: `c - U^{σ̂}(z) + U^σ(z)` for the finite part plus the
    /// infinity mass times `g(z, ∞)`.
    pub fn green_potential(&self, z: Complex64) -> Result<f64, PotentialError> {
        let mut v = 0.0;
        if self.infinity_mass > 0.0 {
            v += self.infinity_mass * self.green_infinity(z)?;
        }
        if let Some((mu, b)) = &self.sweep {
            v += b.constant - log_potential(&b.measure, z)? + log_potential(mu, z)?;
        }
        Ok(v)
    }
}

pub fn green_potential(
    sigma: &AsymptoticDistribution,
    system: &IntervalSystem,
    z: Complex64,
) -> Result<f64, PotentialError> {
    GreenSolver::new(sigma, system)?.green_potential(z)
}

/// Kolmogorov distance between the projections of two measures onto ℝ.
pub fn weakstar_distance(nu: &DiscreteMeasure, mu: &DiscreteMeasure) -> Result<f64, PotentialError> {
    let (mn, mm) = (nu.mass(), mu.mass());
    if (mn - mm).abs() > MASS_TOL {
        return Err(PotentialError::MassMismatch(mn, mm));
    }
    let mut events: Vec<(f64, f64)> = nu
        .points()
        .iter()
        .zip(nu.weights())
        .map(|(p, w)| (p.re, *w))
        .chain(mu.points().iter().zip(mu.weights()).map(|(p, w)| (p.re, -*w)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: f64 = 0.0;
    let mut diff = 0.0;
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        while i < events.len() && events[i].0 == x {
            diff += events[i].1;
            i += 1;
        }
        best = best.max(diff.abs());
    }
    Ok(best)
}

/// `ψ(z) = z + sqrt(z^2 - 1)`, the exterior map of `[-1, 1]` onto
/// `|w| > 1`, continuous up to the interval from either side.
pub fn exterior_map(z: Complex64) -> Complex64 {
    let w = z + (z - 1.0).sqrt() * (z + 1.0).sqrt();
    if w.norm() < 1.0 {
        w.inv()
    } else {
        w
    }
}

/// `g(z, ∞)` for `C ∖ [-1, 1]`: `log|z + sqrt(z^2 - 1)|` with the branch
/// that exceeds one in modulus.
pub fn green_unit_interval(z: Complex64) -> f64 {
    exterior_map(z).norm().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> IntervalSystem {
        IntervalSystem::new(vec![(-1.0, 1.0)], DEFAULT_NODES).unwrap()
    }

    #[test]
    fn log_potential_examples() {
        let mu = DiscreteMeasure::new(vec![Complex64::new(0.0, 0.0)], vec![1.0]).unwrap();
        assert!((log_potential(&mu, Complex64::new(std::f64::consts::E, 0.0)).unwrap() + 1.0).abs() < 1e-15);
        let two = DiscreteMeasure::new(
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert_eq!(log_potential(&two, Complex64::new(0.0, 0.0)).unwrap(), 0.0);
        assert!(matches!(
            log_potential(&two, Complex64::new(1.0, 0.0)),
            Err(PotentialError::CarrierHit(_))
        ));
    }

    #[test]
    fn unit_interval_equilibrium() {
        let eq = equilibrium_measure(&unit()).unwrap();
        assert!((eq.capacity - 0.5).abs() < 1e-3, "cap = {}", eq.capacity);
        let z = Complex64::new(2.0, 0.0);
        let want = (2.0 / (2.0 + 3f64.sqrt())).ln();
        assert!((log_potential(&eq.measure, z).unwrap() - want).abs() < 1e-3);
        let sys = unit();
        for (k, (&x, &l)) in sys.nodes().iter().zip(sys.cells()).enumerate() {
            if x.abs() > 0.9 {
                continue;
            }
            let dens = 1.0 / (PI * (1.0 - x * x).sqrt()) * l;
            let w = eq.measure.weights()[k];
            assert!((w / dens - 1.0).abs() < 0.02, "x = {x}: {w} vs {dens}");
        }
    }

    #[test]
    fn capacity_scaling_and_monotonicity() {
        let eq = equilibrium_measure(&IntervalSystem::new(vec![(-2.0, 2.0)], DEFAULT_NODES).unwrap()).unwrap();
        assert!((eq.capacity - 1.0).abs() < 2e-3);
        let mut prev = 0.5;
        for alpha in [0.1, 0.3, 0.5] {
            let two = IntervalSystem::new(vec![(-1.0, -alpha), (alpha, 1.0)], 128).unwrap();
            let c = equilibrium_measure(&two).unwrap().capacity;
            assert!(c < prev + 1e-3 && c > (1.0 - alpha) / 4.0, "alpha {alpha}: {c}");
            prev = c;
        }
    }

    #[test]
    fn point_balayage_matches_harmonic_measure() {
        let sys = unit();
        let x0 = 2.0;
        let mu = DiscreteMeasure::new(vec![Complex64::new(x0, 0.0)], vec![1.0]).unwrap();
        let b = balayage(&mu, &sys).unwrap();
        assert!((b.measure.mass() - 1.0).abs() < 1e-12);
        for (k, (&x, &l)) in sys.nodes().iter().zip(sys.cells()).enumerate() {
            if x.abs() > 0.9 {
                continue;
            }
            let dens = (x0 * x0 - 1.0).sqrt() / (PI * (x0 - x) * (1.0 - x * x).sqrt()) * l;
            let w = b.measure.weights()[k];
            assert!((w / dens - 1.0).abs() < 0.02);
        }
        // Re ψ^{-k} is harmonic off [-1,1] including infinity and equals T_k on it
        for k in 1..=5 {
            let h = |t: Complex64| exterior_map(t).powi(-k).re;
            assert!((mu.integrate(h) - b.measure.integrate(h)).abs() < 1e-2, "k = {k}");
        }
    }

    #[test]
    fn green_potential_examples() {
        let sigma = AsymptoticDistribution::at_infinity(2.0);
        let g = green_potential(&sigma, &unit(), Complex64::new(2.0, 0.0)).unwrap();
        assert!((g - 2.0 * (2.0 + 3f64.sqrt()).ln()).abs() < 5e-3, "{g}");
        let circ = AsymptoticDistribution {
            finite: Some(DiscreteMeasure::uniform_circle(
                Complex64::new(0.0, 0.0),
                3.0,
                1024,
                2.0,
            )),
            infinity_mass: 0.0,
        };
        let solver = GreenSolver::new(&circ, &unit()).unwrap();
        let z = Complex64::new(0.0, 3.0);
        let a = solver.green_potential(z).unwrap();
        let b = solver.green_potential(z.conj()).unwrap();
        assert!(a > 0.0 && a.is_finite());
        assert!((a - b).abs() < 1e-9);
        for x in [-0.5, 0.1, 0.7] {
            let v = solver.green_potential(Complex64::new(x, 1e-6)).unwrap();
            assert!(v.abs() < 1e-2, "{x}: {v}");
        }
    }

    #[test]
    fn kolmogorov_distance_examples() {
        let a = DiscreteMeasure::new(vec![Complex64::new(0.0, 0.0)], vec![1.0]).unwrap();
        let b = DiscreteMeasure::new(vec![Complex64::new(1.0, 0.0)], vec![1.0]).unwrap();
        assert_eq!(weakstar_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(weakstar_distance(&a, &b).unwrap(), 1.0);
        assert!(matches!(
            weakstar_distance(&a, &b.scaled(2.0)),
            Err(PotentialError::MassMismatch(..))
        ));
        let cheb: Vec<Complex64> = (1..=40)
            .map(|k| Complex64::new(((2 * k - 1) as f64 * PI / 80.0).cos(), 0.0))
            .collect();
        let nu = DiscreteMeasure::counting(&cheb, 1.0 / 40.0).unwrap();
        let eq = equilibrium_measure(&unit()).unwrap();
        let d = weakstar_distance(&nu, &eq.measure.normalized_to(1.0)).unwrap();
        assert!(d <= 0.05, "{d}");
    }
}
