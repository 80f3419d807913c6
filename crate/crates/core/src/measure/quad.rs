//! Adaptive Gauss–Legendre quadrature for vector-valued complex integrands.

use rug::Float;

use super::MeasureError;
use crate::algebra::BigComplex;

/// Default number of Gauss–Legendre nodes per panel.
pub const DEFAULT_ORDER: usize = 32;
/// Default cap on the number of live panels.
pub const DEFAULT_PANEL_CAP: usize = 1 << 16;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<Float>,
    weights: Vec<Float>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the three-term recurrence, at `prec`
    /// bits plus a small guard.
    pub fn new(order: usize, prec: u32) -> Self {
        assert!(order >= 1);
        let wp = prec + 32;
        let n = order;
        let pi = BigComplex::pi(wp);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let step_tol = Float::with_val(wp, 1) >> (prec + 4);
        for k in 1..=n {
            // cos((k - 1/4) pi / (n + 1/2))
            let th = Float::with_val(wp, &pi * (4 * k as u32 - 1)) / (4 * n as u32 + 2);
            let mut x = Float::with_val(wp, th.cos_ref());
            let mut dp = Float::new(wp);
            for _ in 0..200 {
                let (p, d) = legendre(n, &x);
                let dx = Float::with_val(wp, &p / &d);
                x -= &dx;
                dp = d;
                if dx.abs() <= step_tol {
                    let (_, d) = legendre(n, &x);
                    dp = d;
                    break;
                }
            }
            let one_minus = Float::with_val(wp, 1u32 - Float::with_val(wp, &x * &x));
            let w = Float::with_val(wp, 2u32) / (one_minus * Float::with_val(wp, &dp * &dp));
            nodes.push(Float::with_val(prec, &x));
            weights.push(Float::with_val(prec, &w));
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Float] {
        &self.nodes
    }

    pub fn weights(&self) -> &[Float] {
        &self.weights
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let a = Float::with_val(prec, x * &p1) * (2 * k as u32 - 1);
        let b = Float::with_val(prec, &p0 * (k as u32 - 1));
        let p2 = (a - b) / k as u32;
        p0 = p1;
        p1 = p2;
    }
    if n == 1 {
        p0 = Float::with_val(prec, 1);
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = Float::with_val(prec, x * &p1) - &p0;
    let den = Float::with_val(prec, x * x) - 1u32;
    let d = Float::with_val(prec, num * n as u32) / den;
    (p1, d)
}

/// Adaptive panel quadrature with a relative stopping rule.
#[derive(Clone, Debug)]
pub struct Quadrature {
    rule: GaussLegendre,
    tol: Float,
    panel_cap: usize,
}

struct Panel {
    a: Float,
    b: Float,
    val: Vec<BigComplex>,
    abs: Vec<Float>,
}

impl Quadrature {
    pub fn new(prec: u32, tol: Float) -> Self {
        Quadrature {
            rule: GaussLegendre::new(DEFAULT_ORDER, prec),
            tol,
            panel_cap: DEFAULT_PANEL_CAP,
        }
    }

    pub fn with_order(prec: u32, tol: Float, order: usize) -> Self {
        Quadrature {
            rule: GaussLegendre::new(order, prec),
            tol,
            panel_cap: DEFAULT_PANEL_CAP,
        }
    }

    pub fn with_panel_cap(mut self, cap: usize) -> Self {
        self.panel_cap = cap.max(2);
        self
    }

    pub fn prec(&self) -> u32 {
        self.tol.prec()
    }

    pub fn tol(&self) -> &Float {
        &self.tol
    }

    fn panel<F>(&self, a: &Float, b: &Float, dim: usize, f: &mut F) -> Panel
    where
        F: FnMut(&Float, &mut [BigComplex]),
    {
        let prec = self.prec();
        let half = Float::with_val(prec, b - a) / 2u32;
        let mid = Float::with_val(prec, a + b) / 2u32;
        let mut val = vec![BigComplex::zero(prec); dim];
        let mut abs = vec![Float::new(prec); dim];
        let mut buf = vec![BigComplex::zero(prec); dim];
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let t = Float::with_val(prec, &half * x) + &mid;
            f(&t, &mut buf);
            for c in 0..dim {
                val[c] += &buf[c].scale(w);
                abs[c] += Float::with_val(prec, buf[c].abs() * w);
            }
        }
        for c in 0..dim {
            val[c] = val[c].scale(&half);
            abs[c] *= &half;
        }
        Panel {
            a: a.clone(),
            b: b.clone(),
            val,
            abs,
        }
    }

    /// Integrates the `dim` components written by `f(t, out)` over [a, b].
    ///
    /// A panel is accepted when, for every component, the change from
    /// splitting it in two is below `tol` times that component's L1 scale,
    /// prorated by the panel's share of the interval. Panels are processed
    /// depth first, left to right.
    pub fn integrate_vec<F>(&self, a: &Float, b: &Float, dim: usize, mut f: F) -> Result<Vec<BigComplex>, MeasureError>
    where
        F: FnMut(&Float, &mut [BigComplex]),
    {
        let prec = self.prec();
        let mut total = vec![BigComplex::zero(prec); dim];
        if a == b || dim == 0 {
            return Ok(total);
        }
        let len = Float::with_val(prec, b - a);
        let root = self.panel(a, b, dim, &mut f);
        let mut scale: Vec<Float> = root.abs.clone();
        let fallback = scale
            .iter()
            .cloned()
            .fold(Float::new(prec), |m, s| if s > m { s } else { m });
        let mut stack = vec![root];
        let mut live = 1usize;
        while let Some(p) = stack.pop() {
            let mid = Float::with_val(prec, &p.a + &p.b) / 2u32;
            let l = self.panel(&p.a, &mid, dim, &mut f);
            let r = self.panel(&mid, &p.b, dim, &mut f);
            let share = Float::with_val(prec, &p.b - &p.a) / &len;
            let mut ok = true;
            for c in 0..dim {
                let refined = &l.val[c] + &r.val[c];
                let diff = (&refined - &p.val[c]).abs();
                let s_new = Float::with_val(prec, &l.abs[c] + &r.abs[c]);
                if s_new > scale[c] && p.a == *a && p.b == *b {
                    scale[c] = s_new;
                }
                let sc = if scale[c].is_zero() { &fallback } else { &scale[c] };
                let bound = Float::with_val(prec, sc * &self.tol) * &share;
                if diff > bound {
                    ok = false;
                    break;
                }
            }
            if ok {
                for c in 0..dim {
                    total[c] += &l.val[c];
                    total[c] += &r.val[c];
                }
                live -= 1;
            } else {
                live += 1;
                if live > self.panel_cap {
                    return Err(MeasureError::QuadFailure { panels: live });
                }
                stack.push(r);
                stack.push(l);
            }
        }
        Ok(total)
    }

    pub fn integrate<F>(&self, a: &Float, b: &Float, mut f: F) -> Result<BigComplex, MeasureError>
    where
        F: FnMut(&Float) -> BigComplex,
    {
        let v = self.integrate_vec(a, b, 1, |t, out| out[0] = f(t))?;
        Ok(v.into_iter().next().expect("one component"))
    }
}
