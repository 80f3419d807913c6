use rug::Float;

use super::{AlgebraError, BigComplex};

/// Dense row-major matrix of extended-precision complex entries.
#[derive(Clone, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigComplex>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![BigComplex::zero(prec); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigComplex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigComplex {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigComplex) {
        self.data[i * self.cols + j] = v;
    }

    fn prec(&self) -> u32 {
        self.data.first().map_or(64, BigComplex::prec)
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> Float {
        let prec = self.prec();
        let mut best = Float::new(prec);
        for i in 0..self.rows {
            let mut s = Float::new(prec);
            for j in 0..self.cols {
                s += self.get(i, j).abs();
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    pub fn mul_vec(&self, v: &[BigComplex]) -> Vec<BigComplex> {
        let prec = self.prec();
        (0..self.rows)
            .map(|i| {
                let mut acc = BigComplex::zero(prec);
                for (j, x) in v.iter().enumerate() {
                    acc += &(self.get(i, j) * x);
                }
                acc
            })
            .collect()
    }
}

pub(crate) fn vec_norm_inf(v: &[BigComplex], prec: u32) -> Float {
    let mut best = Float::new(prec);
    for x in v {
        let a = x.abs();
        if a > best {
            best = a;
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct NullspaceSolution {
    /// Kernel vector normalized so its highest significant entry is 1.
    pub vector: Vec<BigComplex>,
    /// Numerical nullity (number of columns without a pivot).
    pub dimension: usize,
    /// Relative residual `|Mv| / (|M| |v|)` in max norms.
    pub residual: Float,
}

struct Elimination {
    /// Upper-trapezoidal factor, rows in pivot order, columns permuted.
    u: Matrix,
    colperm: Vec<usize>,
    rank: usize,
    /// Right-hand sides carried through the row operations.
    rhs: Vec<BigComplex>,
}

/// Gaussian elimination with complete pivoting. Pivot search scans rows and
/// then columns in index order and keeps the first strict maximum, so the
/// pivot sequence is a pure function of the input.
fn eliminate(m: &Matrix, rhs: Option<&[BigComplex]>, pivot_tol: &Float) -> Elimination {
    let prec = m.prec();
    let mut u = m.clone();
    let mut b: Vec<BigComplex> = match rhs {
        Some(r) => r.to_vec(),
        None => vec![BigComplex::zero(prec); m.rows],
    };
    let mut colperm: Vec<usize> = (0..m.cols).collect();
    let scale = {
        let mut s = Float::new(prec);
        for x in &m.data {
            let a = x.abs();
            if a > s {
                s = a;
            }
        }
        s
    };
    let cut = Float::with_val(prec, &scale * pivot_tol);
    let cut_sq = Float::with_val(prec, &cut * &cut);
    let mut rank = 0;
    for k in 0..m.rows.min(m.cols) {
        let mut best = (k, k);
        let mut best_mag = Float::new(prec);
        for i in k..m.rows {
            for j in k..m.cols {
                let mag = u.get(i, j).norm_sqr();
                if mag > best_mag {
                    best_mag = mag;
                    best = (i, j);
                }
            }
        }
        if best_mag <= cut_sq || best_mag.is_zero() {
            break;
        }
        let (pi, pj) = best;
        if pi != k {
            for j in 0..m.cols {
                u.data.swap(k * m.cols + j, pi * m.cols + j);
            }
            b.swap(k, pi);
        }
        if pj != k {
            for i in 0..m.rows {
                u.data.swap(i * m.cols + k, i * m.cols + pj);
            }
            colperm.swap(k, pj);
        }
        let pivot_inv = u.get(k, k).recip();
        for i in (k + 1)..m.rows {
            let f = u.get(i, k) * &pivot_inv;
            if f.is_zero() {
                continue;
            }
            for j in k..m.cols {
                let t = &f * u.get(k, j);
                let idx = i * m.cols + j;
                u.data[idx] -= &t;
            }
            let t = &f * &b[k];
            b[i] -= &t;
            u.set(i, k, BigComplex::zero(prec));
        }
        rank += 1;
    }
    Elimination {
        u,
        colperm,
        rank,
        rhs: b,
    }
}

/// Nonzero kernel vector of an underdetermined homogeneous system.
///
/// The first non-pivot column in elimination order is set to one and the
/// pivot unknowns are back-substituted; the result is scaled so that its
/// highest-index entry above `drop_tol` (relative) equals one.
pub fn nullspace_solve(m: &Matrix, drop_tol: &Float, ns_tol: &Float) -> Result<NullspaceSolution, AlgebraError> {
    if m.rows >= m.cols {
        return Err(AlgebraError::InvalidInput(format!(
            "nullspace_solve needs rows < cols, got {}x{}",
            m.rows, m.cols
        )));
    }
    let prec = m.prec();
    let el = eliminate(m, None, drop_tol);
    let rank = el.rank;
    let mut x = vec![BigComplex::zero(prec); m.cols];
    x[rank] = BigComplex::one(prec);
    for k in (0..rank).rev() {
        let mut acc = BigComplex::zero(prec);
        for j in (k + 1)..m.cols {
            acc += &(el.u.get(k, j) * &x[j]);
        }
        x[k] = -(&acc / el.u.get(k, k));
    }
    let mut v = vec![BigComplex::zero(prec); m.cols];
    for (k, &c) in el.colperm.iter().enumerate() {
        v[c] = x[k].clone();
    }
    let vmax = vec_norm_inf(&v, prec);
    let cut = Float::with_val(prec, &vmax * drop_tol);
    let lead = v
        .iter()
        .rposition(|e| e.abs() > cut)
        .expect("kernel vector has a unit entry");
    let inv = v[lead].recip();
    for e in v.iter_mut() {
        *e = &*e * &inv;
    }
    let residual = relative_residual(m, &v, prec);
    if residual > *ns_tol || !residual.is_finite() {
        return Err(AlgebraError::SolveFailure {
            residual: residual.to_f64(),
            bound: ns_tol.to_f64(),
        });
    }
    Ok(NullspaceSolution {
        vector: v,
        dimension: m.cols - rank,
        residual,
    })
}

fn relative_residual(m: &Matrix, v: &[BigComplex], prec: u32) -> Float {
    let r = m.mul_vec(v);
    let num = vec_norm_inf(&r, prec);
    let den = Float::with_val(prec, m.norm_inf() * vec_norm_inf(v, prec));
    if den.is_zero() {
        return Float::new(prec);
    }
    Float::with_val(prec, &num / &den)
}

/// Solves a consistent, possibly overdetermined system `A x = b` (rows ≥
/// cols) by complete-pivot elimination and verifies every equation.
///
/// Returns the solution and the relative residual
/// `|Ax - b| / (|A||x| + |b|)`.
pub fn solve_consistent(
    a: &Matrix,
    b: &[BigComplex],
    pivot_tol: &Float,
    res_tol: &Float,
) -> Result<(Vec<BigComplex>, Float), AlgebraError> {
    if a.rows < a.cols || b.len() != a.rows {
        return Err(AlgebraError::InvalidInput(format!(
            "solve_consistent needs rows >= cols and matching rhs, got {}x{} with {}",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    let prec = a.prec();
    let el = eliminate(a, Some(b), pivot_tol);
    if el.rank < a.cols {
        return Err(AlgebraError::SolveFailure {
            residual: f64::INFINITY,
            bound: res_tol.to_f64(),
        });
    }
    let n = a.cols;
    let mut x = vec![BigComplex::zero(prec); n];
    for k in (0..n).rev() {
        let mut acc = el.rhs[k].clone();
        for j in (k + 1)..n {
            acc -= &(el.u.get(k, j) * &x[j]);
        }
        x[k] = &acc / el.u.get(k, k);
    }
    let mut sol = vec![BigComplex::zero(prec); n];
    for (k, &c) in el.colperm.iter().enumerate() {
        sol[c] = x[k].clone();
    }
    let ax = a.mul_vec(&sol);
    let diff: Vec<BigComplex> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    let num = vec_norm_inf(&diff, prec);
    let den = Float::with_val(prec, a.norm_inf() * vec_norm_inf(&sol, prec) + vec_norm_inf(b, prec));
    let res = if den.is_zero() {
        Float::new(prec)
    } else {
        Float::with_val(prec, &num / &den)
    };
    if res > *res_tol || !res.is_finite() {
        return Err(AlgebraError::SolveFailure {
            residual: res.to_f64(),
            bound: res_tol.to_f64(),
        });
    }
    Ok((sol, res))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn r(x: f64) -> BigComplex {
        BigComplex::from_f64(P, x, 0.0)
    }

    fn tols() -> (Float, Float) {
        (Float::with_val(P, 1) >> 128u32, Float::with_val(P, 1) >> 64u32)
    }

    #[test]
    fn coordinate_projections() {
        let (d, ns) = tols();
        let m = Matrix::from_fn(1, 2, |_, j| r(if j == 0 { 1.0 } else { 0.0 }));
        let s = nullspace_solve(&m, &d, &ns).unwrap();
        assert_eq!(s.vector, vec![r(0.0), r(1.0)]);
        let m = Matrix::from_fn(1, 2, |_, j| r(if j == 0 { 0.0 } else { 1.0 }));
        let s = nullspace_solve(&m, &d, &ns).unwrap();
        assert_eq!(s.vector, vec![r(1.0), r(0.0)]);
        assert_eq!(s.dimension, 1);
    }

    #[test]
    fn rejects_square_input() {
        let (d, ns) = tols();
        let m = Matrix::zeros(2, 2, P);
        assert!(matches!(
            nullspace_solve(&m, &d, &ns),
            Err(AlgebraError::InvalidInput(_))
        ));
    }

    #[test]
    fn reports_nullity() {
        let (d, ns) = tols();
        // rank-1 1x3 system has a 2-dimensional kernel
        let m = Matrix::from_fn(1, 3, |_, j| r([1.0, 2.0, 0.0][j]));
        let s = nullspace_solve(&m, &d, &ns).unwrap();
        assert_eq!(s.dimension, 2);
        assert!(s.residual < ns);
    }

    #[test]
    fn overdetermined_consistent() {
        let (d, ns) = tols();
        // x + y = 3, x - y = 1, 2x = 4
        let a = Matrix::from_fn(3, 2, |i, j| r([[1.0, 1.0], [1.0, -1.0], [2.0, 0.0]][i][j]));
        let (x, _) = solve_consistent(&a, &[r(3.0), r(1.0), r(4.0)], &d, &ns).unwrap();
        assert!((&x[0] - &r(2.0)).abs_f64() < 1e-70);
        assert!((&x[1] - &r(1.0)).abs_f64() < 1e-70);
        assert!(solve_consistent(&a, &[r(3.0), r(1.0), r(5.0)], &d, &ns).is_err());
    }
}
