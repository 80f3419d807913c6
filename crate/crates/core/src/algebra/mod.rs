//! Extended-precision complex scalars, polynomials, dense elimination and
//! polynomial root finding.

mod complex;
mod linsolve;
mod poly;
mod roots;

pub use complex::BigComplex;
pub use linsolve::{nullspace_solve, solve_consistent, Matrix, NullspaceSolution};
pub use poly::Poly;
pub use roots::{check_residuals, group_roots, poly_roots, MAX_ROOT_ITERATIONS};

use rug::Float;
use thiserror::Error;

/// Smallest precision a run may use.
pub const MIN_PRECISION: u32 = 128;
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("linear solve residual {residual:e} exceeds bound {bound:e}; raise precision")]
    SolveFailure { residual: f64, bound: f64 },
    #[error("root finding failed: {0}")]
    RootFailure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// `2^-k` at precision `prec`.
pub fn pow2_neg(prec: u32, k: u32) -> Float {
    Float::with_val(prec, 1) >> k
}

/// Run-wide tolerances, all relative.
#[derive(Clone, Debug)]
pub struct Tolerances {
    pub prec: u32,
    /// Trailing-coefficient trim level and pivot cutoff.
    pub drop: Float,
    /// Nullspace residual bound.
    pub nullspace: Float,
    /// Root residual bound.
    pub root: Float,
    /// Relative quadrature tolerance.
    pub quad: Float,
}

impl Tolerances {
    /// Defaults: drop `2^(-p/2)`, nullspace and roots `2^(-p/4)`, quadrature
    /// `2^(-7p/10)`.
    pub fn for_precision(prec: u32) -> Self {
        Tolerances {
            prec,
            drop: pow2_neg(prec, prec / 2),
            nullspace: pow2_neg(prec, prec / 4),
            root: pow2_neg(prec, prec / 4),
            quad: pow2_neg(prec, prec * 7 / 10),
        }
    }
}
