use rug::Float;

use super::BigComplex;

/// Polynomial with extended-precision complex coefficients, ascending order.
///
/// The zero polynomial has no coefficients and degree -1.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<BigComplex>,
}

impl Poly {
    /// Wraps `coeffs` as given; only exact trailing zeros are removed.
    pub fn new(mut coeffs: Vec<BigComplex>) -> Self {
        while coeffs.last().is_some_and(BigComplex::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Builds a polynomial and trims trailing coefficients whose magnitude is
    /// below `rel_tol` times the largest coefficient magnitude.
    pub fn trimmed(coeffs: Vec<BigComplex>, rel_tol: &Float) -> Self {
        let mut p = Poly::new(coeffs);
        p.trim(rel_tol);
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigComplex) -> Self {
        Poly::new(vec![c])
    }

    pub fn one(prec: u32) -> Self {
        Poly::constant(BigComplex::one(prec))
    }

    /// Monic polynomial with the given roots (repeated entries are multiple
    /// roots).
    pub fn from_roots(roots: &[BigComplex], prec: u32) -> Self {
        let mut c = vec![BigComplex::one(prec)];
        for r in roots {
            let mut next = vec![BigComplex::zero(prec); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= &(a * r);
            }
            c = next;
        }
        Poly::new(c)
    }

    pub fn trim(&mut self, rel_tol: &Float) {
        let Some(max) = self.max_coeff_abs() else {
            return;
        };
        let cut = Float::with_val(max.prec(), &max * rel_tol);
        while self.coeffs.last().is_some_and(|c| c.abs() <= cut) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigComplex] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigComplex> {
        self.coeffs
    }

    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&BigComplex> {
        self.coeffs.last()
    }

    pub fn max_coeff_abs(&self) -> Option<Float> {
        self.coeffs
            .iter()
            .map(BigComplex::abs)
            .max_by(|a, b| a.partial_cmp(b).expect("finite coefficients"))
    }

    /// Horner evaluation.
    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        let mut acc = BigComplex::zero(z.prec());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    /// Value of the `k`-th derivative at `z` (not divided by `k!`).
    pub fn derivative_at(&self, z: &BigComplex, k: usize) -> BigComplex {
        let prec = z.prec();
        if self.coeffs.len() <= k {
            return BigComplex::zero(prec);
        }
        let mut acc = BigComplex::zero(prec);
        for (i, c) in self.coeffs.iter().enumerate().skip(k).rev() {
            // i! / (i-k)!
            let mut fall = Float::with_val(prec, 1);
            for f in (i + 1 - k)..=i {
                fall *= f as u32;
            }
            acc = &(&acc * z) + &c.scale(&fall);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&Float::with_val(c.prec(), i as u32)))
            .collect();
        Poly::new(coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let prec = self.coeffs[0].prec();
        let mut out = vec![BigComplex::zero(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(out)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let prec = self.coeffs[0].prec();
        let mut c = vec![BigComplex::zero(prec); k];
        c.extend(self.coeffs.iter().cloned());
        Poly::new(c)
    }

    /// Divides through by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => {
                let inv = l.recip();
                Poly::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    /// Complex-conjugated coefficients, i.e. `conj(p(conj z))`.
    pub fn conj(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(BigComplex::conj).collect())
    }
}
