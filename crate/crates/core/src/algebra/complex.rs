use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rug::float::Constant;
use rug::{Assign, Float};

/// Complex number whose parts are MPFR floats of a fixed precision.
///
/// Every result carries the precision of its left operand; a run keeps all
/// values at one precision so that results are reproducible bit for bit.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        BigComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(prec, 1.0, 0.0)
    }

    pub fn i(prec: u32) -> Self {
        Self::from_f64(prec, 0.0, 1.0)
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_c64(prec: u32, z: Complex64) -> Self {
        Self::from_f64(prec, z.re, z.im)
    }

    pub fn from_i64(prec: u32, v: i64) -> Self {
        BigComplex {
            re: Float::with_val(prec, v),
            im: Float::new(prec),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        BigComplex { re, im }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        BigComplex { re, im }
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec, Constant::Pi)
    }

    /// `e^{i theta}` for real `theta`.
    pub fn cis(theta: &Float) -> Self {
        let prec = theta.prec();
        let (mut s, mut c) = (Float::new(prec), Float::new(prec));
        (&mut s, &mut c).assign(theta.sin_cos_ref());
        BigComplex { re: c, im: s }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        Float::with_val(self.prec(), self.re.mul_add_mul_ref(&self.re, &self.im, &self.im))
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    /// Principal argument in (-pi, pi].
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re * k),
            im: Float::with_val(p, &self.im * k),
        }
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let d = self.norm_sqr();
        BigComplex {
            re: Float::with_val(p, &self.re / &d),
            im: Float::with_val(p, -Float::with_val(p, &self.im / &d)),
        }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        BigComplex::cis(&self.im).scale(&m)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, self.abs().ln_ref()),
            im: self.arg(),
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.prec();
        let r = Float::with_val(p, self.abs().sqrt_ref());
        let half = Float::with_val(p, self.arg() / 2u32);
        BigComplex::cis(&half).scale(&r)
    }

    pub fn powi(&self, e: i32) -> Self {
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = BigComplex::one(self.prec());
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Decimal rendering that round-trips at the value's precision.
    pub fn to_decimal_parts(&self) -> (String, String) {
        (self.re.to_string_radix(10, None), self.im.to_string_radix(10, None))
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_c64();
        write!(f, "({:e}{:+e}i)@{}", z.re, z.im, self.prec())
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_c64();
        write!(f, "{}{:+}i", z.re, z.im)
    }
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, self.re.mul_sub_mul_ref(&rhs.re, &self.im, &rhs.im)),
            im: Float::with_val(p, self.re.mul_add_mul_ref(&rhs.im, &self.im, &rhs.re)),
        }
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec();
        let d = rhs.norm_sqr();
        let re = Float::with_val(p, self.re.mul_add_mul_ref(&rhs.re, &self.im, &rhs.im));
        let im = Float::with_val(p, self.im.mul_sub_mul_ref(&rhs.re, &self.re, &rhs.im));
        BigComplex {
            re: Float::with_val(p, &re / &d),
            im: Float::with_val(p, &im / &d),
        }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, -&self.re),
            im: Float::with_val(p, -&self.im),
        }
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &BigComplex) -> BigComplex {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<BigComplex> for &'a BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&BigComplex> for BigComplex {
    fn add_assign(&mut self, rhs: &BigComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&BigComplex> for BigComplex {
    fn sub_assign(&mut self, rhs: &BigComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&BigComplex> for BigComplex {
    fn mul_assign(&mut self, rhs: &BigComplex) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    #[test]
    fn field_operations() {
        let a = BigComplex::from_f64(P, 1.5, -2.0);
        let b = BigComplex::from_f64(P, -0.25, 3.0);
        let q = &(&a * &b) / &b;
        assert!((&q - &a).abs_f64() < 1e-70);
        let s = &(&a + &b) - &b;
        assert_eq!(s, a);
        assert!((&a * &a.recip() - BigComplex::one(P)).abs_f64() < 1e-70);
    }

    #[test]
    fn elementary_functions() {
        let pi = BigComplex::pi(P);
        let z = BigComplex::cis(&pi);
        assert!((&z + &BigComplex::one(P)).abs_f64() < 1e-70);
        let w = BigComplex::from_f64(P, 0.3, 1.1);
        assert!((&w.ln().exp() - &w).abs_f64() < 1e-70);
        let r = w.sqrt();
        assert!((&(&r * &r) - &w).abs_f64() < 1e-70);
        assert!((&w.powi(-3) * &w.powi(3) - BigComplex::one(P)).abs_f64() < 1e-70);
        // principal branch of sqrt(-1) is +i
        let m = BigComplex::from_f64(P, -1.0, 0.0).sqrt();
        assert!((&m - &BigComplex::i(P)).abs_f64() < 1e-70);
    }

    #[test]
    fn decimal_round_trip() {
        let third = BigComplex::from_real(Float::with_val(P, 1) / 3u32);
        let (re, _) = third.to_decimal_parts();
        let back = Float::with_val(P, Float::parse(&re).unwrap());
        assert_eq!(back, third.re);
    }
}
