use rug::ops::Pow;
use rug::Float;

use super::{AlgebraError, BigComplex, Poly};

/// Iteration cap for the simultaneous root iteration.
pub const MAX_ROOT_ITERATIONS: usize = 2000;

/// All roots of `p` (with multiplicity) by Aberth–Ehrlich iteration at the
/// precision of the coefficients.
///
/// Initial guesses sit on a circle of radius `|a_0/a_d|^{1/d}` at angles
/// offset from the real axis, so the result is deterministic and real
/// polynomials do not start on a conjugation-symmetric configuration.
/// Each root is frozen once its correction drops below the working
/// precision or `p` at the iterate is at rounding level.
pub fn poly_roots(p: &Poly, root_tol: &Float) -> Result<Vec<BigComplex>, AlgebraError> {
    let deg = p.degree();
    if deg < 1 {
        return Err(AlgebraError::InvalidInput(format!(
            "poly_roots needs degree >= 1, got {deg}"
        )));
    }
    let deg = deg as usize;
    let prec = p.coeffs()[0].prec();
    let monic = p.monic();
    let a = monic.coeffs();
    if deg == 1 {
        return Ok(vec![-&a[0]]);
    }

    // zero roots are split off exactly
    let zeros = a.iter().take_while(|c| c.is_zero()).count();
    let reduced = Poly::new(a[zeros..].to_vec());
    let rdeg = deg - zeros;
    let mut roots = vec![BigComplex::zero(prec); zeros];
    if rdeg == 0 {
        return Ok(roots);
    }
    let ra = reduced.coeffs();
    let dp = reduced.derivative();
    let abs_coeffs = Poly::new(ra.iter().map(|c| BigComplex::from_real(c.abs())).collect());

    let radius = {
        let c0 = ra[0].abs_f64();
        let r = c0.powf(1.0 / rdeg as f64);
        if r.is_finite() && r > 0.0 {
            r
        } else {
            1.0
        }
    };
    let mut z: Vec<BigComplex> = (0..rdeg)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / rdeg as f64 + 0.4;
            BigComplex::from_f64(prec, radius * th.cos(), radius * th.sin())
        })
        .collect();
    let mut frozen = vec![false; rdeg];
    let step_tol = Float::with_val(prec, 1) >> (prec.saturating_sub(8));
    let eval_tol = Float::with_val(prec, 1) >> (prec.saturating_sub(16));

    for _ in 0..MAX_ROOT_ITERATIONS {
        if frozen.iter().all(|&f| f) {
            break;
        }
        for i in 0..rdeg {
            if frozen[i] {
                continue;
            }
            let pv = reduced.eval(&z[i]);
            let scale = abs_coeffs.eval(&BigComplex::from_real(z[i].abs())).re;
            if pv.abs() <= Float::with_val(prec, &scale * &eval_tol) {
                frozen[i] = true;
                continue;
            }
            let dv = dp.eval(&z[i]);
            let newton = &pv / &dv;
            let mut sum = BigComplex::zero(prec);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    sum += &(&z[i] - zj).recip();
                }
            }
            let denom = &BigComplex::one(prec) - &(&newton * &sum);
            let w = &newton / &denom;
            if !w.is_finite() {
                return Err(AlgebraError::RootFailure(format!("non-finite correction at root {i}")));
            }
            z[i] -= &w;
            let bound = Float::with_val(prec, (z[i].abs() + 1u32) * &step_tol);
            if w.abs() <= bound {
                frozen[i] = true;
            }
        }
    }

    roots.extend(z);
    check_residuals(p, &roots, root_tol)?;
    Ok(roots)
}

/// `|p(r)| ≤ tol · max|coeff| · (1+|r|)^deg` for every root.
pub fn check_residuals(p: &Poly, roots: &[BigComplex], tol: &Float) -> Result<(), AlgebraError> {
    let prec = roots.first().map_or(64, BigComplex::prec);
    let maxc = p.max_coeff_abs().unwrap_or_else(|| Float::new(prec));
    let deg = p.degree().max(0) as i32;
    for (i, r) in roots.iter().enumerate() {
        let val = p.eval(r).abs();
        let growth = Float::with_val(prec, r.abs() + 1u32).pow(deg);
        let bound = Float::with_val(prec, &maxc * tol) * growth;
        if val > bound || !val.is_finite() {
            return Err(AlgebraError::RootFailure(format!(
                "root {i} residual {:e} exceeds {:e}",
                val.to_f64(),
                bound.to_f64()
            )));
        }
    }
    Ok(())
}

/// Groups roots closer than `tol·(1+|r|)` into clusters and returns one
/// representative (the cluster mean) with its multiplicity.
pub fn group_roots(roots: &[BigComplex], tol: f64) -> Vec<(BigComplex, usize)> {
    let mut out: Vec<(BigComplex, usize, Vec<usize>)> = Vec::new();
    for (idx, r) in roots.iter().enumerate() {
        let rc = r.to_c64();
        let hit = out.iter_mut().find(|(c, _, _)| {
            let cc = c.to_c64();
            (cc - rc).norm() <= tol * (1.0 + rc.norm())
        });
        match hit {
            Some(entry) => {
                entry.1 += 1;
                entry.2.push(idx);
            }
            None => out.push((r.clone(), 1, vec![idx])),
        }
    }
    out.into_iter()
        .map(|(_, m, members)| {
            let prec = roots[members[0]].prec();
            let mut s = BigComplex::zero(prec);
            for &k in &members {
                s += &roots[k];
            }
            let inv = Float::with_val(prec, 1) / (m as u32);
            (s.scale(&inv), m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(P, re, im)
    }

    fn tol() -> Float {
        Float::with_val(P, 1) >> 64u32
    }

    fn assert_roots(found: &[BigComplex], expected: &[(f64, f64)]) {
        assert_eq!(found.len(), expected.len());
        for &(re, im) in expected {
            assert!(
                found
                    .iter()
                    .any(|r| (r.to_c64() - num_complex::Complex64::new(re, im)).norm() < 1e-15),
                "missing root {re}+{im}i in {found:?}"
            );
        }
    }

    #[test]
    fn quadratic_examples() {
        let half = Poly::new(vec![c(-0.5, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_roots(&poly_roots(&half, &tol()).unwrap(), &[(s, 0.0), (-s, 0.0)]);
        let pl = Poly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_roots(&poly_roots(&pl, &tol()).unwrap(), &[(0.0, 1.0), (0.0, -1.0)]);
    }

    #[test]
    fn multiple_roots_and_zero_roots() {
        // z^2 (z-1)^3
        let p = Poly::from_roots(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)], P);
        let r = poly_roots(&p, &tol()).unwrap();
        assert_eq!(r.len(), 5);
        let g = group_roots(&r, 1e-10);
        let mut mults: Vec<usize> = g.iter().map(|(_, m)| *m).collect();
        mults.sort();
        assert_eq!(mults, vec![2, 3]);
    }

    #[test]
    fn rejects_constants() {
        assert!(poly_roots(&Poly::one(P), &tol()).is_err());
    }

    #[test]
    fn deterministic() {
        let p = Poly::new((0..12).map(|k| c((k as f64).sin(), (k as f64 * 0.7).cos())).collect());
        let a = poly_roots(&p, &tol()).unwrap();
        let b = poly_roots(&p, &tol()).unwrap();
        assert_eq!(a, b);
    }
}
