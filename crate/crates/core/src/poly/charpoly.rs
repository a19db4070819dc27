use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::bigfloat::dyadic;
use super::RealRootedPoly;
use crate::error::{Error, Result};
use crate::spectral::SymmetricMatrix;

/// `det(xI - M)` with exact rational coefficients, treating every entry of `M`
/// as its exact binary value.
///
/// The entries are scaled to integers by a common power of two, after which
/// Faddeev-LeVerrier runs in integer arithmetic (every division is exact).
pub fn charpoly_exact(m: &SymmetricMatrix) -> Result<RealRootedPoly> {
    let n = m.n();
    let mut parts = Vec::with_capacity(n * n);
    let mut min_exp = i64::MAX;
    for i in 0..n {
        for j in 0..n {
            let x = m.get(i, j);
            if !x.is_finite() {
                return Err(Error::NonFinite(i, j));
            }
            let (mant, e) = dyadic(x);
            if !mant.is_zero() {
                min_exp = min_exp.min(e);
            }
            parts.push((mant, e));
        }
    }
    if min_exp == i64::MAX {
        return Ok(RealRootedPoly::monomial(n, super::Arithmetic::Exact));
    }
    let b: Vec<BigInt> = parts
        .into_iter()
        .map(|(mant, e)| if mant.is_zero() { mant } else { mant << (e - min_exp) as usize })
        .collect();

    // c[i] is the coefficient of y^i in det(yI - B).
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut acc = identity(n);
    for k in 1..=n {
        let bm = matmul(&b, &acc, n);
        let trace: BigInt = (0..n).map(|i| &bm[i * n + i]).sum();
        let ck = -trace / BigInt::from(k);
        acc = bm;
        for i in 0..n {
            acc[i * n + i] += &ck;
        }
        c[n - k] = ck;
    }

    // M = 2^E B, so the coefficient of x^i is c_i · 2^{E(n-i)}.
    let coeffs = c
        .into_iter()
        .enumerate()
        .map(|(i, ci)| {
            let shift = min_exp * (n - i) as i64;
            if shift >= 0 {
                BigRational::from_integer(ci << shift as usize)
            } else {
                BigRational::new(ci, BigInt::one() << (-shift) as usize)
            }
        })
        .collect();
    RealRootedPoly::from_exact_coeffs(coeffs)
}

fn identity(n: usize) -> Vec<BigInt> {
    let mut m = vec![BigInt::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = BigInt::one();
    }
    m
}

fn matmul(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * &b[k * n + j];
            }
        }
    }
    out
}

/// Per-coefficient error `|p_i - q_i| / (C(n, n-i) ρ^{n-i})` for monic degree-`n`
/// polynomials, where `ρ = max(1, rho)` bounds the root magnitudes. The
/// denominator is the size of the elementary symmetric function behind `p_i`.
pub fn coefficient_relative_errors(p: &RealRootedPoly, q: &RealRootedPoly, rho: f64) -> Result<Vec<f64>> {
    let n = p.degree();
    if q.degree() != n {
        return Err(Error::LengthMismatch(n, q.degree()));
    }
    let rho = rho.max(1.0);
    let diffs: Vec<f64> = match (p.exact_coeffs(), q.exact_coeffs()) {
        (Some(a), Some(b)) => a
            .iter()
            .zip(b)
            .map(|(x, y)| super::rational_to_f64(&(x / &a[n] - y / &b[n])).abs())
            .collect(),
        _ => {
            let (a, b) = (p.coeffs_f64(), q.coeffs_f64());
            a.iter().zip(&b).map(|(x, y)| (x / a[n] - y / b[n]).abs()).collect()
        }
    };
    let mut binom = 1.0f64;
    let mut out = vec![0.0; n + 1];
    // Walk k = n - i upwards: C(n, k) and ρ^k.
    for k in 0..=n {
        if k > 0 {
            binom = binom * (n - k + 1) as f64 / k as f64;
        }
        out[n - k] = diffs[n - k] / (binom * rho.powi(k as i32));
    }
    Ok(out)
}
