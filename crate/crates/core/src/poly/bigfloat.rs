//! Exact evaluation of integer polynomials at dyadic points, plus the few
//! big-integer to `f64` conversions the root finder needs.

use num_bigint::{BigInt, Sign};
use num_traits::{Float, ToPrimitive, Zero};

/// `x = mantissa · 2^exp` with an odd mantissa (or zero).
pub(crate) fn dyadic(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let (m, e, s) = x.integer_decode();
    let tz = m.trailing_zeros();
    let m = (m >> tz) as i64 * s as i64;
    (BigInt::from(m), e as i64 + tz as i64)
}

/// `a / b` rounded to `f64`, safe for operands far outside the `f64` range.
pub(crate) fn big_ratio(a: &BigInt, b: &BigInt) -> f64 {
    big_ratio_scaled(a, b, 0)
}

/// `(a / b) · 2^shift` rounded to `f64`.
pub(crate) fn big_ratio_scaled(a: &BigInt, b: &BigInt, shift: i64) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let (ma, ea) = top_bits(a);
    let (mb, eb) = top_bits(b);
    scale2(ma / mb, ea - eb + shift)
}

#[cfg(test)]
/// `a · 2^shift` as `f64`.
pub(crate) fn big_to_f64_scaled(a: &BigInt, shift: i64) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let (m, e) = top_bits(a);
    scale2(m, e + shift)
}

/// `log2 |a|`, `-inf` for zero.
pub(crate) fn log2_big(a: &BigInt) -> f64 {
    if a.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = top_bits(a);
    m.abs().log2() + e as f64
}

fn top_bits(a: &BigInt) -> (f64, i64) {
    let bits = a.bits() as i64;
    let drop = (bits - 64).max(0);
    let top = a >> drop as usize;
    (top.to_f64().unwrap_or(0.0), drop)
}

fn scale2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Integer-coefficient polynomial, ascending order.
#[derive(Debug, Clone)]
pub(crate) struct IntPoly {
    pub coeffs: Vec<BigInt>,
}

pub(crate) struct Evaluation {
    /// `p(x) · 2^(shift·deg)`.
    pub value: BigInt,
    /// `p'(x) · 2^(shift·(deg-1))`.
    pub slope: BigInt,
    pub shift: i64,
}

impl IntPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn derivative(&self) -> IntPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        IntPoly { coeffs }
    }

    /// Homogeneous Horner evaluation: with `x = m / 2^k` returns
    /// `Σ c_i m^i 2^{k(n-i)}` and the matching scaled derivative.
    pub fn eval(&self, x: f64, want_slope: bool) -> Evaluation {
        let (mut m, e) = dyadic(x);
        let k = if e >= 0 {
            m <<= e as usize;
            0
        } else {
            -e
        };
        let n = self.degree();
        let mut value = self.coeffs[n].clone();
        let mut slope = BigInt::zero();
        for i in (0..n).rev() {
            if want_slope {
                slope = &slope * &m + &value;
            }
            value = &value * &m + (&self.coeffs[i] << (k as usize * (n - i)));
        }
        Evaluation {
            value,
            slope,
            shift: k,
        }
    }

    /// `|p(x)| / Σ |c_i| r^i` with `r = max(|x|, floor)`.
    pub fn relative_residual(&self, x: f64, floor: f64) -> f64 {
        let ev = self.eval(x, false);
        let abs = IntPoly {
            coeffs: self.coeffs.iter().map(|c| c.magnitude().clone().into()).collect(),
        };
        let sc = abs.eval(x.abs().max(floor), false);
        if sc.value.is_zero() {
            return 0.0;
        }
        let n = self.degree() as i64;
        big_ratio_scaled(&ev.value, &sc.value, (sc.shift - ev.shift) * n).abs()
    }
}

impl Evaluation {
    pub fn sign(&self) -> i8 {
        match self.value.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// `p(x) / p'(x)`, or `None` when `p'(x) = 0`.
    pub fn newton_step(&self) -> Option<f64> {
        if self.slope.is_zero() {
            return None;
        }
        Some(big_ratio_scaled(&self.value, &self.slope, -self.shift))
    }
}
