//! Real-rooted polynomial machinery: the `(1 - αD)` operator, root finding,
//! majorization, the Laguerre closed form and its edge predictions.

mod bigfloat;
mod charpoly;
mod roots;

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use bigfloat::IntPoly;
use roots::{interlacing_roots, Evaluator, FloatEval};

pub use charpoly::{charpoly_exact, coefficient_relative_errors};

/// Residual bound for a validated root: `|p(r)| ≤ ROOT_RESIDUAL_TOL · Σ|c_i| max(|r|, 1)^i`.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-6;
/// Largest imaginary part tolerated by the companion-matrix diagnostics.
pub const IMAGINARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// Polynomial in the monomial basis, coefficients ascending.
#[derive(Debug, Clone)]
pub struct RealRootedPoly {
    coeffs: Coefficients,
    roots: OnceLock<RootVector>,
}

impl PartialEq for RealRootedPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

pub fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Precondition(format!("{x} is not finite")))
}

fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let direct = q.to_f64().unwrap_or(f64::NAN);
    if direct.is_finite() && direct != 0.0 {
        direct
    } else {
        bigfloat::big_ratio(q.numer(), q.denom())
    }
}

impl RealRootedPoly {
    fn build(coeffs: Coefficients) -> Result<Self> {
        let ok = match &coeffs {
            Coefficients::Exact(c) => c.last().is_some_and(|x| !x.is_zero()),
            Coefficients::Float(c) => {
                c.iter().all(|x| x.is_finite()) && c.last().is_some_and(|x| *x != 0.0)
            }
        };
        if !ok {
            return Err(Error::Precondition(
                "polynomial needs a finite nonzero leading coefficient".into(),
            ));
        }
        Ok(Self {
            coeffs,
            roots: OnceLock::new(),
        })
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        Self::build(Coefficients::Float(coeffs))
    }

    pub fn from_exact_coeffs(coeffs: Vec<BigRational>) -> Result<Self> {
        Self::build(Coefficients::Exact(coeffs))
    }

    /// `x^n`.
    pub fn monomial(n: usize, mode: Arithmetic) -> Self {
        let coeffs = match mode {
            Arithmetic::Exact => {
                let mut c = vec![BigRational::zero(); n + 1];
                c[n] = BigRational::one();
                Coefficients::Exact(c)
            }
            Arithmetic::Float => {
                let mut c = vec![0.0; n + 1];
                c[n] = 1.0;
                Coefficients::Float(c)
            }
        };
        Self::build(coeffs).expect("monic")
    }

    /// `Π (x - r_i)`.
    pub fn from_roots(roots: &[f64], mode: Arithmetic) -> Result<Self> {
        match mode {
            Arithmetic::Float => {
                let mut c = vec![1.0];
                for &r in roots {
                    let mut next = vec![0.0; c.len() + 1];
                    for (i, &a) in c.iter().enumerate() {
                        next[i + 1] += a;
                        next[i] -= r * a;
                    }
                    c = next;
                }
                Self::from_coeffs(c)
            }
            Arithmetic::Exact => {
                let rs = roots.iter().map(|&r| rational(r)).collect::<Result<Vec<_>>>()?;
                Self::from_exact_roots(&rs)
            }
        }
    }

    pub fn from_exact_roots(roots: &[BigRational]) -> Result<Self> {
        let mut c = vec![BigRational::one()];
        for r in roots {
            let mut next = vec![BigRational::zero(); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= r * a;
            }
            c = next;
        }
        Self::from_exact_coeffs(c)
    }

    pub fn degree(&self) -> usize {
        match &self.coeffs {
            Coefficients::Exact(c) => c.len() - 1,
            Coefficients::Float(c) => c.len() - 1,
        }
    }

    pub fn mode(&self) -> Arithmetic {
        match self.coeffs {
            Coefficients::Exact(_) => Arithmetic::Exact,
            Coefficients::Float(_) => Arithmetic::Float,
        }
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn exact_coeffs(&self) -> Option<&[BigRational]> {
        match &self.coeffs {
            Coefficients::Exact(c) => Some(c),
            Coefficients::Float(_) => None,
        }
    }

    /// Coefficients rounded to `f64`.
    pub fn coeffs_f64(&self) -> Vec<f64> {
        match &self.coeffs {
            Coefficients::Exact(c) => c.iter().map(rational_to_f64).collect(),
            Coefficients::Float(c) => c.clone(),
        }
    }

    pub fn to_float(&self) -> Self {
        Self::from_coeffs(self.coeffs_f64()).expect("rounding keeps a nonzero leading term")
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs_f64().iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Result<Self> {
        if self.degree() == 0 {
            return Err(Error::Precondition("derivative of a constant".into()));
        }
        let coeffs = match &self.coeffs {
            Coefficients::Exact(c) => Coefficients::Exact(
                c.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, a)| a * BigRational::from_integer(BigInt::from(i)))
                    .collect(),
            ),
            Coefficients::Float(c) => Coefficients::Float(
                c.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect(),
            ),
        };
        Self::build(coeffs)
    }

    /// Scales the exact coefficients to coprime integers with the same roots.
    fn integer_form(c: &[BigRational]) -> IntPoly {
        let lcm = c
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let ints: Vec<BigInt> = c.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        IntPoly {
            coeffs: ints.into_iter().map(|x| x / &g).collect(),
        }
    }

    /// `|p(x)| / Σ|c_i| max(|x|, 1)^i`, exact in rational mode up to the final rounding.
    pub fn relative_residual(&self, x: f64) -> f64 {
        match &self.coeffs {
            Coefficients::Exact(c) => Self::integer_form(c).relative_residual(x, 1.0),
            Coefficients::Float(c) => FloatEval { coeffs: c.clone() }.relative_residual(x, 1.0),
        }
    }

    pub fn cached_roots(&self) -> Option<&RootVector> {
        self.roots.get()
    }
}

impl Serialize for RealRootedPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RealRootedPoly", 4)?;
        st.serialize_field("degree", &self.degree())?;
        st.serialize_field("mode", &self.mode())?;
        match &self.coeffs {
            Coefficients::Exact(c) => {
                let strs: Vec<String> = c.iter().map(ToString::to_string).collect();
                st.serialize_field("coefficients", &strs)?;
            }
            Coefficients::Float(c) => st.serialize_field("coefficients", c)?,
        }
        st.serialize_field("roots", &self.roots.get())?;
        st.end()
    }
}

/// Nondecreasing finite sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RootVector(Vec<f64>);

impl RootVector {
    /// Sorts `values`; rejects non-finite entries.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i, 0));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn max(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// `p - α p'`. Exact in rational mode, where `α` is taken at its exact binary value.
pub fn one_minus_alpha_d(p: &RealRootedPoly, alpha: f64) -> Result<RealRootedPoly> {
    match p.mode() {
        Arithmetic::Exact => one_minus_alpha_d_exact(p, &rational(alpha)?),
        Arithmetic::Float => {
            let c = p.coeffs_f64();
            let mut out = c.clone();
            for i in 1..c.len() {
                out[i - 1] -= alpha * i as f64 * c[i];
            }
            RealRootedPoly::from_coeffs(out)
        }
    }
}

/// `p - α p'` with a rational `α`. A float-mode `p` is promoted to exact.
pub fn one_minus_alpha_d_exact(p: &RealRootedPoly, alpha: &BigRational) -> Result<RealRootedPoly> {
    let c: Vec<BigRational> = match &p.coeffs {
        Coefficients::Exact(c) => c.clone(),
        Coefficients::Float(c) => c.iter().map(|&x| rational(x)).collect::<Result<_>>()?,
    };
    let mut out = c.clone();
    for i in 1..c.len() {
        out[i - 1] -= alpha * BigRational::from_integer(BigInt::from(i)) * &c[i];
    }
    RealRootedPoly::from_exact_coeffs(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductTransform {
    pub poly: RealRootedPoly,
    /// Rounds whose scaling was negative; accepted, but outside game semantics.
    pub negative_rounds: Vec<usize>,
}

/// `Π_t (1 - (s_t/n) D) x^n`. In exact mode each `s_t/n` is the exact
/// rational quotient of the binary value of `s_t` by `n`.
pub fn product_transform(n: usize, scalings: &[f64], mode: Arithmetic) -> Result<ProductTransform> {
    if n == 0 {
        return Err(Error::Precondition("degree n must be positive".into()));
    }
    let negative_rounds = scalings
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < 0.0)
        .map(|(t, _)| t)
        .collect();
    let mut p = RealRootedPoly::monomial(n, mode);
    let nq = BigRational::from_integer(BigInt::from(n));
    for &s in scalings {
        p = match mode {
            Arithmetic::Exact => one_minus_alpha_d_exact(&p, &(rational(s)? / &nq))?,
            Arithmetic::Float => one_minus_alpha_d(&p, s / n as f64)?,
        };
    }
    Ok(ProductTransform { poly: p, negative_rounds })
}

/// All roots, ascending, by derivative interlacing. The result is cached on `p`.
///
/// Fails with `NotRealRooted` when fewer than `deg p` real roots are found or a
/// root's normalized residual exceeds [`ROOT_RESIDUAL_TOL`].
pub fn real_roots(p: &RealRootedPoly) -> Result<RootVector> {
    if let Some(r) = p.roots.get() {
        return Ok(r.clone());
    }
    let found = match &p.coeffs {
        Coefficients::Exact(c) => interlacing_roots(&RealRootedPoly::integer_form(c)),
        Coefficients::Float(c) => interlacing_roots(&FloatEval { coeffs: c.clone() }),
    };
    let roots = match found {
        Ok(r) => r,
        Err(short) => {
            let imag = if p.degree() <= 200 {
                companion_roots(p)
                    .map(|z| z.iter().fold(0.0f64, |a, (_, im)| a.max(im.abs())))
                    .unwrap_or(f64::NAN)
            } else {
                f64::NAN
            };
            return Err(Error::NotRealRooted(format!(
                "found {} of {} real roots; largest companion-matrix imaginary part {imag:e}",
                short.found, short.degree
            )));
        }
    };
    for &r in &roots {
        let res = p.relative_residual(r);
        if res > ROOT_RESIDUAL_TOL {
            return Err(Error::NotRealRooted(format!(
                "root {r} has normalized residual {res:e}"
            )));
        }
    }
    let rv = RootVector::new(roots)?;
    let _ = p.roots.set(rv.clone());
    Ok(rv)
}

/// Eigenvalues `(re, im)` of the companion matrix, sorted by real part.
pub fn companion_roots(p: &RealRootedPoly) -> Result<Vec<(f64, f64)>> {
    let c = p.coeffs_f64();
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let m = balance(m);
    let mut z: Vec<(f64, f64)> = m
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect();
    if z.iter().any(|(re, im)| !re.is_finite() || !im.is_finite()) {
        return Err(Error::NoConvergence(n));
    }
    z.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(z)
}

/// Diagonal similarity by powers of two equalizing row and column norms
/// (Parlett-Reinsch), which companion matrices badly need.
fn balance(mut m: nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
    let n = m.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (c + r) < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
    m
}

/// Outcome of comparing root vectors `a ≺ b`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Majorization {
    pub holds: bool,
    /// `Σ a - Σ b`.
    pub total_gap: f64,
    /// `min_k (Σ_{j≤k} a_j - Σ_{j≤k} b_j)` over `k < n`; nonnegative when `a ≺ b`.
    pub min_prefix_slack: f64,
    pub tolerance: f64,
}

/// Whether `b` majorizes `a`, with totals and prefix sums compared to
/// `1e-8 · max(1, Σ|a_i|, Σ|b_i|)`.
pub fn majorization(b: &RootVector, a: &RootVector) -> Result<Majorization> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let scale = a
        .as_slice()
        .iter()
        .chain(b.as_slice())
        .map(|x| x.abs())
        .sum::<f64>()
        .max(1.0);
    let tolerance = 1e-8 * scale;
    let (mut pa, mut pb) = (0.0, 0.0);
    let mut min_prefix_slack = f64::INFINITY;
    let n = a.len();
    for k in 0..n {
        pa += a.0[k];
        pb += b.0[k];
        if k + 1 < n {
            min_prefix_slack = min_prefix_slack.min(pa - pb);
        }
    }
    let total_gap = pa - pb;
    let holds = total_gap.abs() <= tolerance && min_prefix_slack >= -tolerance;
    if holds && n > 0 {
        debug_assert!(a.min() >= b.min() - tolerance && a.max() <= b.max() + tolerance);
    }
    Ok(Majorization {
        holds,
        total_gap,
        min_prefix_slack: if n > 1 { min_prefix_slack } else { 0.0 },
        tolerance,
    })
}

/// `a ≺ b`.
pub fn majorizes(b: &RootVector, a: &RootVector) -> Result<bool> {
    Ok(majorization(b, a)?.holds)
}

/// `(1 - (S/T) D)^T x^n` from the closed form
/// `Σ_k C(T,k) (-S/T)^k n!/(n-k)! x^{n-k}`, exact in `S`'s binary value.
pub fn laguerre_poly(n: usize, t: usize, s: f64) -> Result<RealRootedPoly> {
    if n == 0 || t < n {
        return Err(Error::Precondition(format!("need T >= n >= 1, got n={n}, T={t}")));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Precondition(format!("need S > 0, got {s}")));
    }
    let alpha = rational(s)? / BigRational::from_integer(BigInt::from(t));
    let mut coeffs = vec![BigRational::zero(); n + 1];
    // term_k = C(T,k) (-α)^k n!/(n-k)!, built incrementally.
    let mut term = BigRational::one();
    coeffs[n] = term.clone();
    for k in 1..=n {
        let factor = BigRational::new(BigInt::from((t - k + 1) * (n - k + 1)), BigInt::from(k));
        term = -(term * factor * &alpha);
        coeffs[n - k] = term.clone();
    }
    RealRootedPoly::from_exact_coeffs(coeffs)
}

/// Roots of `(1 - (S/T) D)^T x^n` as `(S/T)` times the eigenvalues of the
/// Jacobi matrix of the Laguerre weight `y^{T-n} e^{-y}`.
pub fn laguerre_roots_jacobi(n: usize, t: usize, s: f64) -> Result<RootVector> {
    if n == 0 || t < n {
        return Err(Error::Precondition(format!("need T >= n >= 1, got n={n}, T={t}")));
    }
    let a = (t - n) as f64;
    let jac = crate::spectral::SymmetricMatrix::from_fn(n, |i, j| {
        if i == j {
            2.0 * i as f64 + a + 1.0
        } else if i == j + 1 {
            (i as f64 * (i as f64 + a)).sqrt()
        } else {
            0.0
        }
    });
    let spec = crate::spectral::eig(&jac, false)?;
    RootVector::new(spec.values.iter().map(|y| y * s / t as f64).collect())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EdgePrediction {
    pub lambda_min_pred: f64,
    pub lambda_max_pred: f64,
}

/// Marchenko-Pastur edges `(S/n)(1 ∓ √(n/T))²`, where `S` is the total
/// scaling `Σ s_t`, i.e. the trace of the accumulated matrix. These describe
/// the roots of `laguerre_poly(n, T, S/n)`.
pub fn mp_edges(n: usize, t: usize, s: f64) -> Result<EdgePrediction> {
    if n == 0 || t < n {
        return Err(Error::Precondition(format!("need T >= n >= 1, got n={n}, T={t}")));
    }
    let r = (n as f64 / t as f64).sqrt();
    let mean = s / n as f64;
    Ok(EdgePrediction {
        lambda_min_pred: mean * (1.0 - r).powi(2),
        lambda_max_pred: mean * (1.0 + r).powi(2),
    })
}

/// `κ_d = (√(d/2) + 1)² / (√(d/2) - 1)²`.
pub fn kappa(d: f64) -> Result<f64> {
    if !(d > 2.0) {
        return Err(Error::Precondition(format!("kappa needs d > 2, got {d}")));
    }
    let r = (d / 2.0).sqrt();
    Ok((r + 1.0).powi(2) / (r - 1.0).powi(2))
}

#[cfg(test)]
mod tests;
