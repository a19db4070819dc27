//! Real roots by recursive derivative interlacing: the roots of `p'` split
//! the line into intervals holding at most one simple root of `p` each, and
//! every sign change is then refined by safeguarded Newton-bisection.

use num_bigint::BigInt;

use super::bigfloat::{big_ratio, log2_big, IntPoly};

/// What the interlacing recursion needs from a polynomial representation.
pub(crate) trait Evaluator: Sized {
    fn degree(&self) -> usize;
    fn derivative(&self) -> Self;
    fn sign_at(&self, x: f64) -> i8;
    /// `log2 |p(x)|`, `-inf` at an exact zero.
    fn log2_abs(&self, x: f64) -> f64;
    /// Sign, `log2 |p(x)|`, and whether `p(x)` is indistinguishable from
    /// rounding noise, from a single evaluation.
    fn probe(&self, x: f64) -> Probe;
    /// Sign of `p(x)` and the Newton step `p(x)/p'(x)`.
    fn newton(&self, x: f64) -> (i8, Option<f64>);
    /// `(c_{n-1}/c_n, c_{n-2}/c_n)` and `max_i |c_i/c_n|`.
    fn normalized_head(&self) -> (f64, f64, f64);
    fn leading_sign(&self) -> i8;
    /// Residual `|p(x)|` normalized by `Σ|c_i| r^i`, `r = max(|x|, floor)`.
    fn relative_residual(&self, x: f64, floor: f64) -> f64;
}

pub(crate) struct Probe {
    sign: i8,
    log2_abs: f64,
    negligible: bool,
}

pub(crate) struct FloatEval {
    pub coeffs: Vec<f64>,
}

/// Float-mode values below this fraction of `Σ|c_i||x|^i` are rounding noise.
const FLOAT_NOISE: f64 = 64.0 * f64::EPSILON;
/// A critical point within this many ulps of a multiple root is taken as the root.
const ROOT_ULPS: f64 = 16.0;

impl FloatEval {
    fn horner(&self, x: f64) -> (f64, f64, f64) {
        let n = self.coeffs.len() - 1;
        let mut v = self.coeffs[n];
        let mut dv = 0.0;
        let mut scale = self.coeffs[n].abs();
        let ax = x.abs();
        for i in (0..n).rev() {
            dv = dv * x + v;
            v = v * x + self.coeffs[i];
            scale = scale * ax + self.coeffs[i].abs();
        }
        (v, dv, scale)
    }
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

impl Evaluator for FloatEval {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn derivative(&self) -> Self {
        FloatEval {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        }
    }

    fn sign_at(&self, x: f64) -> i8 {
        sign_of(self.horner(x).0)
    }

    fn log2_abs(&self, x: f64) -> f64 {
        self.horner(x).0.abs().log2()
    }

    fn probe(&self, x: f64) -> Probe {
        let (v, _, scale) = self.horner(x);
        Probe {
            sign: sign_of(v),
            log2_abs: v.abs().log2(),
            negligible: v.abs() <= FLOAT_NOISE * scale,
        }
    }

    fn newton(&self, x: f64) -> (i8, Option<f64>) {
        let (v, dv, _) = self.horner(x);
        (sign_of(v), (dv != 0.0).then(|| v / dv))
    }

    fn normalized_head(&self) -> (f64, f64, f64) {
        let n = self.degree();
        let lead = self.coeffs[n];
        let c1 = if n >= 1 { self.coeffs[n - 1] / lead } else { 0.0 };
        let c2 = if n >= 2 { self.coeffs[n - 2] / lead } else { 0.0 };
        let big = self.coeffs[..n].iter().fold(0.0f64, |a, c| a.max((c / lead).abs()));
        (c1, c2, big)
    }

    fn leading_sign(&self) -> i8 {
        sign_of(self.coeffs[self.degree()])
    }

    fn relative_residual(&self, x: f64, floor: f64) -> f64 {
        let (v, _, _) = self.horner(x);
        let r = x.abs().max(floor);
        let scale = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs());
        if scale == 0.0 {
            0.0
        } else {
            v.abs() / scale
        }
    }
}

impl Evaluator for IntPoly {
    fn degree(&self) -> usize {
        IntPoly::degree(self)
    }

    fn derivative(&self) -> Self {
        IntPoly::derivative(self)
    }

    fn sign_at(&self, x: f64) -> i8 {
        self.eval(x, false).sign()
    }

    fn log2_abs(&self, x: f64) -> f64 {
        let ev = self.eval(x, false);
        log2_big(&ev.value) - (ev.shift * self.degree() as i64) as f64
    }

    fn probe(&self, x: f64) -> Probe {
        let ev = self.eval(x, false);
        Probe {
            sign: ev.sign(),
            log2_abs: log2_big(&ev.value) - (ev.shift * self.degree() as i64) as f64,
            negligible: false,
        }
    }

    fn newton(&self, x: f64) -> (i8, Option<f64>) {
        let ev = self.eval(x, true);
        (ev.sign(), ev.newton_step())
    }

    fn normalized_head(&self) -> (f64, f64, f64) {
        let n = self.degree();
        let lead = &self.coeffs[n];
        let ratio = |c: &BigInt| big_ratio(c, lead);
        let c1 = if n >= 1 { ratio(&self.coeffs[n - 1]) } else { 0.0 };
        let c2 = if n >= 2 { ratio(&self.coeffs[n - 2]) } else { 0.0 };
        let big = self.coeffs[..n].iter().fold(0.0f64, |a, c| a.max(ratio(c).abs()));
        (c1, c2, big)
    }

    fn leading_sign(&self) -> i8 {
        let n = self.degree();
        if self.coeffs[n] > BigInt::from(0) {
            1
        } else {
            -1
        }
    }

    fn relative_residual(&self, x: f64, floor: f64) -> f64 {
        IntPoly::relative_residual(self, x, floor)
    }
}

/// Why interlacing failed to account for every root.
#[derive(Debug, Clone)]
pub(crate) struct Shortfall {
    pub degree: usize,
    pub found: usize,
}

/// Closed interval containing every real root, valid when all roots are real.
fn root_hull<E: Evaluator>(p: &E) -> (f64, f64) {
    let n = p.degree();
    let (c1, c2, big) = p.normalized_head();
    let nf = n as f64;
    let mean = -c1 / nf;
    let sum_sq = c1 * c1 - 2.0 * c2;
    let var = (sum_sq / nf - mean * mean).max(0.0);
    // Laguerre-Samuelson: every root lies within sqrt((n-1)·var) of the mean.
    let radius = (var * (nf - 1.0)).sqrt();
    let margin = radius * 1e-6 + (mean.abs() + radius) * 1e-9 + 1e-12;
    let (lo, hi) = (mean - radius - margin, mean + radius + margin);
    let lead = p.leading_sign();
    let low_sign = if n % 2 == 0 { lead } else { -lead };
    if p.sign_at(hi) == lead && p.sign_at(lo) == low_sign {
        (lo, hi)
    } else {
        // Cauchy's bound holds regardless of real-rootedness.
        let b = 1.0 + big;
        (-b, b)
    }
}

/// All roots with multiplicity, ascending.
pub(crate) fn interlacing_roots<E: Evaluator>(p: &E) -> Result<Vec<f64>, Shortfall> {
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (lo, hi) = root_hull(p);
    // chain[k] is the (k+1)-th derivative, down to the nonzero constant.
    let mut chain = vec![p.derivative()];
    while chain.last().expect("nonempty").degree() > 0 {
        let next = chain.last().expect("nonempty").derivative();
        chain.push(next);
    }
    let mut roots = Vec::new();
    for k in (0..n).rev() {
        let (q, higher) = if k == 0 { (p, &chain[..]) } else { (&chain[k - 1], &chain[k..]) };
        roots = roots_given_critical_points(q, higher, &roots, lo, hi)?;
    }
    Ok(roots)
}

/// Whether the critical point `z` of multiplicity `mult` is itself a root:
/// `|p(z)|` must not exceed the Taylor term `|p^(mult+1)(z)| δ^(mult+1) / (mult+1)!`
/// for `δ` a few ulps of `z`.
fn vanishes_at<E: Evaluator>(at: &Probe, higher: &[E], z: f64, mult: usize) -> bool {
    if at.sign == 0 || at.negligible {
        return true;
    }
    let order = mult + 1;
    let delta = ROOT_ULPS * f64::EPSILON * z.abs().max(f64::MIN_POSITIVE);
    let log_fact: f64 = (2..=order).map(|i| (i as f64).log2()).sum();
    let taylor = higher[mult].log2_abs(z) - log_fact + order as f64 * delta.log2();
    at.log2_abs <= taylor
}

fn roots_given_critical_points<E: Evaluator>(
    p: &E,
    higher: &[E],
    critical: &[f64],
    lo: f64,
    hi: f64,
) -> Result<Vec<f64>, Shortfall> {
    let n = p.degree();
    if n == 1 {
        let (c1, _, _) = p.normalized_head();
        return Ok(vec![-c1]);
    }
    // Distinct critical points with multiplicities, framed by the hull.
    let mut points: Vec<(f64, usize)> = vec![(lo.min(critical[0]), 0)];
    for &c in critical {
        match points.last_mut() {
            Some((x, m)) if *x == c && *m > 0 => *m += 1,
            _ => points.push((c, 1)),
        }
    }
    points.push((hi.max(critical[critical.len() - 1]), 0));
    let probes: Vec<Probe> = points.iter().map(|&(x, _)| p.probe(x)).collect();
    let zero: Vec<bool> = points
        .iter()
        .zip(&probes)
        .map(|(&(x, m), pr)| m > 0 && vanishes_at(pr, higher, x, m))
        .collect();
    let signs: Vec<i8> = probes.iter().map(|pr| pr.sign).collect();

    let mut roots = Vec::with_capacity(n);
    for (j, &(x, mult)) in points.iter().enumerate() {
        if zero[j] {
            roots.extend(std::iter::repeat(x).take(mult + 1));
        }
        if j + 1 < points.len() && !zero[j] && !zero[j + 1] {
            let (sa, sb) = (signs[j], signs[j + 1]);
            if sa != 0 && sb != 0 && sa != sb {
                roots.push(refine(p, x, points[j + 1].0, sa));
            }
        }
    }
    if roots.len() != n {
        return Err(Shortfall {
            degree: n,
            found: roots.len(),
        });
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Root of `p` in `(a, b)` given `sign p(a) = sa = -sign p(b)`: Newton steps
/// while they stay inside the bracket and shrink fast, bisection otherwise.
fn refine<E: Evaluator>(p: &E, mut a: f64, mut b: f64, sa: i8) -> f64 {
    let mut x = short_point(a, b);
    let mut dx_old = b - a;
    let mut dx = dx_old;
    for _ in 0..400 {
        let (s, step) = p.newton(x);
        if s == 0 {
            return x;
        }
        if s == sa {
            a = x;
        } else {
            b = x;
        }
        if let Some(d) = step {
            if d.abs() <= 2.0 * f64::EPSILON * x.abs() {
                return x;
            }
        }
        let newton = step
            .map(|d| (d, x - d))
            .filter(|&(d, c)| c > a && c < b && d.abs() < 0.5 * dx_old.abs());
        dx_old = dx;
        match newton {
            Some((d, c)) => {
                dx = d;
                x = c;
            }
            None => {
                let mid = short_point(a, b);
                if mid <= a || mid >= b {
                    break;
                }
                dx = b - a;
                x = mid;
            }
        }
    }
    0.5 * (a + b)
}

/// A point of `(a, b)` with as few significant bits as possible, so exact
/// evaluation there is cheap. Falls back to the midpoint.
fn short_point(a: f64, b: f64) -> f64 {
    let width = b - a;
    if !(width > 0.0) || !width.is_finite() {
        return 0.5 * (a + b);
    }
    if a < 0.0 && b > 0.0 {
        return 0.0;
    }
    let mut unit = 2f64.powi(width.log2().floor() as i32);
    for _ in 0..4 {
        let c = (a / unit).floor() * unit + unit;
        if c > a && c < b {
            return c;
        }
        unit *= 0.5;
    }
    0.5 * (a + b)
}
