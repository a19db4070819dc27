//! Alon-Boppana test vectors and the lower bounds on `λ_n/λ_2` they certify.
//!
//! For a root `r` and radius `k` below half the girth, `f_r(v)` is the square
//! root of the product of edge weights along the unique path from `r` to `v`,
//! and `f'_r` flips the sign on odd levels. Every edge inside the ball joins
//! consecutive levels, so `f'ᵀ W f' = -fᵀ W f` while the diagonal parts agree.
//! Rayleigh quotients of the projections of `f` and `f'` orthogonal to `1`
//! bound `λ_2` from above and `λ_n` from below.

mod walks;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{bfs_tree, BfsTree, WeightedGraph};
use crate::spectral::{dot, lambda_ratio, laplacian, rayleigh};

pub use walks::{
    convexity_check, edge_stationary_sqrt_weight, pi_average_fwf_from_walks, stationary_distribution,
    walk_stats, ConvexityCheck, Estimate, WalkMode, WalkStats, EXACT_MAX_K, EXACT_MAX_N,
};

/// Tolerance on "maximum weighted degree is 1".
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Above this many vertices `best_root_certificate` samples roots from `π`.
pub const ALL_ROOTS_MAX_N: usize = 5000;
pub const SAMPLED_ROOTS: usize = 512;
pub const ROOT_SAMPLE_SEED: u64 = 0x5eed_ab;

#[derive(Debug, Clone)]
pub struct TestFunction {
    pub root: usize,
    pub k: usize,
    pub f: Vec<f64>,
    pub tree: BfsTree,
}

impl TestFunction {
    pub fn norm_sq(&self) -> f64 {
        dot(&self.f, &self.f)
    }

    /// `C_ℓ = Σ_{dist(r,v) = ℓ} f(v)²` for every non-empty level.
    pub fn level_sums(&self) -> Vec<f64> {
        self.tree
            .levels
            .iter()
            .map(|lvl| lvl.iter().map(|&v| self.f[v] * self.f[v]).sum())
            .collect()
    }

    /// Number of non-zero coordinates.
    pub fn support(&self) -> usize {
        self.tree.len()
    }
}

fn check_girth(g: &WeightedGraph, k: usize) -> Result<()> {
    if !g.girth().exceeds(2 * k + 1) {
        return Err(Error::Precondition(format!(
            "radius {k} needs girth > {}, graph has girth {}",
            2 * k + 1,
            g.girth()
        )));
    }
    Ok(())
}

fn check_normalized(g: &WeightedGraph) -> Result<()> {
    let top = g.max_weighted_degree();
    if (top - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Precondition(format!(
            "maximum weighted degree is {top}, expected 1"
        )));
    }
    Ok(())
}

/// `f_r` on the radius-`k` ball. Needs `2k+1 < girth`. Balls that run out of
/// vertices before level `k` are fine.
pub fn test_function(g: &WeightedGraph, r: usize, k: usize) -> Result<TestFunction> {
    check_girth(g, k)?;
    build_test_function(g, r, k)
}

fn build_test_function(g: &WeightedGraph, r: usize, k: usize) -> Result<TestFunction> {
    let tree = bfs_tree(g, r, k)?;
    let mut f = vec![0.0; g.n()];
    f[r] = 1.0;
    for lvl in tree.levels.iter().skip(1) {
        for &v in lvl {
            let p = tree.parent[v].expect("non-root tree vertex has a parent");
            let w = g.weight(p, v).expect("tree edge");
            f[v] = w.sqrt() * f[p];
        }
    }
    Ok(TestFunction { root: r, k, f, tree })
}

/// `f'(v) = (-1)^{dist(r,v)} f(v)`.
pub fn signed_test_function(tf: &TestFunction) -> Vec<f64> {
    let mut out = tf.f.clone();
    for lvl in tf.tree.levels.iter().skip(1).step_by(2) {
        for &v in lvl {
            out[v] = -out[v];
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct FnormReport {
    pub norm_sq: f64,
    /// `(1 - 8/√d)^k (k+1)`.
    pub lower: f64,
    /// `k + 1`.
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub level_sums: Vec<f64>,
    /// `C_{ℓ+1} ∈ [C_ℓ (1 - 8/√d), C_ℓ]` for each `ℓ < k`.
    pub level_checks: Vec<bool>,
}

impl FnormReport {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds && self.level_checks.iter().all(|&b| b)
    }
}

/// Checks `(1 - 8/√d)^k (k+1) <= ‖f‖² <= k+1` and the level-by-level decay.
///
/// Needs max weighted degree 1, min weighted degree `>= 1 - 4/√d`, every
/// edge weight `<= 4/√d`, and `2k+1 < girth`.
pub fn fnorm_bounds_check(g: &WeightedGraph, tf: &TestFunction, d: f64) -> Result<FnormReport> {
    check_normalized(g)?;
    check_girth(g, tf.k)?;
    let sd = d.sqrt();
    let degs = g.degrees();
    if degs.min_weighted < 1.0 - 4.0 / sd - NORMALIZATION_TOL {
        return Err(Error::Precondition(format!(
            "minimum weighted degree {} < 1 - 4/sqrt(d)",
            degs.min_weighted
        )));
    }
    if let Some(e) = g.edges().iter().find(|e| e.w > 4.0 / sd + NORMALIZATION_TOL) {
        return Err(Error::Precondition(format!(
            "edge {{{}, {}}} has weight {} > 4/sqrt(d)",
            e.u, e.v, e.w
        )));
    }
    let tol = 1e-12;
    let norm_sq = tf.norm_sq();
    // For d < 64 the factor is negative and the lower bound is vacuous.
    let decay = (1.0 - 8.0 / sd).max(0.0);
    let lower = decay.powi(tf.k as i32) * (tf.k + 1) as f64;
    let upper = (tf.k + 1) as f64;
    let mut level_sums = tf.level_sums();
    // A ball that stops early has empty levels, which count as zero.
    level_sums.resize(tf.k + 1, 0.0);
    let level_checks = level_sums
        .windows(2)
        .map(|c| c[1] >= c[0] * decay - tol * c[0] && c[1] <= c[0] * (1.0 + tol))
        .collect();
    Ok(FnormReport {
        norm_sq,
        lower,
        upper,
        lower_holds: norm_sq >= lower * (1.0 - tol),
        upper_holds: norm_sq <= upper * (1.0 + tol),
        level_sums,
        level_checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionReport {
    /// `‖f⊥‖² / ‖f‖²`.
    pub measured: f64,
    /// `1 - ‖f‖_0 / n`, from `‖f¹‖² <= ‖f‖_0 ‖f‖² / n`.
    pub support_bound: f64,
    /// `1 - B/n` with `B = 2n / (d/4 - 1)^((g-1)/2 - k)` bounding the ball size.
    pub ball_bound: f64,
    pub holds: bool,
}

/// Checks `‖f⊥‖² >= ‖f‖² (1 - ‖f‖_0/n)` and that the support fits the
/// ball-size bound. Needs min combinatorial degree `>= d/4`, `d >= 12`,
/// girth `>= g` and `k <= (g-1)/2`.
pub fn projection_bound_check(
    g: &WeightedGraph,
    tf: &TestFunction,
    d: f64,
    asserted_girth: usize,
) -> Result<ProjectionReport> {
    let ball = crate::graph::ball_size_check(g, tf.root, tf.k, asserted_girth, d)?;
    let n = g.n() as f64;
    let norm_sq = tf.norm_sq();
    let sum: f64 = tf.f.iter().sum();
    let measured = (norm_sq - sum * sum / n) / norm_sq;
    let support_bound = 1.0 - tf.support() as f64 / n;
    let ball_bound = 1.0 - ball.bound / n;
    Ok(ProjectionReport {
        measured,
        support_bound,
        ball_bound,
        holds: measured >= support_bound - 1e-12 && ball.holds,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AbCertificate {
    pub root: usize,
    pub k: usize,
    #[serde(skip)]
    pub f: Vec<f64>,
    #[serde(skip)]
    pub f_signed: Vec<f64>,
    /// `fᵀ D f`, equal to `f'ᵀ D f'`.
    pub f_d_f: f64,
    pub f_w_f: f64,
    pub signed_w_signed: f64,
    pub signed_d_signed: f64,
    pub f_norm_sq: f64,
    /// `‖f⊥‖²`.
    pub f_perp_sq: f64,
    /// `‖f'⊥‖²`.
    pub signed_perp_sq: f64,
    /// `(f'ᵀ L f' / ‖f'⊥‖²) / (fᵀ L f / ‖f⊥‖²)`.
    pub certified_lower_bound: f64,
    pub eigensolver_ratio: f64,
}

/// Diagonal and off-diagonal quadratic forms of a vector supported on `ball`.
fn ball_forms(g: &WeightedGraph, ball: impl Iterator<Item = usize>, f: &[f64]) -> (f64, f64) {
    let (mut dd, mut ww) = (0.0, 0.0);
    for v in ball {
        let fv = f[v];
        for &(u, w) in g.neighbors(v) {
            dd += w * fv * fv;
            ww += w * fv * f[u];
        }
    }
    (dd, ww)
}

fn perp_sq(f: &[f64], norm_sq: f64) -> f64 {
    let s: f64 = f.iter().sum();
    norm_sq - s * s / f.len() as f64
}

fn certificate_from(g: &WeightedGraph, tf: TestFunction, eigensolver_ratio: f64) -> Result<AbCertificate> {
    let signed = signed_test_function(&tf);
    let (f_d_f, f_w_f) = ball_forms(g, tf.tree.vertices(), &tf.f);
    let (signed_d_signed, signed_w_signed) = ball_forms(g, tf.tree.vertices(), &signed);
    let f_norm_sq = tf.norm_sq();
    let f_perp_sq = perp_sq(&tf.f, f_norm_sq);
    let signed_perp_sq = perp_sq(&signed, f_norm_sq);
    let floor = 1e-12 * f_norm_sq;
    if f_perp_sq <= floor || signed_perp_sq <= floor {
        return Err(Error::Precondition(format!(
            "test function at root {} is nearly constant",
            tf.root
        )));
    }
    let low = (f_d_f - f_w_f) / f_perp_sq;
    let high = (signed_d_signed - signed_w_signed) / signed_perp_sq;
    if low <= 0.0 {
        return Err(Error::Precondition("f has zero Laplacian form".into()));
    }
    Ok(AbCertificate {
        root: tf.root,
        k: tf.k,
        f_d_f,
        f_w_f,
        signed_w_signed,
        signed_d_signed,
        f_norm_sq,
        f_perp_sq,
        signed_perp_sq,
        certified_lower_bound: high / low,
        eigensolver_ratio,
        f: tf.f,
        f_signed: signed,
    })
}

fn check_certificate_preconditions(g: &WeightedGraph, k: usize) -> Result<()> {
    check_girth(g, k)?;
    check_normalized(g)?;
    if !g.is_connected() {
        return Err(Error::Precondition("certificate needs a connected graph".into()));
    }
    Ok(())
}

/// Certificate for root `r`. Needs `2k+1 < girth`, a connected graph and max
/// weighted degree 1. Also runs the eigensolver for `eigensolver_ratio`.
pub fn ab_certificate(g: &WeightedGraph, r: usize, k: usize) -> Result<AbCertificate> {
    check_certificate_preconditions(g, k)?;
    let tf = build_test_function(g, r, k)?;
    certificate_from(g, tf, lambda_ratio(g)?.ratio)
}

#[derive(Debug, Clone, Serialize)]
pub struct BestRootCertificate {
    pub certificate: AbCertificate,
    /// `Σ_r π(r) f_rᵀ W f_r`, or its sample mean when roots were sampled.
    pub pi_average_fwf: f64,
    /// `2k/√d` with `d = 2m/n`.
    pub fwf_target: f64,
    pub roots_evaluated: usize,
    pub sampled: bool,
}

fn fwf_at(g: &WeightedGraph, r: usize, k: usize) -> Result<f64> {
    let tf = build_test_function(g, r, k)?;
    Ok(ball_forms(g, tf.tree.vertices(), &tf.f).1)
}

/// Maximizes `f_rᵀ W f_r` over all roots (or over `SAMPLED_ROOTS` draws from
/// `π` when `n > ALL_ROOTS_MAX_N`) and certifies the winner. Ties go to the
/// lowest vertex id.
pub fn best_root_certificate(g: &WeightedGraph, k: usize) -> Result<BestRootCertificate> {
    check_certificate_preconditions(g, k)?;
    let pi = stationary_distribution(g)?;
    let n = g.n();
    let sampled = n > ALL_ROOTS_MAX_N;
    let roots: Vec<usize> = if sampled {
        use rand::distributions::{Distribution, WeightedIndex};
        let dist = WeightedIndex::new(&pi).map_err(|e| Error::Precondition(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(ROOT_SAMPLE_SEED);
        (0..SAMPLED_ROOTS).map(|_| dist.sample(&mut rng)).collect()
    } else {
        (0..n).collect()
    };
    let values = roots
        .par_iter()
        .map(|&r| fwf_at(g, r, k).map(|x| (r, x)))
        .collect::<Result<Vec<_>>>()?;
    let pi_average_fwf = if sampled {
        values.iter().map(|&(_, x)| x).sum::<f64>() / values.len() as f64
    } else {
        values.iter().map(|&(r, x)| pi[r] * x).sum()
    };
    let (best, _) = values
        .iter()
        .copied()
        .fold((usize::MAX, f64::NEG_INFINITY), |(br, bx), (r, x)| {
            if x > bx || (x == bx && r < br) {
                (r, x)
            } else {
                (br, bx)
            }
        });
    let tf = build_test_function(g, best, k)?;
    let certificate = certificate_from(g, tf, lambda_ratio(g)?.ratio)?;
    Ok(BestRootCertificate {
        certificate,
        pi_average_fwf,
        fwf_target: 2.0 * k as f64 / g.average_degree().sqrt(),
        roots_evaluated: roots.len(),
        sampled,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateNorms {
    pub f_sq: f64,
    pub f_perp_sq: f64,
    pub signed_perp_sq: f64,
}

/// JSON shape written by the `ab-certify` command.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub root: usize,
    pub k: usize,
    pub certified_lower_bound: f64,
    pub eigensolver_ratio: f64,
    #[serde(rename = "fWf")]
    pub fwf: f64,
    #[serde(rename = "fDf")]
    pub fdf: f64,
    pub norms: CertificateNorms,
    pub walk_stats: Option<WalkStats>,
}

impl CertificateReport {
    pub fn new(c: &AbCertificate, walk_stats: Option<WalkStats>) -> Self {
        Self {
            root: c.root,
            k: c.k,
            certified_lower_bound: c.certified_lower_bound,
            eigensolver_ratio: c.eigensolver_ratio,
            fwf: c.f_w_f,
            fdf: c.f_d_f,
            norms: CertificateNorms {
                f_sq: c.f_norm_sq,
                f_perp_sq: c.f_perp_sq,
                signed_perp_sq: c.signed_perp_sq,
            },
            walk_stats,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LowDegreeCertificate {
    /// Vertex with weighted degree `<= 1 - 4/√d`.
    pub u: usize,
    /// Vertex of weighted degree 1.
    pub v: usize,
    #[serde(skip)]
    pub f: Vec<f64>,
    #[serde(skip)]
    pub h: Vec<f64>,
    /// `fᵀ L f / ‖f‖²` with `f(u) = 1`, `f(z) = -1/(n-1)`; bounds `λ_2` from above.
    pub lambda2_upper: f64,
    /// `(1 - 4/√d) · n/(n-1)`, the bound the proof derives for `lambda2_upper`.
    pub lambda2_bound: f64,
    /// `hᵀ L h / ‖h‖²` with `h = e_v`; bounds `λ_n` from below.
    pub lambdan_lower: f64,
    /// `lambdan_lower / lambda2_upper`.
    pub ratio_bound: f64,
}

/// Witness vectors when some vertex has weighted degree `<= 1 - 4/√d`.
/// Needs max weighted degree 1 and `n >= 2`.
pub fn claim_low_weighted_degree(g: &WeightedGraph, d: f64) -> Result<Option<LowDegreeCertificate>> {
    check_normalized(g)?;
    let n = g.n();
    if n < 2 {
        return Err(Error::Precondition("need at least two vertices".into()));
    }
    let threshold = 1.0 - 4.0 / d.sqrt();
    let degs = g.degrees().weighted;
    let pick = |better: fn(f64, f64) -> bool| {
        (0..n).fold(0, |b, x| if better(degs[x], degs[b]) { x } else { b })
    };
    let u = pick(|a, b| a < b);
    if degs[u] > threshold + 1e-12 {
        return Ok(None);
    }
    let v = pick(|a, b| a > b);
    let lap = laplacian(g);
    let mut f = vec![-1.0 / (n - 1) as f64; n];
    f[u] = 1.0;
    let mut h = vec![0.0; n];
    h[v] = 1.0;
    let lambda2_upper = rayleigh(&lap, &f)?;
    let lambdan_lower = rayleigh(&lap, &h)?;
    Ok(Some(LowDegreeCertificate {
        u,
        v,
        f,
        h,
        lambda2_upper,
        lambda2_bound: threshold * n as f64 / (n - 1) as f64,
        lambdan_lower,
        ratio_bound: lambdan_lower / lambda2_upper,
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct HeavyEdgeCertificate {
    pub u: usize,
    pub v: usize,
    pub w: f64,
    #[serde(skip)]
    pub h: Vec<f64>,
    /// `hᵀ L h / ‖h‖²` with `h(u) = 1`, `h(v) = -1`, equal to `(w(u) + w(v) + 2w) / 2`.
    pub quotient: f64,
    /// `1 + 4/√d`.
    pub target: f64,
}

impl HeavyEdgeCertificate {
    pub fn meets_target(&self) -> bool {
        self.quotient >= self.target - 1e-12
    }
}

/// Witness when some edge has weight `> 4/√d`; takes the heaviest such edge,
/// the first one listed on ties.
pub fn claim_heavy_edge(g: &WeightedGraph, d: f64) -> Result<Option<HeavyEdgeCertificate>> {
    check_normalized(g)?;
    let target = 4.0 / d.sqrt();
    let Some(e) = g
        .edges()
        .iter()
        .filter(|e| e.w > target)
        .fold(None::<&crate::graph::Edge>, |best, e| match best {
            Some(b) if b.w >= e.w => Some(b),
            _ => Some(e),
        })
    else {
        return Ok(None);
    };
    let mut h = vec![0.0; g.n()];
    h[e.u] = 1.0;
    h[e.v] = -1.0;
    let quotient = rayleigh(&laplacian(g), &h)?;
    Ok(Some(HeavyEdgeCertificate {
        u: e.u,
        v: e.v,
        w: e.w,
        h,
        quotient,
        target: 1.0 + target,
    }))
}

/// Lowest-id vertex of combinatorial degree `< d/4`. Detection only: no
/// witness vector is produced for this case.
pub fn claim_low_comb_degree_detect(g: &WeightedGraph, d: f64) -> Option<usize> {
    (0..g.n()).find(|&v| (g.combinatorial_degree(v) as f64) < d / 4.0)
}

#[cfg(test)]
mod tests;
