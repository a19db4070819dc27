//! Stationary random walks: `X_0 ~ π`, then `P(u → v) = w(u,v) / w(u)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub const EXACT_MAX_K: usize = 6;
pub const EXACT_MAX_N: usize = 200;

/// `π(v) = w(v) / Σ_u w(u)`.
pub fn stationary_distribution(g: &WeightedGraph) -> Result<Vec<f64>> {
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    let deg: Vec<f64> = (0..g.n()).map(|v| g.weighted_degree(v)).collect();
    let total: f64 = deg.iter().sum();
    Ok(deg.into_iter().map(|x| x / total).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WalkMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

/// A mean with its standard error (zero in exact mode).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    fn exact(mean: f64) -> Self {
        Self { mean, std_error: 0.0 }
    }

    /// True when `|self - other| <= sigmas · (combined standard error) + abs`.
    pub fn agrees_with(&self, other: &Estimate, sigmas: f64, abs: f64) -> bool {
        let se = self.std_error.hypot(other.std_error);
        (self.mean - other.mean).abs() <= sigmas * se + abs
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WalkStats {
    pub k: usize,
    pub mode: WalkMode,
    /// `E Σ_{i=1..k} √w(X_{i-1}, X_i)`.
    pub sqrt_weight_sum: Estimate,
    /// `k · Σ_E w^{3/2} / Σ_E w`, what edge-stationarity predicts for the above.
    pub stationary_prediction: f64,
    /// `E[1{some X_i = X_{i-2}} · Σ √w]`.
    pub backtrack_weighted: Estimate,
    /// `P(X_i = X_{i-2})` for `i = 2..=k`.
    pub backtrack_probability: Vec<Estimate>,
    /// Total probability mass of all enumerated walks (exact mode only).
    pub total_probability: Option<f64>,
    /// The degree parameter `d = 2m/n` used by the two bounds below.
    pub d: f64,
    /// `k/√d - 2k/d`.
    pub sqrt_weight_lower_bound: f64,
    /// `(4/√d) / (1 - 4/√d)`, only meaningful for `d > 16`.
    pub backtrack_bound: Option<f64>,
}

/// `Σ_E w^{3/2} / Σ_E w`.
pub fn edge_stationary_sqrt_weight(g: &WeightedGraph) -> Result<f64> {
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    let num: f64 = g.edges().iter().map(|e| e.w * e.w.sqrt()).sum();
    Ok(num / g.total_weight())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvexityCheck {
    pub mean_sqrt_weight: f64,
    /// `√(S / (dn/2))` with `S = Σ_E w` and `dn/2 = m`.
    pub bound: f64,
    pub holds: bool,
}

/// Power-mean step: `Σ w^{3/2} / Σ w >= √(Σ w / m)`.
pub fn convexity_check(g: &WeightedGraph) -> Result<ConvexityCheck> {
    let mean_sqrt_weight = edge_stationary_sqrt_weight(g)?;
    let bound = (g.total_weight() / g.m() as f64).sqrt();
    Ok(ConvexityCheck {
        mean_sqrt_weight,
        bound,
        holds: mean_sqrt_weight >= bound * (1.0 - 1e-12),
    })
}

pub fn walk_stats(g: &WeightedGraph, k: usize, mode: WalkMode) -> Result<WalkStats> {
    if !g.is_connected() {
        return Err(Error::Precondition("walk statistics need a connected graph".into()));
    }
    let pi = stationary_distribution(g)?;
    let d = g.average_degree();
    let sd = d.sqrt();
    let (sqrt_weight_sum, backtrack_weighted, backtrack_probability, total_probability) = match mode {
        WalkMode::Exact => {
            if k > EXACT_MAX_K || g.n() > EXACT_MAX_N {
                return Err(Error::Precondition(format!(
                    "exact walk enumeration needs k <= {EXACT_MAX_K} and n <= {EXACT_MAX_N}"
                )));
            }
            let e = exact(g, &pi, k);
            (
                Estimate::exact(e.sqrt_sum),
                Estimate::exact(e.backtrack_weighted),
                e.per_step.into_iter().map(Estimate::exact).collect(),
                Some(e.total),
            )
        }
        WalkMode::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::Precondition("Monte Carlo needs at least 2 samples".into()));
            }
            let m = monte_carlo(g, &pi, k, samples, seed);
            (m.sqrt_sum, m.backtrack_weighted, m.per_step, None)
        }
    };
    Ok(WalkStats {
        k,
        mode,
        sqrt_weight_sum,
        stationary_prediction: k as f64 * edge_stationary_sqrt_weight(g)?,
        backtrack_weighted,
        backtrack_probability,
        total_probability,
        d,
        sqrt_weight_lower_bound: k as f64 / sd - 2.0 * k as f64 / d,
        backtrack_bound: (d > 16.0).then(|| (4.0 / sd) / (1.0 - 4.0 / sd)),
    })
}

/// Directed arcs `u → nbrs[u][j]`, indexed by `offset[u] + j`.
struct Arcs {
    offset: Vec<usize>,
    tail: Vec<usize>,
    head: Vec<usize>,
    w: Vec<f64>,
}

impl Arcs {
    fn new(g: &WeightedGraph) -> Self {
        let mut offset = Vec::with_capacity(g.n() + 1);
        let (mut tail, mut head, mut w) = (Vec::new(), Vec::new(), Vec::new());
        for u in 0..g.n() {
            offset.push(tail.len());
            for &(v, x) in g.neighbors(u) {
                tail.push(u);
                head.push(v);
                w.push(x);
            }
        }
        offset.push(tail.len());
        Self { offset, tail, head, w }
    }

    fn len(&self) -> usize {
        self.tail.len()
    }

    fn out(&self, u: usize) -> std::ops::Range<usize> {
        self.offset[u]..self.offset[u + 1]
    }
}

struct ExactWalks {
    sqrt_sum: f64,
    backtrack_weighted: f64,
    per_step: Vec<f64>,
    total: f64,
}

/// Dynamic program over (last arc, has backtracked) carrying the probability
/// mass and the mass-weighted running `Σ √w`.
fn exact(g: &WeightedGraph, pi: &[f64], k: usize) -> ExactWalks {
    if k == 0 {
        return ExactWalks {
            sqrt_sum: 0.0,
            backtrack_weighted: 0.0,
            per_step: Vec::new(),
            total: pi.iter().sum(),
        };
    }
    let arcs = Arcs::new(g);
    let deg: Vec<f64> = (0..g.n()).map(|v| g.weighted_degree(v)).collect();
    let a = arcs.len();
    // mass[b][arc], acc[b][arc]
    let mut mass = [vec![0.0; a], vec![0.0; a]];
    let mut acc = [vec![0.0; a], vec![0.0; a]];
    for e in 0..a {
        let p = pi[arcs.tail[e]] * arcs.w[e] / deg[arcs.tail[e]];
        mass[0][e] = p;
        acc[0][e] = p * arcs.w[e].sqrt();
    }
    let mut per_step = Vec::with_capacity(k.saturating_sub(1));
    for _ in 2..=k {
        let mut next_mass = [vec![0.0; a], vec![0.0; a]];
        let mut next_acc = [vec![0.0; a], vec![0.0; a]];
        let mut back = 0.0;
        for b in 0..2 {
            for e in 0..a {
                let (m, s) = (mass[b][e], acc[b][e]);
                if m == 0.0 {
                    continue;
                }
                let (x, y) = (arcs.tail[e], arcs.head[e]);
                for f in arcs.out(y) {
                    let p = arcs.w[f] / deg[y];
                    let z = arcs.head[f];
                    let nb = if z == x {
                        back += m * p;
                        1
                    } else {
                        b
                    };
                    next_mass[nb][f] += m * p;
                    next_acc[nb][f] += p * (s + m * arcs.w[f].sqrt());
                }
            }
        }
        per_step.push(back);
        mass = next_mass;
        acc = next_acc;
    }
    let sum = |v: &Vec<f64>| v.iter().sum::<f64>();
    ExactWalks {
        sqrt_sum: sum(&acc[0]) + sum(&acc[1]),
        backtrack_weighted: sum(&acc[1]),
        per_step,
        total: sum(&mass[0]) + sum(&mass[1]),
    }
}

struct MonteCarloWalks {
    sqrt_sum: Estimate,
    backtrack_weighted: Estimate,
    per_step: Vec<Estimate>,
}

#[derive(Default, Clone, Copy)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn estimate(&self, n: usize) -> Estimate {
        let nf = n as f64;
        let mean = self.sum / nf;
        let var = ((self.sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        Estimate {
            mean,
            std_error: (var / nf).sqrt(),
        }
    }
}

/// Cumulative weights over `(weight, id)`-sorted items for inverse-CDF draws.
struct Sampler {
    items: Vec<(usize, f64)>,
    cdf: Vec<f64>,
}

impl Sampler {
    fn new(mut items: Vec<(usize, f64)>) -> Self {
        items.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut run = 0.0;
        let cdf = items
            .iter()
            .map(|&(_, w)| {
                run += w;
                run
            })
            .collect();
        Self { items, cdf }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> (usize, f64) {
        let total = *self.cdf.last().expect("non-empty sampler");
        let u = rng.gen::<f64>() * total;
        let i = self.cdf.partition_point(|&c| c <= u).min(self.items.len() - 1);
        self.items[i]
    }
}

fn monte_carlo(g: &WeightedGraph, pi: &[f64], k: usize, samples: usize, seed: u64) -> MonteCarloWalks {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Sampler::new(pi.iter().copied().enumerate().collect());
    let steps: Vec<Sampler> = (0..g.n()).map(|u| Sampler::new(g.neighbors(u).to_vec())).collect();
    let mut sqrt_sum = Moments::default();
    let mut weighted = Moments::default();
    let mut per_step = vec![Moments::default(); k.saturating_sub(1)];
    for _ in 0..samples {
        let (mut cur, _) = start.draw(&mut rng);
        let mut prev = usize::MAX;
        let mut total = 0.0;
        let mut backtracked = false;
        for i in 1..=k {
            let (next, w) = steps[cur].draw(&mut rng);
            total += w.sqrt();
            if i >= 2 {
                let b = next == prev;
                backtracked |= b;
                per_step[i - 2].push(if b { 1.0 } else { 0.0 });
            }
            prev = cur;
            cur = next;
        }
        sqrt_sum.push(total);
        weighted.push(if backtracked { total } else { 0.0 });
    }
    MonteCarloWalks {
        sqrt_sum: sqrt_sum.estimate(samples),
        backtrack_weighted: weighted.estimate(samples),
        per_step: per_step.iter().map(|m| m.estimate(samples)).collect(),
    }
}

/// `Σ_r π(r) f_rᵀ W f_r` through non-backtracking walks:
/// `2 Σ_{ℓ=1..k} E_π[1{non-backtracking} · Π_{i<ℓ} w(X_i) · √w(X_{ℓ-1}, X_ℓ)]`.
///
/// Equal to the per-root average when `2k+1 < girth`, since then every
/// non-backtracking walk of length `ℓ <= k` is the unique path to a vertex at
/// distance `ℓ`.
pub fn pi_average_fwf_from_walks(g: &WeightedGraph, k: usize) -> Result<f64> {
    let pi = stationary_distribution(g)?;
    if k == 0 {
        return Ok(0.0);
    }
    let arcs = Arcs::new(g);
    // a(x → y) = π(root) · Π of weights along the path.
    let mut a: Vec<f64> = (0..arcs.len()).map(|e| pi[arcs.tail[e]] * arcs.w[e]).collect();
    let mut total = 0.0;
    for ell in 1..=k {
        total += 2.0 * a.iter().zip(&arcs.w).map(|(x, w)| x * w.sqrt()).sum::<f64>();
        if ell == k {
            break;
        }
        let mut next = vec![0.0; arcs.len()];
        for e in 0..arcs.len() {
            if a[e] == 0.0 {
                continue;
            }
            let (x, y) = (arcs.tail[e], arcs.head[e]);
            for f in arcs.out(y) {
                if arcs.head[f] != x {
                    next[f] += a[e] * arcs.w[f];
                }
            }
        }
        a = next;
    }
    Ok(total)
}
