//! Spectral sparsification by running the barrier player on the edge vectors
//! of a graph, put in isotropic position by `L^{+1/2}`.
//!
//! Vectors live in an explicit orthonormal basis of `1⊥` (the Helmert basis),
//! so the menu is isotropic in dimension `n - 1`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{BssParams, BssPlayer, GameState, Strategy, VectorMenu};
use crate::graph::{Edge, WeightedGraph};
use crate::poly::kappa;
use crate::spectral::{eig, laplacian, pinv_sqrt, DenseMatrix, SymmetricMatrix, DEFAULT_RANK_TOL};

pub const ISOTROPY_TOL: f64 = 1e-8;
pub const VERIFY_SLACK: f64 = 1e-8;

/// Orthonormal basis of `1⊥` as the columns of an `n × (n-1)` matrix. Column
/// `k-1` is `(1, …, 1, -k, 0, …, 0) / √(k(k+1))` with `k` leading ones.
pub fn helmert_basis(n: usize) -> DenseMatrix {
    let mut b = DenseMatrix::zeros(n, n.saturating_sub(1));
    for k in 1..n {
        let c = 1.0 / ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            b.set(i, k - 1, c);
        }
        b.set(k, k - 1, -(k as f64) * c);
    }
    b
}

/// `Πᵀ L^{+1/2}`, an `(n-1) × n` matrix mapping `R^n` into coordinates on `1⊥`.
fn whitening(g: &WeightedGraph) -> Result<DenseMatrix> {
    let p = pinv_sqrt(&laplacian(g), DEFAULT_RANK_TOL)?.to_dense();
    Ok(helmert_basis(g.n()).transpose().matmul(&p))
}

fn check_connected(g: &WeightedGraph) -> Result<()> {
    if g.n() < 2 || g.m() == 0 {
        return Err(Error::NoEdges);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected { lambda2: 0.0 });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct EdgeVectorSystem {
    pub n: usize,
    /// `x_e = √w_e Πᵀ L^{+1/2} (e_u - e_v)`, one per edge of the source graph.
    pub vectors: Vec<Vec<f64>>,
    pub edges: Vec<Edge>,
}

impl EdgeVectorSystem {
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    /// `‖Σ_e x_e x_eᵀ - I‖_F`.
    pub fn isotropy_error(&self) -> f64 {
        let mut sum = SymmetricMatrix::zeros(self.dim());
        for x in &self.vectors {
            sum.add_rank_one(1.0, x);
        }
        sum.sub(&SymmetricMatrix::identity(self.dim())).frobenius_norm()
    }
}

pub fn edge_vectors(g: &WeightedGraph) -> Result<EdgeVectorSystem> {
    check_connected(g)?;
    let q = whitening(g)?;
    let vectors = g
        .edges()
        .iter()
        .map(|e| {
            let s = e.w.sqrt();
            (0..q.rows).map(|r| s * (q.get(r, e.u) - q.get(r, e.v))).collect()
        })
        .collect();
    Ok(EdgeVectorSystem {
        n: g.n(),
        vectors,
        edges: g.edges().to_vec(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Verification {
    pub holds: bool,
    /// `λ_max / λ_min` of the pencil `(L(H), L(G))` on `1⊥`.
    pub kappa_measured: f64,
    pub lambda_min_rel: f64,
    pub lambda_max_rel: f64,
}

/// Extreme generalized eigenvalues of `L(H)` against `L(G)` on `1⊥`, and
/// whether `κ <= 1 + ε` up to [`VERIFY_SLACK`]. Uniform rescaling of `H`
/// does not change the outcome.
pub fn verify_sparsifier(g: &WeightedGraph, h: &WeightedGraph, eps: f64) -> Result<Verification> {
    if g.n() != h.n() {
        return Err(Error::LengthMismatch(g.n(), h.n()));
    }
    if let Some(e) = h.edges().iter().find(|e| !g.has_edge(e.u, e.v)) {
        return Err(Error::Precondition(format!(
            "edge {{{}, {}}} of H is not an edge of G",
            e.u, e.v
        )));
    }
    check_connected(g)?;
    check_connected(h)?;
    let q = whitening(g)?;
    let lh = laplacian(h).to_dense();
    let rel = q.matmul(&lh).matmul(&q.transpose()).to_symmetric();
    let spec = eig(&rel, false)?;
    let (lo, hi) = (spec.min(), spec.max());
    if lo <= 0.0 {
        return Err(Error::Disconnected { lambda2: lo });
    }
    let kappa_measured = hi / lo;
    Ok(Verification {
        holds: kappa_measured <= 1.0 + eps + VERIFY_SLACK,
        kappa_measured,
        lambda_min_rel: lo,
        lambda_max_rel: hi,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SparsifierReport {
    pub n: usize,
    pub input_edges: usize,
    pub d: f64,
    /// `⌈dn/2⌉`.
    pub rounds: usize,
    /// Distinct edges of `H`.
    pub edges: usize,
    pub average_degree: f64,
    pub kappa_measured: f64,
    /// `κ_measured - 1`, with `H` rescaled so that `L(G) ⪯ L(H)`.
    pub epsilon_measured: f64,
    /// `κ_d`, when `d > 2`.
    pub kappa_target: Option<f64>,
    /// `((√β+1)/(√β-1))²` for `β = T/(n-1)`, what the barriers guarantee.
    pub barrier_bound: f64,
    /// `(d + 2√(d-1)) / (d - 2√(d-1))`, when `d > 2`.
    pub ramanujan_benchmark: Option<f64>,
    /// Factor `1/λ_min` applied to the raw weights `Σ s_t w_e`.
    pub rescale: f64,
    pub isotropy_error: f64,
    pub min_margin: f64,
    pub barrier_safe: bool,
    #[serde(skip)]
    pub sparsifier: WeightedGraph,
}

fn ramanujan_benchmark(d: f64) -> Option<f64> {
    let r = 2.0 * (d - 1.0).sqrt();
    (d > 2.0).then(|| (d + r) / (d - r))
}

fn build_report(
    g: &WeightedGraph,
    d: f64,
    rounds: usize,
    raw: &BTreeMap<(usize, usize), f64>,
    isotropy_error: f64,
    barrier: Option<(f64, bool, f64)>,
) -> Result<SparsifierReport> {
    let h = WeightedGraph::new(g.n(), raw.iter().map(|(&(u, v), &w)| (u, v, w)))?;
    let ver = verify_sparsifier(g, &h, 0.0)?;
    let rescale = 1.0 / ver.lambda_min_rel;
    let sparsifier = h.scaled(rescale)?;
    let (barrier_bound, barrier_safe, min_margin) = barrier.unwrap_or((1.0, true, 0.0));
    Ok(SparsifierReport {
        n: g.n(),
        input_edges: g.m(),
        d,
        rounds,
        edges: sparsifier.m(),
        average_degree: sparsifier.average_degree(),
        kappa_measured: ver.kappa_measured,
        epsilon_measured: ver.kappa_measured - 1.0,
        kappa_target: kappa(d).ok(),
        barrier_bound,
        ramanujan_benchmark: ramanujan_benchmark(d),
        rescale,
        isotropy_error,
        min_margin,
        barrier_safe,
        sparsifier,
    })
}

/// Runs the barrier player for `⌈dn/2⌉` rounds on the static menu of edge
/// vectors. Each pick adds `s_t w_e` to that edge of `H`; the result is
/// rescaled by `1/λ_min` of the pencil.
pub fn sparsify(g: &WeightedGraph, d: f64) -> Result<SparsifierReport> {
    if !(d > 2.0) {
        return Err(Error::Precondition(format!("sparsify needs d > 2, got {d}")));
    }
    let system = edge_vectors(g)?;
    let isotropy_error = system.isotropy_error();
    if isotropy_error > ISOTROPY_TOL {
        return Err(Error::Precondition(format!(
            "edge vectors not isotropic (error {isotropy_error:e})"
        )));
    }
    let dim = system.dim();
    let rounds = (d * g.n() as f64 / 2.0).ceil() as usize;
    let params = BssParams::new(dim, rounds)?;
    let mut player = BssPlayer::new(params);
    let mut state = GameState::new(dim, rounds)?;
    let menu = VectorMenu {
        vectors: system.vectors,
    };
    let mut raw: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut min_margin = f64::INFINITY;
    for _ in 0..rounds {
        let choice = player.choose(&state, &menu)?;
        min_margin = min_margin.min(choice.margin.unwrap_or(f64::INFINITY));
        let e = system.edges[choice.index];
        *raw.entry((e.u, e.v)).or_insert(0.0) += choice.scaling * e.w;
        state.apply(&menu.vectors[choice.index], choice.index, choice.scaling)?;
        player.observe(&state)?;
    }
    let safe = player
        .barrier_log()
        .is_some_and(|log| log.iter().all(|r| r.inside && r.potentials_nonincreasing));
    build_report(
        g,
        d,
        rounds,
        &raw,
        isotropy_error,
        Some((params.final_ratio(), safe, min_margin)),
    )
}

/// Baseline that takes every edge once with `s = 1`, giving `H = G`.
pub fn every_edge_sparsifier(g: &WeightedGraph) -> Result<SparsifierReport> {
    let system = edge_vectors(g)?;
    let raw = g.edges().iter().map(|e| ((e.u, e.v), e.w)).collect();
    build_report(g, g.average_degree(), g.m(), &raw, system.isotropy_error(), None)
}

#[cfg(test)]
mod tests;
