//! Fixed-seed invariant suites. Each one checks a single property at desk
//! scale and reports a one-line summary plus a few metrics; [`validate_suite`]
//! runs all of them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{laguerre_summary, worker_pool, Check, Experiment, ExperimentSpec, Report, RunRecord};
use crate::certificates::{
    ab_certificate, best_root_certificate, claim_heavy_edge, claim_low_weighted_degree, walk_stats, WalkMode,
};
use crate::error::{Error, Result};
use crate::game::{charpoly_trace_check, laguerre_witness, play_game, PlayerKind};
use crate::graph::{
    gen_complete, gen_cycle, gen_hypercube, gen_path, gen_petersen, gen_random_regular, gen_star, WeightedGraph,
};
use crate::poly::{kappa, laguerre_poly, majorization, product_transform, real_roots, Arithmetic};
use crate::spectral::{eig, laplacian};
use crate::sparsify::{sparsify, verify_sparsifier};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub metrics: BTreeMap<String, f64>,
}

struct Outcome {
    passed: bool,
    summary: String,
    metrics: BTreeMap<String, f64>,
}

impl Outcome {
    fn new(passed: bool, summary: String, metrics: &[(&str, f64)]) -> Self {
        Self {
            passed,
            summary,
            metrics: metrics.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

type SuiteFn = fn() -> Result<Outcome>;

const SUITES: [(&str, SuiteFn); 11] = [
    ("kappa-values", kappa_values),
    ("barrier-safety", barrier_safety),
    ("laguerre-witness", laguerre_witness_suite),
    ("char-poly-invariance", charpoly_invariance),
    ("marchenko-pastur-edges", mp_edges_suite),
    ("certificate-soundness", certificate_soundness),
    ("certificate-strength", certificate_strength),
    ("degree-and-edge-claims", claims),
    ("sparsifier", sparsifier),
    ("walk-propositions", walk_propositions),
    ("majorization", majorization_suite),
];

/// `(id, name)` for every suite, ids starting at 1.
pub fn suite_names() -> Vec<(usize, &'static str)> {
    SUITES.iter().enumerate().map(|(i, (name, _))| (i + 1, *name)).collect()
}

/// Runs suite `id` (1-based). Errors are reported as failures.
pub fn run_suite(id: usize) -> SuiteOutcome {
    let (name, f) = SUITES[id - 1];
    let o = f().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}"), &[]));
    SuiteOutcome {
        id,
        name,
        passed: o.passed,
        summary: o.summary,
        metrics: o.metrics,
    }
}

/// Every suite, one record and one check per suite.
pub fn validate_suite() -> Report {
    let run_all = || (1..=SUITES.len()).into_par_iter().map(run_suite).collect::<Vec<_>>();
    let outcomes = match worker_pool() {
        Ok(pool) => pool.install(run_all),
        Err(_) => run_all(),
    };
    let mut records = Vec::new();
    let mut checks = Vec::new();
    for o in outcomes {
        let mut rec = RunRecord::new(o.id, 0);
        rec.metrics = o.metrics.iter().map(|(k, v)| (format!("{}.{k}", o.name), *v)).collect();
        rec.check(o.name, o.passed);
        rec.detail = serde_json::Value::String(o.summary.clone());
        records.push(rec);
        checks.push(Check {
            name: o.name.to_string(),
            passed: o.passed,
            detail: o.summary,
        });
    }
    Report::assemble(ExperimentSpec::new(Experiment::Validate, 0), records, checks)
}

fn kappa_values() -> Result<Outcome> {
    let (k8, k18) = (kappa(8.0)?, kappa(18.0)?);
    let ok = (k8 - 9.0).abs() <= 1e-12 && (k18 - 4.0).abs() <= 1e-12;
    Ok(Outcome::new(
        ok,
        format!("kappa(8) = {k8}, kappa(18) = {k18}"),
        &[("kappa_8", k8), ("kappa_18", k18)],
    ))
}

fn barrier_safety() -> Result<Outcome> {
    let bound = kappa(8.0)? + 1e-6;
    let mut ok = true;
    let mut parts = Vec::new();
    let mut metrics = Vec::new();
    for n in [8usize, 16, 32] {
        let t = 4 * n;
        let r = play_game(&PlayerKind::Bss, n, t)?;
        let c = r.condition_or_inf();
        let safe = r.barrier_safe() == Some(true);
        ok &= c <= bound && safe;
        parts.push(format!("n={n}: {c:.4}{}", if safe { "" } else { " (barrier violated)" }));
        metrics.push((n, c));
    }
    let names = ["condition_n8", "condition_n16", "condition_n32"];
    let m: Vec<(&str, f64)> = names.iter().zip(&metrics).map(|(k, (_, c))| (*k, *c)).collect();
    Ok(Outcome::new(ok, format!("bss condition vs 9: {}", parts.join(", ")), &m))
}

fn laguerre_witness_suite() -> Result<Outcome> {
    let mut players = vec![PlayerKind::Uniform, PlayerKind::Greedy];
    players.extend((1..=5).map(|seed| PlayerKind::Random { seed }));
    let mut runs = 0;
    let mut failures = Vec::new();
    let mut min_gap = f64::INFINITY;
    for n in [4usize, 8, 16] {
        for p in &players {
            let r = play_game(p, n, 4 * n)?;
            let w = laguerre_witness(&r)?;
            runs += 1;
            min_gap = min_gap.min(r.condition_or_inf() - w.laguerre_ratio);
            if !w.holds {
                failures.push(format!("{p} n={n}"));
            }
        }
    }
    Ok(Outcome::new(
        failures.is_empty(),
        format!(
            "{runs} games, min(condition - laguerre ratio) = {min_gap:.3e}{}",
            if failures.is_empty() { String::new() } else { format!(", failed: {}", failures.join("; ")) }
        ),
        &[("runs", runs as f64), ("min_gap", min_gap)],
    ))
}

fn charpoly_invariance() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for i in 0..50u64 {
        let n = [2usize, 4, 8][(i % 3) as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        let (player, t) = match (i / 3) % 5 {
            0 => (PlayerKind::Bss, 4 * n),
            1 => (PlayerKind::Uniform, 2 * n),
            2 => (PlayerKind::Greedy, 3 * n),
            3 => (PlayerKind::Random { seed: i }, 4 * n),
            _ => {
                let t = rng.gen_range(n..=n + 12);
                let script = (0..t).map(|_| (rng.gen_range(0..n), rng.gen_range(0.0..4.0))).collect();
                (PlayerKind::Scripted(script), t)
            }
        };
        let c = charpoly_trace_check(&play_game(&player, n, t)?)?;
        worst = worst.max(c.max_error);
        failures += usize::from(!c.passes);
    }
    Ok(Outcome::new(
        failures == 0,
        format!("50 runs, max coefficient relative error {worst:.2e} (tolerance 1e-8)"),
        &[("max_error", worst)],
    ))
}

fn mp_edges_suite() -> Result<Outcome> {
    let a = laguerre_summary(64, 256, 64.0)?;
    let b = laguerre_summary(128, 512, 128.0)?;
    let within = |l: &super::LaguerreSummary, tol: f64| l.rel_error_min <= tol && l.rel_error_max <= tol;
    let converging = b.rel_error_min <= a.rel_error_min && b.rel_error_max <= a.rel_error_max;
    Ok(Outcome::new(
        within(&a, 0.15) && within(&b, 0.10) && converging,
        format!(
            "n=64: edges {:.4}/{:.4} vs {:.4}/{:.4} (errors {:.3}, {:.3}); n=128: errors {:.3}, {:.3}; roots of laguerre_poly(n, T, S/n)",
            a.root_min, a.root_max, a.mp_min, a.mp_max, a.rel_error_min, a.rel_error_max, b.rel_error_min,
            b.rel_error_max
        ),
        &[
            ("rel_error_min_64", a.rel_error_min),
            ("rel_error_max_64", a.rel_error_max),
            ("rel_error_min_128", b.rel_error_min),
            ("rel_error_max_128", b.rel_error_max),
        ],
    ))
}

/// Generator family `kind` with a size drawn from `seed`.
pub fn family_graph(kind: usize, seed: u64) -> Result<WeightedGraph> {
    let s = seed as usize;
    match kind % 7 {
        0 => gen_cycle(5 + s % 20),
        1 => gen_path(3 + s % 20),
        2 => Ok(gen_petersen()),
        3 => gen_hypercube(2 + (s % 4) as u32),
        4 => gen_star(3 + s % 10),
        5 => gen_random_regular(30 + 2 * (s % 20), 3, 5, seed),
        _ => gen_random_regular(24 + 2 * (s % 10), 4, 4, seed),
    }
}

pub const SOUNDNESS_INSTANCES: usize = 252;

fn certificate_soundness() -> Result<Outcome> {
    let results: Vec<Result<(bool, f64)>> = (0..SOUNDNESS_INSTANCES)
        .into_par_iter()
        .map(|i| {
            let seed = 1000 + i as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = family_graph(i, seed)?
                .map_weights(|_| rng.gen_range(0.05..1.0))?
                .normalize_max_weighted_degree()?;
            let kmax = (0..4).rev().find(|&k| g.girth().exceeds(2 * k + 1)).unwrap_or(0);
            for _ in 0..20 {
                let k = rng.gen_range(0..=kmax);
                let r = rng.gen_range(0..g.n());
                match ab_certificate(&g, r, k) {
                    Ok(c) => {
                        let slack = c.eigensolver_ratio - c.certified_lower_bound;
                        return Ok((slack >= -1e-9, slack));
                    }
                    // The ball can cover a whole star or path, making f constant.
                    Err(Error::Precondition(msg)) if msg.contains("constant") => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::Precondition(format!("instance {i}: no admissible (r, k) found")))
        })
        .collect();
    let mut evaluated = 0;
    let mut unsound = 0;
    let mut min_slack = f64::INFINITY;
    for r in results {
        let (ok, slack) = r?;
        evaluated += 1;
        unsound += usize::from(!ok);
        min_slack = min_slack.min(slack);
    }
    Ok(Outcome::new(
        evaluated >= 200 && unsound == 0,
        format!("{evaluated} graphs, {unsound} unsound, min(ratio - certified) = {min_slack:.3e}"),
        &[("instances", evaluated as f64), ("min_slack", min_slack)],
    ))
}

pub const STRENGTH_SEED: u64 = 7;

fn certificate_strength() -> Result<Outcome> {
    let g = gen_random_regular(2000, 8, 6, STRENGTH_SEED)?.normalize_max_weighted_degree()?;
    let k = 2;
    let best = best_root_certificate(&g, k)?;
    let threshold = 1.0 + 8.0 / (3.0 * 8f64.sqrt()) - 0.02;
    let c = &best.certificate;
    Ok(Outcome::new(
        c.certified_lower_bound >= threshold && c.certified_lower_bound <= c.eigensolver_ratio + 1e-9,
        format!(
            "certified {:.4} >= {threshold:.4} (root {}, eigensolver ratio {:.4})",
            c.certified_lower_bound, c.root, c.eigensolver_ratio
        ),
        &[
            ("certified", c.certified_lower_bound),
            ("threshold", threshold),
            ("eigensolver_ratio", c.eigensolver_ratio),
        ],
    ))
}

/// A 4-regular graph whose vertex 0 has its edges scaled by `0.1`, normalized.
fn low_degree_instance(seed: u64) -> Result<WeightedGraph> {
    gen_random_regular(40, 4, 3, seed)?
        .map_weights(|e| if e.u == 0 || e.v == 0 { 0.1 * e.w } else { e.w })?
        .normalize_max_weighted_degree()
}

/// Even cycle with weights alternating `a`, `1 - a`, so every weighted degree is 1.
fn alternating_cycle(n: usize, a: f64) -> Result<WeightedGraph> {
    WeightedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n, if i % 2 == 0 { a } else { 1.0 - a })))
}

fn claims() -> Result<Outcome> {
    const TOL: f64 = 1e-8;
    let mut ok = true;
    let mut cases = 0;
    let mut worst_l2 = f64::NEG_INFINITY;
    for (i, d) in [25.0f64, 64.0, 100.0].into_iter().enumerate() {
        let g = low_degree_instance(i as u64 + 1)?;
        let c = claim_low_weighted_degree(&g, d)?
            .ok_or_else(|| Error::Precondition("low-degree instance not detected".into()))?;
        let spec = eig(&laplacian(&g), false)?;
        ok &= c.lambda2_upper <= c.lambda2_bound + TOL
            && spec.values[1] <= c.lambda2_upper + TOL
            && spec.max() >= c.lambdan_lower - TOL;
        worst_l2 = worst_l2.max(spec.values[1] - c.lambda2_upper);
        cases += 1;

        for a in [0.9, 0.6] {
            if a <= 4.0 / d.sqrt() {
                continue;
            }
            let g = alternating_cycle(20, a)?;
            let c = claim_heavy_edge(&g, d)?
                .ok_or_else(|| Error::Precondition("heavy-edge instance not detected".into()))?;
            let top = eig(&laplacian(&g), false)?.max();
            ok &= c.meets_target() && top >= c.quotient - TOL;
            cases += 1;
        }
    }
    // Controls: a uniform regular graph triggers neither claim.
    let regular = gen_random_regular(40, 4, 3, 9)?.normalize_max_weighted_degree()?;
    ok &= claim_low_weighted_degree(&regular, 25.0)?.is_none() && claim_heavy_edge(&regular, 25.0)?.is_none();
    Ok(Outcome::new(
        ok,
        format!("{cases} violating instances certified, max(lambda_2 - witness) = {worst_l2:.3e}"),
        &[("instances", cases as f64)],
    ))
}

fn sparsifier() -> Result<Outcome> {
    let g = gen_complete(32)?;
    let r = sparsify(&g, 8.0)?;
    let v = verify_sparsifier(&g, &r.sparsifier, 8.0)?;
    let bench = r.ramanujan_benchmark.unwrap_or(f64::NAN);
    Ok(Outcome::new(
        r.edges <= 128 && r.kappa_measured <= 9.0 + 1e-6 && v.holds,
        format!(
            "K_32, d=8: {} edges, kappa {:.4} (bound 9, Ramanujan benchmark {bench:.4})",
            r.edges, r.kappa_measured
        ),
        &[("edges", r.edges as f64), ("kappa_measured", r.kappa_measured), ("ramanujan_benchmark", bench)],
    ))
}

fn walk_propositions() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, d, k, seed) in [(62usize, 30usize, 4usize, 2u64), (52, 26, 3, 3), (80, 36, 3, 4)] {
        let g = gen_random_regular(n, d, 3, seed)?.normalize_max_weighted_degree()?;
        let s = walk_stats(&g, k, WalkMode::Exact)?;
        let target = k as f64 / (d as f64).sqrt();
        let exact = (s.sqrt_weight_sum.mean - target).abs() <= 1e-12 * target;
        let prop1 = s.sqrt_weight_sum.mean >= s.sqrt_weight_lower_bound;
        let bound = s.backtrack_bound.unwrap_or(f64::NAN);
        let prop2 = s.backtrack_probability.iter().all(|p| p.mean <= bound);
        ok &= exact && prop1 && prop2;
        let worst = s.backtrack_probability.iter().map(|p| p.mean).fold(0.0, f64::max);
        parts.push(format!("d={d}: E={:.6} (k/sqrt d {target:.6}), backtrack {worst:.4} <= {bound:.4}", s.sqrt_weight_sum.mean));
    }
    Ok(Outcome::new(ok, parts.join("; "), &[]))
}

pub const MAJORIZATION_INSTANCES: usize = 500;

fn majorization_suite() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..MAJORIZATION_INSTANCES {
        let n = rng.gen_range(1..=8usize);
        let t = rng.gen_range(n..=20usize);
        let mut s: Vec<f64> = (0..t)
            .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..4.0) })
            .collect();
        if s.iter().all(|&x| x == 0.0) {
            s[0] = 1.0;
        }
        let total = s.iter().sum::<f64>() / n as f64;
        let p = product_transform(n, &s, Arithmetic::Exact)?.poly;
        let m = majorization(&real_roots(&p)?, &real_roots(&laguerre_poly(n, t, total)?)?)?;
        worst = worst.min(m.min_prefix_slack);
        failures += usize::from(m.min_prefix_slack < -1e-8 || m.total_gap.abs() > m.tolerance);
    }
    Ok(Outcome::new(
        failures == 0,
        format!("{MAJORIZATION_INSTANCES} instances, {failures} failures, min prefix slack {worst:.3e}"),
        &[("min_prefix_slack", worst)],
    ))
}
