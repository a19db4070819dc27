//! Experiment runner: a spec names one experiment kind, its parameters, a
//! seed and a repetition count; [`run`] validates it, runs the repetitions
//! (in parallel, merged back in repetition order) and assembles a [`Report`].
//!
//! Every repetition draws from its own ChaCha8 stream of the spec seed, so a
//! record depends only on `(spec, repetition)`.

pub mod suites;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::{
    ab_certificate, best_root_certificate, walk_stats, CertificateReport, WalkMode,
};
use crate::error::{Error, Result};
use crate::game::{charpoly_trace_check, laguerre_witness, play_game, PlayerKind, EXACT_TRACKING_MAX_N};
use crate::graph::{
    gen_complete, gen_cycle, gen_hypercube, gen_path, gen_petersen, gen_random_regular, gen_star,
    load_graph, Girth, WeightedGraph,
};
use crate::poly::{kappa, laguerre_poly, laguerre_roots_jacobi, mp_edges, real_roots};
use crate::sparsify::{sparsify, verify_sparsifier};

/// Worker-count override for the repetition pool.
pub const WORKERS_ENV: &str = "SPARSEBOUND_WORKERS";
pub const SOUNDNESS_TOL: f64 = 1e-9;
pub const CONDITION_TOL: f64 = 1e-6;

/// Seed of repetition `rep`: first word of stream `rep` of `ChaCha8(seed)`.
pub fn repetition_seed(seed: u64, rep: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSource {
    File { path: PathBuf },
    Complete { n: usize },
    Cycle { n: usize },
    Path { n: usize },
    Star { n: usize },
    Hypercube { dim: u32 },
    Petersen,
    RandomRegular { n: usize, d: usize, min_girth: usize },
}

impl GraphSource {
    /// Builds the graph; only `RandomRegular` uses `seed`.
    pub fn build(&self, seed: u64) -> Result<WeightedGraph> {
        match *self {
            GraphSource::File { ref path } => load_graph(path),
            GraphSource::Complete { n } => gen_complete(n),
            GraphSource::Cycle { n } => gen_cycle(n),
            GraphSource::Path { n } => gen_path(n),
            GraphSource::Star { n } => gen_star(n),
            GraphSource::Hypercube { dim } => gen_hypercube(dim),
            GraphSource::Petersen => Ok(gen_petersen()),
            GraphSource::RandomRegular { n, d, min_girth } => gen_random_regular(n, d, min_girth, seed),
        }
    }

    /// Girth known without building the graph (a lower bound for random regular).
    fn known_girth(&self) -> Option<Girth> {
        match *self {
            GraphSource::Complete { n } if n >= 3 => Some(Girth::Finite(3)),
            GraphSource::Cycle { n } => Some(Girth::Finite(n)),
            GraphSource::Path { .. } | GraphSource::Star { .. } => Some(Girth::Infinite),
            GraphSource::Hypercube { dim } if dim >= 2 => Some(Girth::Finite(4)),
            GraphSource::Petersen => Some(Girth::Finite(5)),
            GraphSource::RandomRegular { min_girth, .. } => Some(Girth::Finite(min_girth)),
            _ => None,
        }
    }

    fn known_n(&self) -> Option<usize> {
        match *self {
            GraphSource::Complete { n }
            | GraphSource::Cycle { n }
            | GraphSource::Path { n }
            | GraphSource::Star { n }
            | GraphSource::RandomRegular { n, .. } => Some(n),
            GraphSource::Hypercube { dim } => 1usize.checked_shl(dim),
            GraphSource::Petersen => Some(10),
            GraphSource::File { .. } => None,
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            GraphSource::File { ref path } if !path.exists() => Err(Error::Precondition(format!(
                "input graph {} does not exist",
                path.display()
            ))),
            GraphSource::RandomRegular { n, d, min_girth } => {
                if d >= n || (n * d) % 2 == 1 || min_girth < 3 {
                    Err(Error::Precondition(format!(
                        "random-regular needs d < n, nd even and girth >= 3 (n={n}, d={d}, girth={min_girth})"
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::File { path } => write!(f, "{}", path.display()),
            GraphSource::Complete { n } => write!(f, "complete:{n}"),
            GraphSource::Cycle { n } => write!(f, "cycle:{n}"),
            GraphSource::Path { n } => write!(f, "path:{n}"),
            GraphSource::Star { n } => write!(f, "star:{n}"),
            GraphSource::Hypercube { dim } => write!(f, "hypercube:{dim}"),
            GraphSource::Petersen => write!(f, "petersen"),
            GraphSource::RandomRegular { n, d, min_girth } => write!(f, "random-regular:{n},{d},{min_girth}"),
        }
    }
}

/// Generator syntax: `complete:N`, `cycle:N`, `path:N`, `star:N`,
/// `hypercube:DIM`, `petersen`, `random-regular:N,D,GIRTH`.
impl FromStr for GraphSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<usize> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse().map_err(|_| Error::Precondition(format!("bad generator argument {a:?}"))))
                .collect::<Result<_>>()?
        };
        let want = |k: usize| {
            if nums.len() == k {
                Ok(())
            } else {
                Err(Error::Precondition(format!("generator {name} takes {k} argument(s), got {s:?}")))
            }
        };
        Ok(match name {
            "complete" => want(1).map(|_| GraphSource::Complete { n: nums[0] })?,
            "cycle" => want(1).map(|_| GraphSource::Cycle { n: nums[0] })?,
            "path" => want(1).map(|_| GraphSource::Path { n: nums[0] })?,
            "star" => want(1).map(|_| GraphSource::Star { n: nums[0] })?,
            "hypercube" => want(1).map(|_| GraphSource::Hypercube { dim: nums[0] as u32 })?,
            "petersen" => want(0).map(|_| GraphSource::Petersen)?,
            "random-regular" => want(3).map(|_| GraphSource::RandomRegular {
                n: nums[0],
                d: nums[1],
                min_girth: nums[2],
            })?,
            _ => return Err(Error::Precondition(format!("unknown generator {name:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Weights {
    /// Keep the weights of the source.
    #[default]
    Keep,
    /// Independent uniform draws in `[lo, hi)` per edge.
    Random { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum Experiment {
    AbCertify {
        graph: GraphSource,
        #[serde(default)]
        weights: Weights,
        /// Scale to max weighted degree 1 first.
        normalize: bool,
        k: usize,
        /// Fixed root, or the best root when absent.
        root: Option<usize>,
        walk: Option<WalkMode>,
    },
    Game {
        n: usize,
        t: usize,
        /// `bss`, `uniform`, `greedy`, `random` (seeded per repetition) or `random:<seed>`.
        player: String,
    },
    Sparsify {
        graph: GraphSource,
        #[serde(default)]
        weights: Weights,
        d: f64,
    },
    Laguerre {
        n: usize,
        t: usize,
        /// Total trace `S`; the polynomial is `laguerre_poly(n, T, S/n)`.
        s: f64,
    },
    Validate,
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::AbCertify { .. } => "ab-certify",
            Experiment::Game { .. } => "game",
            Experiment::Sparsify { .. } => "sparsify",
            Experiment::Laguerre { .. } => "laguerre",
            Experiment::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub seed: u64,
    pub repetitions: usize,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentSpec {
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        Self {
            experiment,
            seed,
            repetitions: 1,
            outputs: Outputs::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Checks everything that can be checked without running the experiment.
    /// File-backed certificate specs are loaded here so the girth can be checked.
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Precondition("repetitions must be >= 1".into()));
        }
        match &self.experiment {
            Experiment::AbCertify { graph, k, root, weights, .. } => {
                graph.check()?;
                check_weights(weights)?;
                let (girth, n) = match graph {
                    GraphSource::File { .. } => {
                        let g = graph.build(0)?;
                        (Some(g.girth()), Some(g.n()))
                    }
                    _ => (graph.known_girth(), graph.known_n()),
                };
                if let Some(girth) = girth {
                    if !girth.exceeds(2 * k + 1) {
                        return Err(Error::Precondition(format!(
                            "k = {k} needs girth > {}, but {graph} has girth {girth:?}",
                            2 * k + 1
                        )));
                    }
                }
                if let (Some(r), Some(n)) = (root, n) {
                    if *r >= n {
                        return Err(Error::VertexOutOfRange { vertex: *r, n });
                    }
                }
            }
            Experiment::Game { n, t, player } => {
                if *n == 0 || !n.is_power_of_two() {
                    return Err(Error::Precondition(format!("game dimension {n} is not a power of 2")));
                }
                if *t == 0 {
                    return Err(Error::Precondition("game needs at least one round".into()));
                }
                let kind = parse_player(player, 0)?;
                if kind == PlayerKind::Bss && *t <= *n {
                    return Err(Error::Precondition(format!("bss needs T > n, got n={n}, T={t}")));
                }
            }
            Experiment::Sparsify { graph, d, weights } => {
                graph.check()?;
                check_weights(weights)?;
                if !(*d > 2.0) {
                    return Err(Error::Precondition(format!("sparsify needs d > 2, got {d}")));
                }
            }
            Experiment::Laguerre { n, t, s } => {
                if *n == 0 || t < n {
                    return Err(Error::Precondition(format!("need T >= n >= 1, got n={n}, T={t}")));
                }
                if !(*s > 0.0 && s.is_finite()) {
                    return Err(Error::Precondition(format!("need S > 0, got {s}")));
                }
            }
            Experiment::Validate => {}
        }
        Ok(())
    }
}

fn check_weights(w: &Weights) -> Result<()> {
    match *w {
        Weights::Random { lo, hi } if !(lo > 0.0 && hi > lo && hi.is_finite()) => {
            Err(Error::Precondition(format!("random weights need 0 < lo < hi, got [{lo}, {hi})")))
        }
        _ => Ok(()),
    }
}

fn parse_player(name: &str, seed: u64) -> Result<PlayerKind> {
    if name == "random" {
        return Ok(PlayerKind::Random { seed });
    }
    name.parse::<PlayerKind>()
        .map_err(|e| Error::Precondition(format!("unknown player {name:?}: {e}")))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub repetition: usize,
    pub seed: u64,
    pub passed: bool,
    pub error: Option<String>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, bool>,
    pub detail: serde_json::Value,
    /// Sparsifier produced by this run, if any.
    #[serde(skip)]
    pub graph: Option<WeightedGraph>,
}

impl RunRecord {
    fn new(repetition: usize, seed: u64) -> Self {
        Self {
            repetition,
            seed,
            passed: true,
            error: None,
            metrics: BTreeMap::new(),
            checks: BTreeMap::new(),
            detail: serde_json::Value::Null,
            graph: None,
        }
    }

    fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    fn check(&mut self, key: &str, ok: bool) {
        self.checks.insert(key.to_string(), ok);
        self.passed &= ok;
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Summary {
    /// Finite values only.
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Summary {
    fn of(values: impl Iterator<Item = f64>) -> Option<Self> {
        let v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return None;
        }
        Some(Summary {
            count: v.len(),
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: v.iter().sum::<f64>() / v.len() as f64,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportHeader {
    pub tool: &'static str,
    pub version: &'static str,
    /// Seconds since the Unix epoch; the only non-reproducible field.
    pub created_unix: u64,
}

impl ReportHeader {
    fn now() -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub header: ReportHeader,
    pub spec: ExperimentSpec,
    pub records: Vec<RunRecord>,
    pub summary: BTreeMap<String, Summary>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    fn assemble(spec: ExperimentSpec, records: Vec<RunRecord>, mut checks: Vec<Check>) -> Self {
        let keys: BTreeSet<&String> = records.iter().flat_map(|r| r.metrics.keys()).collect();
        let summary = keys
            .into_iter()
            .filter_map(|k| {
                Summary::of(records.iter().filter_map(|r| r.metrics.get(k).copied())).map(|s| (k.clone(), s))
            })
            .collect();
        let failed: Vec<usize> = records.iter().filter(|r| !r.passed).map(|r| r.repetition).collect();
        checks.push(Check {
            name: "all-runs".into(),
            passed: failed.is_empty(),
            detail: if failed.is_empty() {
                format!("{} run(s) passed", records.len())
            } else {
                format!("failed repetitions {failed:?}")
            },
        });
        let passed = checks.iter().all(|c| c.passed);
        Report {
            header: ReportHeader::now(),
            spec,
            records,
            summary,
            checks,
            passed,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per run: repetition, seed, passed, error, then the sorted union
    /// of metric and check names. Missing cells are empty.
    pub fn to_csv(&self) -> Result<String> {
        let metrics: BTreeSet<&String> = self.records.iter().flat_map(|r| r.metrics.keys()).collect();
        let checks: BTreeSet<&String> = self.records.iter().flat_map(|r| r.checks.keys()).collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head = vec!["repetition".to_string(), "seed".into(), "passed".into(), "error".into()];
        head.extend(metrics.iter().map(|k| k.to_string()));
        head.extend(checks.iter().map(|k| format!("check:{k}")));
        w.write_record(&head)?;
        for r in &self.records {
            let mut row = vec![
                r.repetition.to_string(),
                r.seed.to_string(),
                r.passed.to_string(),
                r.error.clone().unwrap_or_default(),
            ];
            row.extend(metrics.iter().map(|k| r.metrics.get(*k).map_or(String::new(), f64::to_string)));
            row.extend(checks.iter().map(|k| r.checks.get(*k).map_or(String::new(), bool::to_string)));
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes the JSON and CSV files named in the spec.
    pub fn write_outputs(&self) -> Result<()> {
        if let Some(p) = &self.spec.outputs.json {
            write_file(p, &self.to_json()?)?;
        }
        if let Some(p) = &self.spec.outputs.csv {
            write_file(p, &self.to_csv()?)?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Thread pool sized by [`WORKERS_ENV`], or rayon's default.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Precondition(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| Error::Precondition(format!("thread pool: {e}")))
}

/// Validates `spec`, runs every repetition and assembles the report. Failing
/// repetitions keep their error (with the run's parameters) in the record and
/// the remaining ones still run. Outputs named in the spec are written.
pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    let report = if spec.experiment == Experiment::Validate {
        let mut r = suites::validate_suite();
        r.spec = spec.clone();
        r
    } else {
        let pool = worker_pool()?;
        let records: Vec<RunRecord> = pool.install(|| {
            (0..spec.repetitions)
                .into_par_iter()
                .map(|rep| run_one(&spec.experiment, rep, repetition_seed(spec.seed, rep)))
                .collect()
        });
        Report::assemble(spec.clone(), records, Vec::new())
    };
    report.write_outputs()?;
    Ok(report)
}

fn run_one(exp: &Experiment, rep: usize, seed: u64) -> RunRecord {
    let mut rec = RunRecord::new(rep, seed);
    let outcome = match exp {
        Experiment::AbCertify { graph, weights, normalize, k, root, walk } => {
            run_certificate(&mut rec, graph, *weights, *normalize, *k, *root, *walk)
        }
        Experiment::Game { n, t, player } => run_game(&mut rec, *n, *t, player),
        Experiment::Sparsify { graph, weights, d } => run_sparsify(&mut rec, graph, *weights, *d),
        Experiment::Laguerre { n, t, s } => run_laguerre(&mut rec, *n, *t, *s),
        Experiment::Validate => Ok(()),
    };
    if let Err(e) = outcome {
        rec.passed = false;
        rec.error = Some(format!(
            "{e} [{} repetition {rep}, seed {seed}, {}]",
            exp.kind(),
            serde_json::to_string(exp).unwrap_or_default()
        ));
    }
    rec
}

fn prepare_graph(source: &GraphSource, weights: Weights, normalize: bool, seed: u64) -> Result<WeightedGraph> {
    let mut g = source.build(seed)?;
    if let Weights::Random { lo, hi } = weights {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        g = g.map_weights(|_| rng.gen_range(lo..hi))?;
    }
    if normalize {
        g = g.normalize_max_weighted_degree()?;
    }
    Ok(g)
}

fn run_certificate(
    rec: &mut RunRecord,
    source: &GraphSource,
    weights: Weights,
    normalize: bool,
    k: usize,
    root: Option<usize>,
    walk: Option<WalkMode>,
) -> Result<()> {
    let g = prepare_graph(source, weights, normalize, rec.seed)?;
    let d = g.average_degree();
    rec.metric("n", g.n() as f64);
    rec.metric("m", g.m() as f64);
    rec.metric("k", k as f64);
    rec.metric("average_degree", d);
    let cert = match root {
        Some(r) => ab_certificate(&g, r, k)?,
        None => {
            let best = best_root_certificate(&g, k)?;
            rec.metric("pi_average_fwf", best.pi_average_fwf);
            rec.metric("fwf_target", best.fwf_target);
            rec.metric("roots_evaluated", best.roots_evaluated as f64);
            best.certificate
        }
    };
    let ws = walk.map(|m| walk_stats(&g, k, m)).transpose()?;
    rec.metric("root", cert.root as f64);
    rec.metric("certified_lower_bound", cert.certified_lower_bound);
    rec.metric("eigensolver_ratio", cert.eigensolver_ratio);
    rec.metric("fwf", cert.f_w_f);
    rec.metric("asymptotic_target", 1.0 + 4.0 * k as f64 / ((k + 1) as f64 * d.sqrt()));
    rec.check("sound", cert.certified_lower_bound <= cert.eigensolver_ratio + SOUNDNESS_TOL);
    rec.detail = serde_json::to_value(CertificateReport::new(&cert, ws))?;
    Ok(())
}

fn run_game(rec: &mut RunRecord, n: usize, t: usize, player: &str) -> Result<()> {
    let kind = parse_player(player, rec.seed)?;
    let r = play_game(&kind, n, t)?;
    rec.metric("n", n as f64);
    rec.metric("t", t as f64);
    rec.metric("condition", r.condition_or_inf());
    rec.metric("lambda_min", r.spectrum[0]);
    rec.metric("lambda_max", r.spectrum[n - 1]);
    rec.metric("s_total", r.s_total);
    rec.metric("max_isotropy_error", r.max_isotropy_error);
    if let Some(m) = r.margins.iter().flatten().copied().reduce(f64::min) {
        rec.metric("min_margin", m);
    }
    if let Some(b) = r.barrier_bound {
        rec.metric("barrier_bound", b);
        rec.check("within_barrier_bound", r.condition_or_inf() <= b + CONDITION_TOL);
    }
    if let Some(safe) = r.barrier_safe() {
        rec.check("barrier_safe", safe);
    }
    if n <= EXACT_TRACKING_MAX_N {
        let c = charpoly_trace_check(&r)?;
        rec.metric("charpoly_error", c.max_error);
        rec.check("charpoly", c.passes);
    }
    if t >= n && r.s_total > 0.0 {
        let w = laguerre_witness(&r)?;
        rec.metric("laguerre_ratio", w.laguerre_ratio);
        rec.check("laguerre_witness", w.holds);
        rec.check("majorization", w.majorization.holds);
    }
    rec.detail = serde_json::to_value(&r)?;
    Ok(())
}

fn run_sparsify(rec: &mut RunRecord, source: &GraphSource, weights: Weights, d: f64) -> Result<()> {
    let g = prepare_graph(source, weights, false, rec.seed)?;
    let report = sparsify(&g, d)?;
    let eps = kappa(d)? - 1.0;
    let ver = verify_sparsifier(&g, &report.sparsifier, eps)?;
    rec.metric("n", report.n as f64);
    rec.metric("input_edges", report.input_edges as f64);
    rec.metric("edges", report.edges as f64);
    rec.metric("kappa_measured", report.kappa_measured);
    rec.metric("barrier_bound", report.barrier_bound);
    if let Some(b) = report.ramanujan_benchmark {
        rec.metric("ramanujan_benchmark", b);
    }
    rec.metric("kappa_target", eps + 1.0);
    rec.check("edge_budget", report.edges <= report.rounds);
    rec.check("barrier_safe", report.barrier_safe);
    rec.check("verified", ver.holds);
    rec.detail = serde_json::to_value(&report)?;
    rec.graph = Some(report.sparsifier);
    Ok(())
}

/// Relative deviation `|x - y| / |y|`.
fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

#[derive(Debug, Clone, Serialize)]
pub struct LaguerreSummary {
    pub n: usize,
    pub t: usize,
    /// Total trace; the polynomial is `laguerre_poly(n, T, S/n)`.
    pub s: f64,
    pub root_min: f64,
    pub root_max: f64,
    pub mp_min: f64,
    pub mp_max: f64,
    pub rel_error_min: f64,
    pub rel_error_max: f64,
    /// Largest root deviation from the Jacobi-matrix eigenvalues, relative to `root_max`.
    pub jacobi_deviation: f64,
}

pub fn laguerre_summary(n: usize, t: usize, s: f64) -> Result<LaguerreSummary> {
    let roots = real_roots(&laguerre_poly(n, t, s / n as f64)?)?;
    let jac = laguerre_roots_jacobi(n, t, s / n as f64)?;
    let mp = mp_edges(n, t, s)?;
    let jacobi_deviation = roots
        .as_slice()
        .iter()
        .zip(jac.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / roots.max();
    Ok(LaguerreSummary {
        n,
        t,
        s,
        root_min: roots.min(),
        root_max: roots.max(),
        mp_min: mp.lambda_min_pred,
        mp_max: mp.lambda_max_pred,
        rel_error_min: rel(roots.min(), mp.lambda_min_pred),
        rel_error_max: rel(roots.max(), mp.lambda_max_pred),
        jacobi_deviation,
    })
}

fn run_laguerre(rec: &mut RunRecord, n: usize, t: usize, s: f64) -> Result<()> {
    let l = laguerre_summary(n, t, s)?;
    rec.metric("root_min", l.root_min);
    rec.metric("root_max", l.root_max);
    rec.metric("root_ratio", l.root_max / l.root_min);
    rec.metric("mp_min", l.mp_min);
    rec.metric("mp_max", l.mp_max);
    rec.metric("rel_error_min", l.rel_error_min);
    rec.metric("rel_error_max", l.rel_error_max);
    rec.metric("jacobi_deviation", l.jacobi_deviation);
    rec.check("jacobi_agrees", l.jacobi_deviation <= 1e-6);
    rec.detail = serde_json::to_value(&l)?;
    Ok(())
}
