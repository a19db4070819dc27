use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sparsebound::certificates::WalkMode;
use sparsebound::graph::save_graph;
use sparsebound::harness::{self, Experiment, ExperimentSpec, GraphSource, Outputs, Report, Weights, WORKERS_ENV};

#[derive(Parser)]
#[command(name = "sparsebound", version, about = "Spectral-gap certificates, online sparsification games and graph sparsifiers")]
#[command(after_help = "Repetitions run in parallel; set SPARSEBOUND_WORKERS to fix the worker count.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Edge-list file.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Generator: complete:N, cycle:N, path:N, star:N, hypercube:DIM, petersen, random-regular:N,D,GIRTH.
    #[arg(long, value_name = "SPEC")]
    gen: Option<String>,
    /// Replace weights by uniform draws from [LO, HI), per repetition.
    #[arg(long, value_name = "LO,HI")]
    random_weights: Option<String>,
}

impl GraphArgs {
    fn source(&self) -> Result<GraphSource> {
        match (&self.input, &self.gen) {
            (Some(p), None) => Ok(GraphSource::File { path: p.clone() }),
            (None, Some(g)) => Ok(g.parse()?),
            _ => bail!("give exactly one of --in or --gen"),
        }
    }

    fn weights(&self) -> Result<Weights> {
        let Some(spec) = &self.random_weights else {
            return Ok(Weights::Keep);
        };
        let (lo, hi) = spec.split_once(',').context("--random-weights takes LO,HI")?;
        Ok(Weights::Random {
            lo: lo.trim().parse()?,
            hi: hi.trim().parse()?,
        })
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Per-run table, one row per repetition.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Alon-Boppana certificate lower-bounding λ_n/λ_2.
    AbCertify {
        #[command(flatten)]
        graph: GraphArgs,
        /// Ball radius; the graph's girth must exceed 2k+1.
        #[arg(long)]
        k: usize,
        /// Fixed root; the best root is searched when omitted.
        #[arg(long)]
        root: Option<usize>,
        /// Keep weights as given instead of scaling to max weighted degree 1.
        #[arg(long)]
        no_normalize: bool,
        /// Random-walk statistics: `exact` or `mc:SAMPLES[:SEED]`.
        #[arg(long)]
        walk: Option<String>,
        #[command(flatten)]
        run: RunArgs,
        /// JSON report path; printed to stdout when omitted.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Play the online sparsification game against the Hadamard adversary.
    Game {
        /// Dimension, a power of 2.
        #[arg(long)]
        n: usize,
        /// Average degree; the game lasts ⌈dn/2⌉ rounds unless --t is given.
        #[arg(long, required_unless_present = "t")]
        d: Option<f64>,
        #[arg(long)]
        t: Option<usize>,
        /// bss, uniform, greedy, random or random:<seed>.
        #[arg(long, default_value = "bss")]
        player: String,
        #[command(flatten)]
        run: RunArgs,
        /// JSON report path; printed to stdout when omitted.
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
    /// Barrier-method spectral sparsifier with about dn/2 edges.
    Sparsify {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        d: f64,
        /// Edge list of the sparsifier from repetition 0.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        /// JSON report path; printed to stdout when omitted.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Roots of the Laguerre-type polynomial against the Marchenko-Pastur edges.
    Laguerre {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        /// Total trace S; the polynomial is (1 - (S/(nT)) D)^T x^n.
        #[arg(long)]
        s: f64,
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Generate a graph and write it as an edge list.
    Gen {
        /// Generator spec, as for --gen.
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Run every invariant suite at fixed seeds.
    Validate {
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
}

fn parse_walk(s: &str) -> Result<WalkMode> {
    if s == "exact" {
        return Ok(WalkMode::Exact);
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["mc", samples] => Ok(WalkMode::MonteCarlo { samples: samples.parse()?, seed: 0 }),
        ["mc", samples, seed] => Ok(WalkMode::MonteCarlo {
            samples: samples.parse()?,
            seed: seed.parse()?,
        }),
        _ => bail!("--walk takes `exact` or `mc:SAMPLES[:SEED]`, got {s:?}"),
    }
}

fn spec(experiment: Experiment, run: &RunArgs, json: Option<PathBuf>) -> ExperimentSpec {
    ExperimentSpec {
        experiment,
        seed: run.seed,
        repetitions: run.reps,
        outputs: Outputs {
            json,
            csv: run.csv.clone(),
        },
    }
}

fn finish(report: &Report, print_json: bool) -> Result<ExitCode> {
    if print_json {
        println!("{}", report.to_json()?);
    }
    for c in &report.checks {
        eprintln!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    for r in report.records.iter().filter_map(|r| r.error.as_ref()) {
        eprintln!("error: {r}");
    }
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        v.trim().parse::<usize>().with_context(|| format!("{WORKERS_ENV}={v:?}"))?;
    }
    match cli.command {
        Command::AbCertify { graph, k, root, no_normalize, walk, run, report } => {
            let exp = Experiment::AbCertify {
                graph: graph.source()?,
                weights: graph.weights()?,
                normalize: !no_normalize,
                k,
                root,
                walk: walk.as_deref().map(parse_walk).transpose()?,
            };
            let print = report.is_none();
            finish(&harness::run(&spec(exp, &run, report))?, print)
        }
        Command::Game { n, d, t, player, run, emit } => {
            let t = match (t, d) {
                (Some(t), _) => t,
                (None, Some(d)) if d > 0.0 => (d * n as f64 / 2.0).ceil() as usize,
                _ => bail!("give --t or a positive --d"),
            };
            let print = emit.is_none();
            finish(&harness::run(&spec(Experiment::Game { n, t, player }, &run, emit))?, print)
        }
        Command::Sparsify { graph, d, out, run, report } => {
            let exp = Experiment::Sparsify {
                graph: graph.source()?,
                weights: graph.weights()?,
                d,
            };
            let print = report.is_none();
            let rep = harness::run(&spec(exp, &run, report))?;
            if let Some(path) = out {
                let h = rep.records[0].graph.as_ref().context("no sparsifier produced")?;
                save_graph(h, &path).with_context(|| format!("writing {}", path.display()))?;
            }
            finish(&rep, print)
        }
        Command::Laguerre { n, t, s, csv, report } => {
            let run = RunArgs { seed: 0, reps: 1, csv };
            let print = report.is_none();
            finish(&harness::run(&spec(Experiment::Laguerre { n, t, s }, &run, report))?, print)
        }
        Command::Gen { spec, seed, out } => {
            let g = spec.parse::<GraphSource>()?.build(seed)?;
            save_graph(&g, &out).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("wrote {} vertices, {} edges, girth {:?} to {}", g.n(), g.m(), g.girth(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { csv, report } => {
            let run = RunArgs { seed: 0, reps: 1, csv };
            let print = report.is_none();
            finish(&harness::run(&spec(Experiment::Validate, &run, report))?, print)
        }
    }
}
