use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{condition_number, GameState, VectorMenu};
use crate::error::{Error, Result};
use crate::spectral::{dot, eig};

/// Scalings tried by the greedy player.
pub const GREEDY_SCALINGS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Relative slack allowed on the feasibility margin and potential monotonicity.
const FEASIBILITY_TOL: f64 = 1e-9;
const POTENTIAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct Decision {
    pub index: usize,
    pub scaling: f64,
    pub margin: Option<f64>,
}

pub trait Strategy {
    fn name(&self) -> String;

    fn choose(&mut self, state: &GameState, menu: &VectorMenu) -> Result<Decision>;

    /// Called with the state after the chosen update.
    fn observe(&mut self, _state: &GameState) -> Result<()> {
        Ok(())
    }

    fn barrier_log(&self) -> Option<&[BarrierRecord]> {
        None
    }

    fn barrier_bound(&self) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlayerKind {
    Bss,
    Uniform,
    Greedy,
    Random { seed: u64 },
    /// Fixed `(index, scaling)` per round.
    Scripted(Vec<(usize, f64)>),
}

impl PlayerKind {
    pub fn build(&self, n: usize, t: usize) -> Result<Box<dyn Strategy>> {
        Ok(match self {
            PlayerKind::Bss => Box::new(BssPlayer::new(BssParams::new(n, t)?)),
            PlayerKind::Uniform => Box::new(Uniform),
            PlayerKind::Greedy => Box::new(Greedy),
            PlayerKind::Random { seed } => Box::new(RandomPlayer {
                seed: *seed,
                rng: ChaCha8Rng::seed_from_u64(*seed),
            }),
            PlayerKind::Scripted(moves) => Box::new(Scripted {
                moves: moves.clone(),
                next: 0,
            }),
        })
    }
}

impl fmt::Display for PlayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayerKind::Bss => f.write_str("bss"),
            PlayerKind::Uniform => f.write_str("uniform"),
            PlayerKind::Greedy => f.write_str("greedy"),
            PlayerKind::Random { seed } => write!(f, "random({seed})"),
            PlayerKind::Scripted(_) => f.write_str("scripted"),
        }
    }
}

/// Parses `bss`, `uniform`, `greedy`, `random` (seed 0) or `random:<seed>`.
impl FromStr for PlayerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bss" => Ok(PlayerKind::Bss),
            "uniform" => Ok(PlayerKind::Uniform),
            "greedy" | "greedy-cond" => Ok(PlayerKind::Greedy),
            "random" => Ok(PlayerKind::Random { seed: 0 }),
            _ => match s.strip_prefix("random:").map(str::parse) {
                Some(Ok(seed)) => Ok(PlayerKind::Random { seed }),
                _ => Err(Error::Precondition(format!("unknown player {s:?}"))),
            },
        }
    }
}

struct Uniform;

impl Strategy for Uniform {
    fn name(&self) -> String {
        "uniform".into()
    }

    fn choose(&mut self, _: &GameState, _: &VectorMenu) -> Result<Decision> {
        Ok(Decision {
            index: 0,
            scaling: 1.0,
            margin: None,
        })
    }
}

struct RandomPlayer {
    seed: u64,
    rng: ChaCha8Rng,
}

impl Strategy for RandomPlayer {
    fn name(&self) -> String {
        format!("random({})", self.seed)
    }

    fn choose(&mut self, _: &GameState, menu: &VectorMenu) -> Result<Decision> {
        Ok(Decision {
            index: self.rng.gen_range(0..menu.vectors.len()),
            scaling: 1.0,
            margin: None,
        })
    }
}

struct Scripted {
    moves: Vec<(usize, f64)>,
    next: usize,
}

impl Strategy for Scripted {
    fn name(&self) -> String {
        "scripted".into()
    }

    fn choose(&mut self, _: &GameState, _: &VectorMenu) -> Result<Decision> {
        let &(index, scaling) = self
            .moves
            .get(self.next)
            .ok_or_else(|| Error::Precondition("script ran out of moves".into()))?;
        self.next += 1;
        Ok(Decision {
            index,
            scaling,
            margin: None,
        })
    }
}

/// Minimizes the condition number of `A + s v vᵀ` over the menu and
/// [`GREEDY_SCALINGS`]. Before round `n` zero eigenvalues are ignored, since
/// the rank is still short.
struct Greedy;

fn pseudo_condition(values: &[f64], full_rank_expected: bool) -> f64 {
    if full_rank_expected {
        return condition_number(values).unwrap_or(f64::INFINITY);
    }
    let hi = values[values.len() - 1];
    if hi <= 0.0 {
        return f64::INFINITY;
    }
    values
        .iter()
        .find(|&&x| x > super::SINGULAR_TOL * hi)
        .map_or(f64::INFINITY, |lo| hi / lo)
}

impl Strategy for Greedy {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn choose(&mut self, state: &GameState, menu: &VectorMenu) -> Result<Decision> {
        let full = state.round + 1 >= state.n;
        let mut best = (f64::INFINITY, 0, GREEDY_SCALINGS[0]);
        for (i, v) in menu.vectors.iter().enumerate() {
            for &s in &GREEDY_SCALINGS {
                let mut a = state.a.clone();
                a.add_rank_one(s, v);
                let c = pseudo_condition(&eig(&a, false)?.values, full);
                if c < best.0 {
                    best = (c, i, s);
                }
            }
        }
        Ok(Decision {
            index: best.1,
            scaling: best.2,
            margin: None,
        })
    }
}

/// Barrier parameters for `β = T/n > 1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BssParams {
    pub n: usize,
    pub t: usize,
    pub beta: f64,
    pub delta_upper: f64,
    pub delta_lower: f64,
    pub upper0: f64,
    pub lower0: f64,
}

impl BssParams {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        let beta = t as f64 / n as f64;
        if !(beta > 1.0) {
            return Err(Error::Precondition(format!(
                "barrier player needs T > n, got n={n}, T={t}"
            )));
        }
        let sb = beta.sqrt();
        Ok(Self {
            n,
            t,
            beta,
            delta_upper: (sb + 1.0) / (sb - 1.0),
            delta_lower: 1.0,
            upper0: n as f64 * (beta + sb) / (sb - 1.0),
            lower0: -(n as f64) * sb,
        })
    }

    /// `(u_0 + T δ_U) / (l_0 + T δ_L)`, equal to `((√β+1)/(√β-1))²`.
    pub fn final_ratio(&self) -> f64 {
        let t = self.t as f64;
        (self.upper0 + t * self.delta_upper) / (self.lower0 + t * self.delta_lower)
    }
}

/// Barrier state after one round of the barrier player.
#[derive(Debug, Clone, Serialize)]
pub struct BarrierRecord {
    pub round: usize,
    pub upper: f64,
    pub lower: f64,
    /// `Tr(uI - A)^{-1}` after the round.
    pub phi_upper: f64,
    /// `Tr(A - lI)^{-1}` after the round.
    pub phi_lower: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `max_v Lower(v) - Upper(v)` over the menu.
    pub margin: f64,
    /// `l < λ_min` and `λ_max < u`.
    pub inside: bool,
    pub potentials_nonincreasing: bool,
}

/// Twice-Ramanujan barrier player: keeps `l < λ(A) < u`, shifts the barriers
/// by `δ_L`, `δ_U` every round and picks a vector and scaling for which
/// neither potential grows.
pub struct BssPlayer {
    params: BssParams,
    upper: f64,
    lower: f64,
    phi_upper: f64,
    phi_lower: f64,
    pending_margin: f64,
    log: Vec<BarrierRecord>,
}

fn phi_upper(values: &[f64], u: f64) -> f64 {
    values.iter().map(|x| 1.0 / (u - x)).sum()
}

fn phi_lower(values: &[f64], l: f64) -> f64 {
    values.iter().map(|x| 1.0 / (x - l)).sum()
}

impl BssPlayer {
    pub fn new(params: BssParams) -> Self {
        let n = params.n as f64;
        Self {
            params,
            upper: params.upper0,
            lower: params.lower0,
            phi_upper: n / params.upper0,
            phi_lower: n / -params.lower0,
            pending_margin: 0.0,
            log: Vec::new(),
        }
    }

    pub fn params(&self) -> &BssParams {
        &self.params
    }

    /// `(Upper(v), Lower(v))` at the shifted barriers, from the coordinates
    /// of `v` in the eigenbasis of `A`.
    fn upper_lower(&self, values: &[f64], coords: &[f64]) -> (f64, f64) {
        let u1 = self.upper + self.params.delta_upper;
        let l1 = self.lower + self.params.delta_lower;
        let du = self.phi_upper - phi_upper(values, u1);
        let dl = phi_lower(values, l1) - self.phi_lower;
        let (mut u_sq, mut u_lin, mut l_sq, mut l_lin) = (0.0, 0.0, 0.0, 0.0);
        for (&lam, &c) in values.iter().zip(coords) {
            let c2 = c * c;
            let a = 1.0 / (u1 - lam);
            let b = 1.0 / (lam - l1);
            u_lin += c2 * a;
            u_sq += c2 * a * a;
            l_lin += c2 * b;
            l_sq += c2 * b * b;
        }
        (u_sq / du + u_lin, l_sq / dl - l_lin)
    }
}

impl Strategy for BssPlayer {
    fn name(&self) -> String {
        "bss".into()
    }

    fn choose(&mut self, state: &GameState, menu: &VectorMenu) -> Result<Decision> {
        let values = &state.spectrum.values;
        let n = state.n;
        let mut best: Option<(f64, usize, f64, f64)> = None;
        for (i, v) in menu.vectors.iter().enumerate() {
            let coords: Vec<f64> = (0..n)
                .map(|j| dot(state.spectrum.vector(j).expect("eigenvectors"), v))
                .collect();
            let (up, low) = self.upper_lower(values, &coords);
            let margin = low - up;
            if best.is_none_or(|b| margin > b.0) {
                best = Some((margin, i, up, low));
            }
        }
        let (margin, index, up, low) = best.ok_or_else(|| Error::Precondition("empty menu".into()))?;
        if margin < -FEASIBILITY_TOL * up.abs().max(low.abs()).max(1.0) {
            return Err(Error::Infeasible { margin });
        }
        self.pending_margin = margin;
        Ok(Decision {
            index,
            scaling: 2.0 / (up + low),
            margin: Some(margin),
        })
    }

    fn observe(&mut self, state: &GameState) -> Result<()> {
        let values = &state.spectrum.values;
        self.upper += self.params.delta_upper;
        self.lower += self.params.delta_lower;
        let (lambda_min, lambda_max) = (state.spectrum.min(), state.spectrum.max());
        let inside = self.lower < lambda_min && lambda_max < self.upper;
        let pu = phi_upper(values, self.upper);
        let pl = phi_lower(values, self.lower);
        let ok = |new: f64, old: f64| new <= old + POTENTIAL_TOL * old.abs().max(1.0);
        let potentials_nonincreasing = inside && ok(pu, self.phi_upper) && ok(pl, self.phi_lower);
        self.phi_upper = pu;
        self.phi_lower = pl;
        self.log.push(BarrierRecord {
            round: state.round,
            upper: self.upper,
            lower: self.lower,
            phi_upper: pu,
            phi_lower: pl,
            lambda_min,
            lambda_max,
            margin: self.pending_margin,
            inside,
            potentials_nonincreasing,
        });
        Ok(())
    }

    fn barrier_log(&self) -> Option<&[BarrierRecord]> {
        Some(&self.log)
    }

    fn barrier_bound(&self) -> Option<f64> {
        Some(self.params.final_ratio())
    }
}
