//! Online vector sparsification: an adversary presents an isotropic menu of
//! vectors each round, the player picks one and a scaling `s_t >= 0`, and the
//! goal is a well-conditioned `A_T = Σ_t s_t v_t v_tᵀ`.
//!
//! The adversary here rotates the columns of a Sylvester-Hadamard matrix into
//! an eigenbasis of the current `A`. Against it, `det(xI - A_τ)` depends only
//! on the scalings: it equals `Π_t (1 - (s_t/n) D) x^n`.

mod players;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{
    charpoly_exact, coefficient_relative_errors, laguerre_poly, majorization, one_minus_alpha_d,
    one_minus_alpha_d_exact, product_transform, rational, real_roots, Arithmetic, Majorization,
    RealRootedPoly, RootVector,
};
use crate::spectral::{eig, DenseMatrix, SymmetricMatrix, SymmetricSpectrum};

pub use players::{BarrierRecord, BssParams, BssPlayer, PlayerKind, Strategy, GREEDY_SCALINGS};

/// Track `p_τ` with rational coefficients up to this dimension.
pub const EXACT_TRACKING_MAX_N: usize = 16;
pub const ISOTROPY_TOL: f64 = 1e-9;
/// Relative threshold below which `λ_min` counts as zero.
pub const SINGULAR_TOL: f64 = 1e-9;
pub const CHARPOLY_TOL: f64 = 1e-8;
pub const WITNESS_TOL: f64 = 1e-6;

/// Sylvester-Hadamard matrix scaled to be orthogonal: entries `±1/√n`.
pub fn hadamard(n: usize) -> Result<DenseMatrix> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Precondition(format!("Hadamard size {n} is not a power of 2")));
    }
    let mut h = DenseMatrix::identity(1);
    while h.rows < n {
        let m = h.rows;
        let mut next = DenseMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                let x = h.get(i, j);
                next.set(i, j, x);
                next.set(i, j + m, x);
                next.set(i + m, j, x);
                next.set(i + m, j + m, -x);
            }
        }
        h = next;
    }
    let c = 1.0 / (n as f64).sqrt();
    h.data.iter_mut().for_each(|x| *x *= c);
    Ok(h)
}

#[derive(Debug, Clone)]
pub struct VectorMenu {
    pub vectors: Vec<Vec<f64>>,
}

impl VectorMenu {
    /// `‖Σ_i v_i v_iᵀ - I‖_F`.
    pub fn isotropy_error(&self) -> f64 {
        let n = self.vectors.first().map_or(0, Vec::len);
        let mut sum = SymmetricMatrix::zeros(n);
        for v in &self.vectors {
            sum.add_rank_one(1.0, v);
        }
        sum.sub(&SymmetricMatrix::identity(n)).frobenius_norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Move {
    pub round: usize,
    pub index: usize,
    pub scaling: f64,
}

#[derive(Debug, Clone)]
pub struct GameState {
    pub n: usize,
    /// Planned number of rounds.
    pub t: usize,
    /// Rounds played so far.
    pub round: usize,
    pub a: SymmetricMatrix,
    /// Eigen-decomposition of `a`, with vectors.
    pub spectrum: SymmetricSpectrum,
    pub history: Vec<Move>,
    /// `det(xI - A_τ)` as predicted from the scalings.
    pub poly: RealRootedPoly,
    /// `S = Σ s_t / n`.
    pub s_running: f64,
}

impl GameState {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("dimension must be positive".into()));
        }
        let a = SymmetricMatrix::zeros(n);
        let mode = if n <= EXACT_TRACKING_MAX_N {
            Arithmetic::Exact
        } else {
            Arithmetic::Float
        };
        Ok(Self {
            n,
            t,
            round: 0,
            spectrum: eig(&a, true)?,
            a,
            history: Vec::new(),
            poly: RealRootedPoly::monomial(n, mode),
            s_running: 0.0,
        })
    }

    /// `A += s v vᵀ`, then refreshes the spectrum and `p_τ`.
    pub fn apply(&mut self, v: &[f64], index: usize, s: f64) -> Result<()> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::Precondition(format!("scaling must be finite and >= 0, got {s}")));
        }
        if v.len() != self.n {
            return Err(Error::LengthMismatch(v.len(), self.n));
        }
        self.a.add_rank_one(s, v);
        self.spectrum = eig(&self.a, true)?;
        let alpha = s / self.n as f64;
        self.poly = match self.poly.mode() {
            Arithmetic::Exact => {
                let q = rational(s)? / rational(self.n as f64)?;
                one_minus_alpha_d_exact(&self.poly, &q)?
            }
            Arithmetic::Float => one_minus_alpha_d(&self.poly, alpha)?,
        };
        self.s_running += alpha;
        self.round += 1;
        self.history.push(Move {
            round: self.round,
            index,
            scaling: s,
        });
        Ok(())
    }
}

/// Menu `{U h_i}` where `U` holds the eigenvectors of `A_τ` (ascending
/// eigenvalues, largest-magnitude entry positive) and `h_i` are the columns of
/// the normalized Hadamard matrix.
pub fn hadamard_adversary(state: &GameState) -> Result<VectorMenu> {
    let h = hadamard(state.n)?;
    let u = state.spectrum.basis().expect("game state keeps eigenvectors");
    let m = u.matmul(&h);
    Ok(VectorMenu {
        vectors: (0..state.n).map(|j| m.column(j)).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GameResult {
    pub n: usize,
    pub t: usize,
    pub player: String,
    /// Eigenvalues of `A_T`, ascending.
    pub spectrum: Vec<f64>,
    /// `λ_max / λ_min`, `None` when `A_T` is singular.
    pub condition: Option<f64>,
    pub singular: bool,
    pub indices: Vec<usize>,
    pub scalings: Vec<f64>,
    /// `S = Σ s_t / n`.
    pub s_total: f64,
    /// `p_T`.
    pub poly: RealRootedPoly,
    /// Player's feasibility margin per round, when it reports one.
    pub margins: Vec<Option<f64>>,
    /// Spectrum of `A_τ` after each round.
    pub spectra: Vec<Vec<f64>>,
    pub max_isotropy_error: f64,
    pub barrier: Option<Vec<BarrierRecord>>,
    /// `(u_0 + T δ_U) / (l_0 + T δ_L)` for the barrier player.
    pub barrier_bound: Option<f64>,
    #[serde(skip)]
    pub a_final: SymmetricMatrix,
}

impl GameResult {
    pub fn condition_or_inf(&self) -> f64 {
        self.condition.unwrap_or(f64::INFINITY)
    }

    /// Every barrier record inside its barriers with nonincreasing potentials.
    pub fn barrier_safe(&self) -> Option<bool> {
        self.barrier
            .as_ref()
            .map(|log| log.iter().all(|r| r.inside && r.potentials_nonincreasing))
    }
}

/// `λ_max / λ_min`, or `None` when `λ_min <= SINGULAR_TOL · λ_max`.
pub fn condition_number(values: &[f64]) -> Option<f64> {
    let (lo, hi) = (values[0], values[values.len() - 1]);
    if hi <= 0.0 || lo <= SINGULAR_TOL * hi {
        None
    } else {
        Some(hi / lo)
    }
}

/// Plays `t` rounds of `player` against the Hadamard adversary.
pub fn play_game(player: &PlayerKind, n: usize, t: usize) -> Result<GameResult> {
    if t == 0 {
        return Err(Error::Precondition("need at least one round".into()));
    }
    let mut strategy = player.build(n, t)?;
    let mut state = GameState::new(n, t)?;
    let mut margins = Vec::with_capacity(t);
    let mut spectra = Vec::with_capacity(t);
    let mut max_isotropy_error = 0.0f64;
    for _ in 0..t {
        let menu = hadamard_adversary(&state)?;
        let iso = menu.isotropy_error();
        if iso > ISOTROPY_TOL {
            return Err(Error::Precondition(format!(
                "adversary menu not isotropic at round {} (error {iso:e})",
                state.round + 1
            )));
        }
        max_isotropy_error = max_isotropy_error.max(iso);
        let decision = strategy.choose(&state, &menu)?;
        let v = menu.vectors.get(decision.index).ok_or(Error::VertexOutOfRange {
            vertex: decision.index,
            n,
        })?;
        state.apply(v, decision.index, decision.scaling)?;
        strategy.observe(&state)?;
        margins.push(decision.margin);
        spectra.push(state.spectrum.values.clone());
    }
    let spectrum = state.spectrum.values.clone();
    let condition = condition_number(&spectrum);
    Ok(GameResult {
        n,
        t,
        player: strategy.name(),
        condition,
        singular: condition.is_none(),
        indices: state.history.iter().map(|m| m.index).collect(),
        scalings: state.history.iter().map(|m| m.scaling).collect(),
        s_total: state.s_running,
        spectrum,
        poly: state.poly,
        margins,
        spectra,
        max_isotropy_error,
        barrier: strategy.barrier_log().map(<[BarrierRecord]>::to_vec),
        barrier_bound: strategy.barrier_bound(),
        a_final: state.a,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceCheck {
    pub passes: bool,
    /// Largest coefficient deviation, relative to the elementary symmetric scale.
    pub max_error: f64,
}

/// Compares `det(xI - A_T)`, computed exactly from the entries of `A_T`, with
/// `Π_t (1 - (s_t/n) D) x^n`. Needs `n <= 16`.
pub fn charpoly_trace_check(result: &GameResult) -> Result<TraceCheck> {
    if result.n > EXACT_TRACKING_MAX_N {
        return Err(Error::Precondition(format!(
            "trace check needs n <= {EXACT_TRACKING_MAX_N}"
        )));
    }
    let actual = charpoly_exact(&result.a_final)?;
    let predicted = product_transform(result.n, &result.scalings, Arithmetic::Exact)?.poly;
    let rho = result.spectrum.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let errors = coefficient_relative_errors(&actual, &predicted, rho)?;
    let max_error = errors.into_iter().fold(0.0, f64::max);
    Ok(TraceCheck {
        passes: max_error <= CHARPOLY_TOL,
        max_error,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessCheck {
    pub laguerre_min: f64,
    pub laguerre_max: f64,
    pub laguerre_ratio: f64,
    pub condition: Option<f64>,
    /// `condition >= laguerre_ratio - 1e-6`.
    pub holds: bool,
    /// Whether `λ(A_T)` majorizes the roots of `(1 - (S/T) D)^T x^n`.
    pub majorization: Majorization,
}

/// Compares the game's condition number with the extreme roots of
/// `(1 - (S/T) D)^T x^n` for the realized `S = Σ s_t / n`. Needs `T >= n`.
pub fn laguerre_witness(result: &GameResult) -> Result<WitnessCheck> {
    let lag = laguerre_poly(result.n, result.t, result.s_total)?;
    let roots = real_roots(&lag)?;
    let laguerre_ratio = roots.max() / roots.min();
    let spectrum = RootVector::new(result.spectrum.clone())?;
    Ok(WitnessCheck {
        laguerre_min: roots.min(),
        laguerre_max: roots.max(),
        laguerre_ratio,
        condition: result.condition,
        holds: result.condition_or_inf() >= laguerre_ratio - WITNESS_TOL,
        majorization: majorization(&spectrum, &roots)?,
    })
}
