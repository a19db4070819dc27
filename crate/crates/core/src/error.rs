use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error("edge {{{u}, {v}}} has invalid weight {w}")]
    BadWeight { u: usize, v: usize, w: f64 },

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph has no edges")]
    NoEdges,

    #[error("graph is disconnected (lambda_2 = {lambda2:e})")]
    Disconnected { lambda2: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("rejection budget exhausted after {attempts} attempts")]
    BudgetExhausted { attempts: usize },

    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("eigensolver failed to converge at index {0}")]
    NoConvergence(usize),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("zero vector")]
    ZeroVector,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("not numerically real-rooted: {0}")]
    NotRealRooted(String),

    #[error("no feasible menu vector (best margin {margin:e})")]
    Infeasible { margin: f64 },

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Csv(#[from] csv::Error),
}
