//! Spectral-gap certificates for weighted graphs, the online vector
//! sparsification game, real-rooted polynomial tools, and a barrier-potential
//! graph sparsifier.
//!
//! Module map:
//!
//! - [`graph`]: weighted graphs, BFS trees, girth, generators, edge-list I/O.
//! - [`spectral`]: dense symmetric matrices, Laplacians and eigensolves.
//! - [`certificates`]: Alon-Boppana test vectors and lower bounds on `λ_n/λ_2`.
//! - [`poly`]: the `(1 - αD)` operator, root isolation, majorization, Laguerre roots.
//! - [`game`]: Hadamard adversary vs. barrier and baseline players.
//! - [`sparsify`]: edge vectors in isotropic position, sparsifier and verifier.
//! - [`harness`]: experiment specs, reports and the validation suite.

pub mod certificates;
pub mod error;
pub mod game;
pub mod graph;
pub mod harness;
pub mod poly;
pub mod sparsify;
pub mod spectral;

pub use error::{Error, Result};
