//! # qel-core
//!
//! A dense numerical laboratory for quantum entropy inequalities.
//!
//! The crate is layered bottom-up:
//!
//! - [`linalg`]: complex matrices, Hermitian eigendecomposition, matrix
//!   functions, Kronecker products, partial traces, Schatten norms.
//! - [`states`]: density matrices, subnormalized operators, multipartite
//!   bookkeeping, seeded random ensembles, exact quantum Markov chains.
//! - [`channels`]: Kraus channels, their Hilbert-Schmidt duals, the Petz
//!   recovery map, partial-trace channels, Haar twirls.
//! - [`entropy`]: von Neumann, relative and Rényi entropies, conditional
//!   mutual information, `exp(Σ ± log X)` operators.
//! - [`lab`]: one checker per inequality / identity, returning structured
//!   verdicts with slacks, plus the Lie-Trotter study and the conjecture
//!   explorer.
//! - [`suite`]: seeded ensembles wired to checkers, used by the `qel` CLI.
//!
//! All logarithms are natural (nats).

pub mod channels;
pub mod entropy;
pub mod lab;
pub mod linalg;
pub mod report;
pub mod states;
pub mod suite;

use thiserror::Error;

pub use channels::{DualMap, KrausChannel, PetzMap};
pub use entropy::EntropyValue;
pub use linalg::{ComplexMatrix, HermitianEigen, Norm, C64};
pub use states::{DensityMatrix, MarkovSpec, MultipartiteState, SubnormalizedOperator};

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Relative Hermiticity tolerance: `max|H - H†| <= HERM * max(1, max|H|)`.
    pub const HERM: f64 = 1e-9;
    /// Eigendecomposition reconstruction tolerance, relative to `max|H|`.
    pub const RECON: f64 = 1e-10;
    /// Smallest admissible eigenvalue of a positive operator.
    pub const PSD: f64 = 1e-10;
    pub const TRACE: f64 = 1e-10;
    /// Eigenvalues below `RANK_CUTOFF * max λ` count as zero.
    pub const RANK_CUTOFF: f64 = 1e-12;
    /// `supp ρ ⊆ supp σ` iff `‖(1-P_σ) ρ (1-P_σ)‖_∞` is below this.
    pub const SUPPORT: f64 = 1e-9;
    /// Absolute slack tolerance for inequalities.
    pub const INEQ: f64 = 1e-8;
    /// Two-sided tolerance for identities.
    pub const IDENTITY: f64 = 1e-8;
    /// Default regularization for random states fed into exp/log expressions.
    pub const DEFAULT_EPS: f64 = 1e-6;
    /// Regularization applied to `Φ(σ)` before its inverse square root.
    pub const PETZ_EPS: f64 = 1e-10;
    /// Unitarity / trace-preservation tolerance for Kraus families.
    pub const CHANNEL: f64 = 1e-10;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("singular input: smallest eigenvalue {min_eigenvalue:.3e} is below the rank cutoff")]
    SingularInput { min_eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("rank {rank} is not in 1..={dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("not a positive semi-definite operator (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("invalid trace {trace}")]
    BadTrace { trace: f64 },

    #[error("inconsistent Markov blocks: {0}")]
    InconsistentBlocks(String),

    #[error("Φ(σ) is singular after regularization")]
    SingularSigma,

    #[error("channel is not unital (deviation {deviation:.3e})")]
    NotUnital { deviation: f64 },

    #[error("channel is not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("α = {alpha} is outside its admissible range")]
    BadAlpha { alpha: f64 },

    #[error("Tr √ρ√σ vanishes: orthogonal supports")]
    ZeroOverlap,

    #[error("expected a tripartite state, got {parts} parts")]
    NotTripartite { parts: usize },

    #[error("exp-log term {index} is rank deficient (min eigenvalue {min_eigenvalue:.3e})")]
    SingularTerm { index: usize, min_eigenvalue: f64 },

    #[error("B-marginal matching condition fails (best distance {distance:.3e})")]
    MarginalMismatch { distance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
