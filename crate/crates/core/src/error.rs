use thiserror::Error;

/// Errors raised by the entanglement toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("hermiticity violated: max |H - H^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("unit trace violated: trace = {trace}")]
    TraceNotUnit { trace: f64 },

    #[error("positivity violated: smallest eigenvalue = {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("unitarity violated: max |U^dagger U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("normalization violated: |psi| = {norm}")]
    NotNormalized { norm: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("factor inconsistent with state: |M M^dagger - rho|_F = {residual:e}")]
    InconsistentFactor { residual: f64 },

    #[error("invalid Schmidt pair ({sigma1}, {sigma2})")]
    InvalidSchmidtPair { sigma1: f64, sigma2: f64 },

    #[error("ensemble member {index} has a vanishing Schmidt coefficient ({sigma2:e})")]
    ProductMember { index: usize, sigma2: f64 },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("objective is not finite at the starting point")]
    NonFiniteObjective,

    #[error("no restart reached the feasibility tolerance (best residual {best_residual:e})")]
    NoFeasibleRestart { best_residual: f64 },

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
