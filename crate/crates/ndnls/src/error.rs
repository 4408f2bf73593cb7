use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("small-norm gate failed: value {value:.6} exceeds threshold {threshold}")]
    GateFailed { value: f64, threshold: f64 },

    #[error(
        "boundary solve at x = {x} did not converge: residual {residual:.3e} after {iterations} iterations (contraction {contraction:.3})"
    )]
    Convergence {
        x: f64,
        residual: f64,
        iterations: usize,
        contraction: f64,
    },

    #[error("phase unwinding did not contract: last increment {increment:.3e} after {iterations} iterations")]
    PhaseUnwind { increment: f64, iterations: usize },

    #[error("spectral singularity: min|a| = {min_a:.4}, min|d| = {min_d:.4}")]
    SpectralSingularity { min_a: f64, min_d: f64 },

    #[error("logarithm branch unsafe: min|1 + r+ r-| = {min_modulus:.4}")]
    BranchSafety { min_modulus: f64 },

    #[error("k-plane marching refused for k = {k}: {reason}")]
    KPlaneRefused { k: String, reason: String },

    #[error("spatial domain too small at t = {t}: edge ratio {edge_ratio:.3e}")]
    DomainTooSmall { t: f64, edge_ratio: f64 },

    #[error("oracle blow-up after t = {t}")]
    BlowUp { t: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 4,
            Error::GateFailed { .. } => 2,
            Error::Convergence { .. } | Error::PhaseUnwind { .. } => 3,
            _ => 1,
        }
    }
}
