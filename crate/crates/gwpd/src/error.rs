use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of wavepacket construction, propagation and analysis.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("degenerate state: {0}")]
    DegenerateState(String),
    #[error("invalid width matrix: {0}")]
    InvalidWidth(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("potential range error: exponent argument {argument:.3e} exceeds cap {cap:.3e}")]
    PotentialRange { argument: f64, cap: f64 },
    #[error("unsupported derivative order {0}")]
    UnsupportedOrder(u32),
    #[error("unknown composition scheme: {0}")]
    UnknownScheme(String),
    #[error("phase tracking ambiguous: det Q rotated by {0:.3} rad in one substep; reduce the step size")]
    PhaseTracking(f64),
    #[error("boundary leak: |psi| = {amplitude:.3e} on the grid edge at step {step}")]
    BoundaryLeak { amplitude: f64, step: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("{0}")]
    Parse(String),
}
