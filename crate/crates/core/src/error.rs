use thiserror::Error;

/// Errors raised by model construction, meshing, solvers and the scenario runner.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("chart domain error: {0}")]
    ChartDomain(String),

    #[error("vector is not tangent to the ambient model (residual {residual:.3e})")]
    TangencyViolation { residual: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("incompatible combination: {0}")]
    Incompatible(String),

    #[error("resolution too small: {0}")]
    ResolutionTooSmall(String),

    #[error("frame degeneracy at nodes {nodes:?}")]
    FrameDegeneracy { nodes: Vec<usize> },

    #[error("mesh is not antipodally symmetric: {0}")]
    NotAntipodal(String),

    #[error("field is not even under the deck transformation (odd residual {residual:.3e})")]
    NotEven { residual: f64 },

    #[error("solver did not converge: {what} (achieved residual {residual:.3e})")]
    NonConvergence { what: String, residual: f64 },

    #[error("unexpected kernel dimension: expected {expected}, found {found}")]
    UnexpectedKernel { expected: usize, found: usize },

    #[error("one-form is not harmonic (Bochner residual {residual:.3e})")]
    NotHarmonic { residual: f64 },

    #[error("ill-conditioned form basis (smallest mass eigenvalue {min_eig:.3e})")]
    IllConditioned { min_eig: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
