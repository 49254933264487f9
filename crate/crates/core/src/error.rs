use thiserror::Error;

/// Errors produced while building models, operators and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("truncated space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("interior margin {margin} exceeds the cutoff {n_max}; interior subspace is empty")]
    EmptyInterior { margin: usize, n_max: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("both V and U are zero; the dissipative part vanishes")]
    ZeroDissipation,

    #[error("{what} is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { what: &'static str, deviation: f64 },

    #[error("{what} is not symmetric (deviation {deviation:.3e})")]
    NotSymmetric { what: &'static str, deviation: f64 },

    #[error("mixing matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("Bogoliubov constraints violated (deviation {deviation:.3e})")]
    BogoliubovConstraint { deviation: f64 },

    #[error("{what} is not positive semidefinite (smallest eigenvalue {min_eig:.3e})")]
    NotPositive { what: &'static str, min_eig: f64 },

    #[error("vector has weight {weight:.3e} outside the interior subspace")]
    BoundaryContamination { weight: f64 },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("superoperator dimension {dim} too large for the exponential integrator (cap {cap})")]
    ExpmTooLarge { dim: usize, cap: usize },

    #[error("integration unstable at t = {t}: trace/norm error {error:.3e}")]
    Unstable { t: f64, error: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
