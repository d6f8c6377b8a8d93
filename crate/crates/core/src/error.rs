//! Error type shared by the whole crate.

/// Errors reported by constructors, propagators, and experiment drivers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A numeric argument violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Too much squared-norm mass sits in the last 5% of the grid, so the
    /// finite interval no longer represents the half line faithfully.
    #[error("tail mass {fraction:.3e} of squared norm in the last 5% of the grid exceeds {limit:.1e}; enlarge the grid")]
    TailMassExceeded { fraction: f64, limit: f64 },

    /// Ring states need an even number of edges.
    #[error("ring construction needs an even edge count, got {0}")]
    OddEdgeCount(usize),

    /// An operation that is only defined for the equal-weight vertex matrix
    /// received a different matrix.
    #[error("vertex matrix is not the equal-weight (Kirchhoff) matrix for {0} edges")]
    NonKirchhoffMatrix(usize),

    /// Two sampled objects live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Edge counts or sample lengths disagree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
