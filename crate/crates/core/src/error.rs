use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation was called in a way its contract does not allow.
    #[error("usage error: {0}")]
    Usage(String),

    /// The quadrature grid cannot resolve the oscillating phase of the integrand.
    #[error(
        "phase resolution failure: estimated phase change per cell {phase_per_cell:.3} rad \
         exceeds pi/4 with {nodes} nodes per axis; use at least {required} nodes per axis"
    )]
    PhaseResolution {
        phase_per_cell: f64,
        nodes: usize,
        required: usize,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
