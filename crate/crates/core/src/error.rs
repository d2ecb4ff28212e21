use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data failed a structural check (Hermiticity, normalization, shape).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("no interior minimum of the gap on [{lo}, {hi}] T")]
    NoInteriorMinimum { lo: f64, hi: f64 },

    /// Wraps a failure at a specific field point of a sweep.
    #[error("at B0 = {b_tesla} T: {source}")]
    AtField {
        b_tesla: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_field(self, b_tesla: f64) -> Self {
        match self {
            e @ Error::AtField { .. } => e,
            other => Error::AtField { b_tesla, source: Box::new(other) },
        }
    }

    /// True for failures of the numerical kernels as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConvergence { .. } | Error::NoInteriorMinimum { .. } => true,
            Error::AtField { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
