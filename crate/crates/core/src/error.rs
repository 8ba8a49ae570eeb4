use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Ratio of a cross moment to vanishing intensities, e.g. at `chi = 0`.
    #[error("first-order coherence undefined: {0}")]
    UndefinedCoherence(String),

    #[error(
        "Fock truncation did not converge below cutoff cap {cap}: \
         last change {last_change:.3e} between cutoffs {last_pair:?} exceeds tolerance {tol:.3e}"
    )]
    ConvergenceFailure {
        cap: usize,
        tol: f64,
        last_change: f64,
        last_pair: (usize, usize),
    },
}
