use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared across the crate.
///
/// `BasisBudget` and `PermanentLimit` are resource guards: they fire before a
/// computation whose cost would explode, and callers may retry with larger
/// limits. Everything else reports invalid input or a numerical breakdown.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("mode count mismatch: expected {expected}, got {got}")]
    ModeMismatch { expected: usize, got: usize },

    #[error("{what} must be square, got {rows}x{cols}")]
    NotSquare {
        what: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("{what} is not unitary: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error(
        "transform violates Bogoliubov constraints: metric residual {metric:.3e}, \
         symmetry residual {symmetry:.3e} (tolerance {tol:.3e})"
    )]
    ConstraintViolation { metric: f64, symmetry: f64, tol: f64 },

    #[error("decomposition failed: {what} (residual {residual:.3e}, tolerance {tol:.3e})")]
    DecompositionFailed {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error(
        "linear solve rejected: residual {residual:.3e} exceeds {threshold:.3e} \
         (condition estimate {condition:.3e})"
    )]
    IllConditionedSolve {
        condition: f64,
        residual: f64,
        threshold: f64,
    },

    #[error("basis size {size} exceeds budget {budget} ({context})")]
    BasisBudget {
        size: u128,
        budget: usize,
        context: &'static str,
    },

    #[error("permanent size {n} exceeds limit {limit}")]
    PermanentLimit { n: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors that signal a cost guard rather than bad input.
    pub fn is_resource_guard(&self) -> bool {
        matches!(
            self,
            Error::BasisBudget { .. } | Error::PermanentLimit { .. }
        )
    }
}
