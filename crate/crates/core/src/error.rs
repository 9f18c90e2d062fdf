use thiserror::Error;

/// Errors raised by the library. The CLI maps `Config` to exit code 2 and
/// everything else to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input detected before any computation started.
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// Conjugate gradients did not reach the requested residual.
    #[error("conjugate gradients did not converge after {iterations} iterations (relative residual {final_residual:.3e})")]
    CgNotConverged {
        iterations: usize,
        final_residual: f64,
        /// Relative residual recorded every iteration.
        history: Vec<f64>,
    },

    /// CG met a search direction with non-positive curvature.
    #[error("operator is not positive definite (curvature {curvature:.3e} at iteration {iteration})")]
    Indefinite { iteration: usize, curvature: f64 },

    /// Inverse iteration failed to settle.
    #[error("eigenvalue iteration stagnated after {iterations} steps (last iterates {previous:.12e}, {last:.12e})")]
    EigenStagnation {
        iterations: usize,
        previous: f64,
        last: f64,
    },

    /// The explicit time stepper blew up.
    #[error("instability: energy grew by {growth:.3e} (relative) at step {step}")]
    Unstable { step: usize, growth: f64 },

    /// Singular 2x2 layer system in the analytic laminate formula.
    #[error("degenerate laminate: layer system is singular (determinant {determinant:.3e})")]
    SingularLaminate { determinant: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors that stem from bad input rather than a failed solve.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
