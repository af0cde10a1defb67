use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of refinement levels.
    #[error(
        "quadrature did not converge after {levels} refinements: last {last:e}, previous {previous:e}"
    )]
    Convergence {
        levels: usize,
        last: f64,
        previous: f64,
    },

    /// `|ψ|` fell below the node threshold, so phase-derived quantities are undefined.
    #[error("wavefunction node at x = {x}, t = {t} (|psi| = {amplitude:e})")]
    Node { x: f64, t: f64, amplitude: f64 },

    #[error("integrator step size underflow at t = {t} (dt = {dt:e})")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("cannot normalize the zero wavefunction (empty k-sphere)")]
    NormalizationImpossible,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of an iterative numerical method rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::StepUnderflow { .. } | Error::Node { .. }
        )
    }
}
