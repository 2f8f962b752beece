use alloc::string::String;

/// Errors raised by the model, analysis and solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(&'static str),

    #[error("no positive homogeneous equilibrium (requires zeta > 1 and beta > nu)")]
    NoPositiveEquilibrium,

    #[error("parameters outside the stable region: {0}")]
    Infeasible(&'static str),

    #[error("coefficient evaluated outside its domain at n_self={n_self}, n_other={n_other}")]
    Domain { n_self: f64, n_other: f64 },

    #[error("no critical mode: b(k^2) has no positive minimizer")]
    NoCriticalMode,

    #[error("negative density {value} at node {node} (t={time})")]
    NegativeDensity { node: usize, value: f64, time: f64 },

    #[error("non-finite value in the solution at t={time}")]
    NonFinite { time: f64 },

    #[error("Picard iteration did not converge at t={time}: {iterations} iterations, last increment {increment}")]
    PicardDiverged {
        time: f64,
        iterations: usize,
        increment: f64,
    },

    #[error("linear solver failed after {iterations} iterations (relative residual {residual})")]
    LinearSolver { iterations: usize, residual: f64 },

    #[error("time step {dt} violates the transport CFL bound {limit}")]
    Cfl { dt: f64, limit: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}
