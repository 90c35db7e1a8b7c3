use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("domain error: {0}")]
    Domain(String),
    /// `(s, ψ) = (2, 0)`: the two frequencies collide and the torus
    /// decomposition is undefined. Use a Reeb orbit instead.
    #[error("degenerate resonance at s = 2, psi = 0")]
    DegenerateResonance,
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("integration produced a non-finite state after t = {last_valid_time}")]
    Integration { last_valid_time: f64 },
    #[error("insufficient data: need at least {needed} samples, got {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("endpoints are inconsistent with the chord law (residual {residual:e})")]
    InconsistentEndpoints { residual: f64 },
    #[error("no connection found within |m| <= {m_bound}")]
    SolverExhausted { m_bound: i64 },
}

pub type Result<T> = std::result::Result<T, Error>;
