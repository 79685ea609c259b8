//! Error taxonomy shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A grating wavevector that the grid cannot represent faithfully.
    #[error("wavevector {k} rad/mm under-resolved along {axis}: {samples:.2} samples per period, need >= 8")]
    NyquistViolation {
        k: f64,
        axis: &'static str,
        samples: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// An amplitude-solver condition with no solution for the given shape.
    #[error("condition unachievable: {0}")]
    ConditionUnachievable(String),

    /// Spin-wave phase would rotate too far in one step for the integrator.
    #[error("time step too large: |rate|*dt = {0:.3} rad > 0.5; reduce dt")]
    DtTooLarge(f64),

    #[error("invalid protocol: {msg}")]
    InvalidProtocol {
        /// Index of the offending step, when one is identifiable.
        step: Option<usize>,
        msg: String,
    },

    #[error("sweep path '{path}': {msg}")]
    BadSweepPath { path: String, msg: String },

    #[error("analysis: {0}")]
    Analysis(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CoreError {
    pub fn protocol(msg: impl Into<String>) -> Self {
        CoreError::InvalidProtocol {
            step: None,
            msg: msg.into(),
        }
    }

    pub fn protocol_at(step: usize, msg: impl Into<String>) -> Self {
        CoreError::InvalidProtocol {
            step: Some(step),
            msg: msg.into(),
        }
    }
}
