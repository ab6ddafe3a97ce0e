//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// `sign(1 - xi_t^2)` is undefined on the locus `|xi_t| = 1`.
    #[error("branch sign of 1 - xi_t^2 is undefined at |xi_t| = 1")]
    BranchUndefined,

    #[error("state carries no second derivative xi_tt")]
    MissingXiTt,

    #[error("cone classification requires k >= 2 (got k = {0})")]
    ConeOrder(u32),

    #[error("no critical threshold h* exists for n = {n}, k = {k}, sign {s:+}")]
    NoThreshold { n: u32, k: u32, s: i8 },

    /// The (h, branch, parity) combination violates a named case constraint.
    #[error("inadmissible input: {0}")]
    Inadmissible(String),

    #[error("state lies on the singular locus xi_t^2 = 1")]
    SingularLocus,

    /// Step size underflow; carries the last good state.
    #[error("step size underflow at t = {t}, xi = {xi}, xi_t = {xi_t}")]
    StepUnderflow { t: f64, xi: f64, xi_t: f64 },

    #[error("quadrature domain error: {0}")]
    Quadrature(String),

    /// The sinh/cosh flat families need `2k != n`.
    #[error("flat family coefficient (1 - n/2k)^-1 is undefined for 2k = n")]
    DegenerateFlatFamily,

    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by the caller's input rather than an internal
    /// numerical failure. The CLI maps these to exit code 2.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::StepUnderflow { .. })
    }
}
