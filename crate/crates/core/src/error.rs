use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A measure value lies outside the interval reachable for gamma in [0, 1].
    #[error("{measure} = {value} is outside the feasible interval [{lo}, {hi}]")]
    OutOfRange {
        measure: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// The linear map from gamma to the chosen measure is constant, so the
    /// measure carries no information about gamma.
    #[error("{measure} does not depend on gamma for these parameters (constant value {value})")]
    Degenerate { measure: &'static str, value: f64 },

    /// A numerical result violated a mathematical guarantee.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    /// The simulated system broke one of the policy invariants.
    #[error("simulation invariant violated at t = {clock}: {what}")]
    InvariantViolation { clock: f64, what: String },

    #[error("no reorder point up to {limit} reaches target lost fraction {target}")]
    UnreachableTarget { target: f64, limit: u64 },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
