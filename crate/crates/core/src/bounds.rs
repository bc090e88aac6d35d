//! Lower and upper bounds on the long-run fraction of demand lost.

use crate::erlang::{blocking, erlang_loss};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::poisson::loss_function;

/// Largest rounding excursion outside `[0, 1]` that is silently clamped.
const CLAMP_SLACK: f64 = 1e-12;

pub(crate) fn clamp_probability(v: f64, what: &str) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else if (-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Error::Inconsistent(format!("{what} = {v} is not a probability")))
    }
}

/// Bound evaluation for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsResult {
    /// `E[(X - r)^+]` for lead-time demand `X ~ Poisson(x)`.
    pub loss: f64,
    /// Erlang loss with `r + 1` servers and load `x`.
    pub erlang: f64,
    /// Lower bound on the lost fraction.
    pub lb: f64,
    /// Upper bound on the lost fraction.
    pub ub: f64,
}

impl BoundsResult {
    pub fn gap(&self) -> f64 {
        self.ub - self.lb
    }

    /// Service level guaranteed from above, `1 - lb`.
    pub fn service_level_upper(&self) -> f64 {
        1.0 - self.lb
    }

    /// Service level guaranteed from below, `1 - ub`.
    pub fn service_level_lower(&self) -> f64 {
        1.0 - self.ub
    }
}

fn lower_from_loss(loss: f64, params: &SystemParams) -> Result<f64> {
    let c = params.cycle_stock() as f64;
    clamp_probability(loss / (loss + c), "lower bound")
}

/// `LOSS(x, r) / (LOSS(x, r) + q floor((r + q) / q))`. Exact when `r < q`.
pub fn lower_bound_gamma(params: &SystemParams) -> Result<f64> {
    let loss = loss_function(params.x(), params.r())?;
    lower_from_loss(loss, params)
}

/// Upper bound on the lost fraction; equals the Erlang loss with `r + 1`
/// servers when `q = 1`.
///
/// With `c = (r + 1) / (q floor((r + q) / q))` the bound is `c rho / (1 + c rho)`
/// where `rho = B / (1 - B)` are the blocking odds of `B = B(r + 1, x)`.
/// The recurrence gives `rho = x B(r, x) / (r + 1)` directly, so
/// `c rho = x B(r, x) / (q floor((r + q) / q))` with no subtraction from one.
pub fn upper_bound_gamma(params: &SystemParams) -> Result<f64> {
    Ok(upper_from_blocking(blocking(params.r(), params.x()), params))
}

pub(crate) fn upper_from_blocking(b_r: f64, params: &SystemParams) -> f64 {
    let scaled_odds = params.x() * b_r / params.cycle_stock() as f64;
    scaled_odds / (1.0 + scaled_odds)
}

/// Loss function, Erlang loss and both bounds for one system.
pub fn bounds(params: &SystemParams) -> Result<BoundsResult> {
    let x = params.x();
    let loss = loss_function(x, params.r())?;
    let erlang = erlang_loss(params.r() + 1, x)?;
    let lb = lower_from_loss(loss, params)?;
    let ub = clamp_probability(upper_bound_gamma(params)?, "upper bound")?;
    if lb > ub + CLAMP_SLACK {
        return Err(Error::Inconsistent(format!(
            "lower bound {lb} exceeds upper bound {ub} at r={}, q={}, x={x}",
            params.r(),
            params.q()
        )));
    }
    Ok(BoundsResult { loss, erlang, lb, ub })
}
