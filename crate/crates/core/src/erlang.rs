//! Erlang loss (Erlang B) blocking probability.

use crate::error::{invalid, Result};

/// Runs the blocking recurrence `B(0) = 1`, `B(n) = x B(n-1) / (n + x B(n-1))`
/// up to `n = servers`. Accepts `servers = 0`.
pub(crate) fn blocking(servers: u64, x: f64) -> f64 {
    let mut b = 1.0;
    for n in 1..=servers {
        let xb = x * b;
        b = xb / (n as f64 + xb);
    }
    b
}

/// Blocking probability of an M/G/s/s loss system with offered load `x`:
/// `(x^s / s!) / sum_{k=0}^{s} x^k / k!`.
pub fn erlang_loss(servers: u64, x: f64) -> Result<f64> {
    if servers == 0 {
        return Err(invalid("servers", "need at least one server"));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(invalid("x", format!("offered load must be finite and non-negative, got {x}")));
    }
    Ok(blocking(servers, x))
}
