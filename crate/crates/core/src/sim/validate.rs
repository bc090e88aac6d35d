//! Statistical checks of the exact long-run identities against simulated averages.

use super::SimEstimate;
use crate::erlang::blocking;
use crate::error::{invalid, Result};
use crate::measures::{level_from_gamma, position_from_gamma};
use crate::params::SystemParams;

/// One identity compared against simulation output.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub observed: f64,
    pub predicted: f64,
    /// `|observed - predicted|`.
    pub discrepancy: f64,
    /// `k_sigma` times the root-sum-square of the half-widths involved.
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    /// Passes when `|observed - predicted| <= k_sigma * combined_hw`.
    pub fn compare(name: &'static str, observed: f64, predicted: f64, combined_hw: f64, k_sigma: f64) -> Self {
        let discrepancy = (observed - predicted).abs();
        // Rounding floor for runs where every half-width is exactly zero.
        let floor = 1e-12 * observed.abs().max(predicted.abs()).max(1.0);
        let tolerance = k_sigma * combined_hw + floor;
        Self {
            name,
            observed,
            predicted,
            discrepancy,
            tolerance,
            passed: discrepancy <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report {
    pub checks: Vec<IdentityCheck>,
}

impl Theorem1Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn rss(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// Compares the simulated averages with the values the exact identities
/// predict from the simulated stockout fraction:
///
/// * `on_order`: `U = (1 - gamma) x`
/// * `position`: `P = (1 - gamma)(r + (q + 1)/2) + gamma q floor((r + q)/q)`
/// * `level`: `L = (1 - gamma)(r + (q + 1)/2 - x) + gamma q floor((r + q)/q)`
/// * `pasta`: time-stockout fraction equals lost-demand fraction
pub fn validate_theorem1(estimate: &SimEstimate, params: &SystemParams, k_sigma: f64) -> Theorem1Report {
    let hw = &estimate.half_widths;
    let g = estimate.gamma_time;
    let x = params.x();
    let c = params.cycle_stock() as f64;
    let ladder = params.mean_ladder_position();

    // Each prediction is affine in gamma; its half-width is |slope| * hw_gamma.
    let u_pred_hw = x * hw.gamma_time;
    let p_pred_hw = (c - ladder).abs() * hw.gamma_time;
    let l_pred_hw = (c - ladder + x).abs() * hw.gamma_time;

    let checks = vec![
        IdentityCheck::compare("on_order", estimate.u_hat, (1.0 - g) * x, rss(hw.u, u_pred_hw), k_sigma),
        IdentityCheck::compare(
            "position",
            estimate.p_hat,
            position_from_gamma(g, params),
            rss(hw.p, p_pred_hw),
            k_sigma,
        ),
        IdentityCheck::compare(
            "level",
            estimate.l_hat,
            level_from_gamma(g, params),
            rss(hw.l, l_pred_hw),
            k_sigma,
        ),
        IdentityCheck::compare(
            "pasta",
            estimate.gamma_time,
            estimate.gamma_lost,
            rss(hw.gamma_time, hw.gamma_lost),
            k_sigma,
        ),
    ];
    Theorem1Report { checks }
}

/// For `q = 1`, the average level while stock is on hand,
/// `L / (1 - gamma)`, against `(r + 1 - x) + (r + 1) B / (1 - B)` with
/// `B` the Erlang loss for `r + 1` servers.
pub fn conditioned_level_check(estimate: &SimEstimate, params: &SystemParams, k_sigma: f64) -> Result<IdentityCheck> {
    if params.q() != 1 {
        return Err(invalid("q", "the conditioned-level closed form needs q = 1"));
    }
    let r1 = params.r() as f64 + 1.0;
    let x = params.x();
    // (r + 1) B(r+1) / (1 - B(r+1)) = x B(r), the blocking odds scaled.
    let predicted = r1 - x + x * blocking(params.r(), x);

    let up = 1.0 - estimate.gamma_time;
    let observed = estimate.l_hat / up;
    let hw = &estimate.half_widths;
    let ratio_hw = rss(hw.l / up, estimate.l_hat * hw.gamma_time / (up * up));
    Ok(IdentityCheck::compare("conditioned_level", observed, predicted, ratio_hw, k_sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::HalfWidths;

    fn hand_built(gamma_time: f64, u_hat: f64) -> SimEstimate {
        SimEstimate {
            gamma_time,
            gamma_lost: gamma_time,
            l_hat: 1.0,
            u_hat,
            p_hat: 1.0 + u_hat,
            half_widths: HalfWidths {
                gamma_time: 0.001,
                gamma_lost: 0.001,
                l: 0.001,
                u: 0.001,
                p: 0.001,
            },
            demands_observed: 1000,
            lost: 0,
            duration: 1000.0,
            batches: Vec::new(),
        }
    }

    #[test]
    fn inconsistent_pipeline_fails() {
        let params = SystemParams::from_lead_time_demand(2, 2, 1.0).unwrap();
        let report = validate_theorem1(&hand_built(0.5, params.x()), &params, 3.0);
        let check = report.get("on_order").unwrap();
        assert!(!check.passed);
        assert!((check.discrepancy - 0.5).abs() < 1e-15);
        assert!(!report.passed());
    }

    #[test]
    fn conditioned_level_requires_unit_orders() {
        let params = SystemParams::from_lead_time_demand(2, 2, 1.0).unwrap();
        assert!(conditioned_level_check(&hand_built(0.1, 0.9), &params, 3.0).is_err());
    }

    #[test]
    fn conditioned_level_prediction() {
        // r = 3, x = 2: B(4, 2) = 2/21, so the closed form is 2 + 4 * (2/21)/(19/21).
        let params = SystemParams::from_lead_time_demand(3, 1, 2.0).unwrap();
        let check = conditioned_level_check(&hand_built(0.1, 0.9), &params, 3.0).unwrap();
        assert!((check.predicted - (2.0 + 8.0 / 19.0)).abs() < 1e-14);
    }
}
