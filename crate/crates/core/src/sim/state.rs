use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// A replenishment order of `q` units in transit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutstandingOrder {
    pub delivery_epoch: f64,
}

/// Mutable state of one simulated (r, q) lost-sales system.
///
/// Time integrals are cumulative from `clock = 0`; callers difference
/// them to get window averages.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub clock: f64,
    pub on_hand: u64,
    /// Orders in placement order; delivery epochs are non-decreasing.
    pub pipeline: VecDeque<OutstandingOrder>,
    pub served: u64,
    pub lost: u64,
    pub orders_delivered: u64,
    pub initial_on_hand: u64,
    pub stockout_time: f64,
    pub level_integral: f64,
    pub pipeline_integral: f64,
    pub position_integral: f64,
}

/// Full position `r + q`, nothing on order.
pub fn initial_state(params: &SystemParams) -> SimState {
    let on_hand = params.r() + params.q();
    SimState {
        clock: 0.0,
        on_hand,
        pipeline: VecDeque::with_capacity(params.max_outstanding() as usize + 1),
        served: 0,
        lost: 0,
        orders_delivered: 0,
        initial_on_hand: on_hand,
        stockout_time: 0.0,
        level_integral: 0.0,
        pipeline_integral: 0.0,
        position_integral: 0.0,
    }
}

impl SimState {
    pub fn units_on_order(&self, q: u64) -> u64 {
        q * self.pipeline.len() as u64
    }

    /// On hand plus on order.
    pub fn position(&self, q: u64) -> u64 {
        self.on_hand + self.units_on_order(q)
    }

    /// Accumulates the piecewise-constant integrals up to `t` and moves the clock.
    pub(crate) fn advance_to(&mut self, t: f64, q: u64) {
        let dt = t - self.clock;
        debug_assert!(dt >= 0.0);
        let on_order = self.units_on_order(q) as f64;
        let level = self.on_hand as f64;
        self.level_integral += dt * level;
        self.pipeline_integral += dt * on_order;
        self.position_integral += dt * (level + on_order);
        if self.on_hand == 0 {
            self.stockout_time += dt;
        }
        self.clock = t;
    }

    fn violation(&self, what: String) -> Error {
        Error::InvariantViolation {
            clock: self.clock,
            what,
        }
    }

    /// Checks the position window, the pipeline length limit and stock conservation.
    pub fn check_invariants(&self, params: &SystemParams) -> Result<()> {
        let (r, q) = (params.r(), params.q());
        let pos = self.position(q);
        if pos <= r || pos > r + q {
            return Err(self.violation(format!("position {pos} outside ({r}, {}]", r + q)));
        }
        if self.pipeline.len() as u64 > params.max_outstanding() {
            return Err(self.violation(format!(
                "{} orders outstanding, at most {} possible",
                self.pipeline.len(),
                params.max_outstanding()
            )));
        }
        if self.on_hand == 0 && pos != params.cycle_stock() {
            return Err(self.violation(format!(
                "stocked out at position {pos}, expected {}",
                params.cycle_stock()
            )));
        }
        if self.initial_on_hand + q * self.orders_delivered != self.on_hand + self.served {
            return Err(self.violation(format!(
                "stock not conserved: {} + {q}*{} delivered != {} on hand + {} served",
                self.initial_on_hand, self.orders_delivered, self.on_hand, self.served
            )));
        }
        Ok(())
    }
}
