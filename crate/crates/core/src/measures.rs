//! Conversions among the long-run performance measures.
//!
//! All four measures are affine in the stockout fraction gamma:
//!
//! * `P = (1 - gamma) (r + (q + 1) / 2) + gamma q floor((r + q) / q)`
//! * `U = (1 - gamma) x`
//! * `L = P - U`
//!
//! so any one of them pins down the other three.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceMeasures {
    /// Long-run fraction of time with no stock on hand.
    pub gamma: f64,
    /// Long-run average on-hand inventory.
    pub l: f64,
    /// Long-run average inventory position.
    pub p: f64,
    /// Long-run average number of units on order.
    pub u: f64,
}

/// A measure other than gamma that can be inverted for gamma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    L,
    P,
    U,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::L, Measure::P, Measure::U];

    pub fn name(self) -> &'static str {
        match self {
            Measure::L => "L",
            Measure::P => "P",
            Measure::U => "U",
        }
    }

    pub fn of(self, m: &PerformanceMeasures) -> f64 {
        match self {
            Measure::L => m.l,
            Measure::P => m.p,
            Measure::U => m.u,
        }
    }

    /// Value of the measure at gamma = 0 and gamma = 1.
    fn endpoints(self, params: &SystemParams) -> (f64, f64) {
        let c = params.cycle_stock() as f64;
        let ladder = params.mean_ladder_position();
        match self {
            Measure::P => (ladder, c),
            Measure::U => (params.x(), 0.0),
            Measure::L => (ladder - params.x(), c),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" => Ok(Measure::L),
            "P" | "p" => Ok(Measure::P),
            "U" | "u" => Ok(Measure::U),
            other => Err(invalid("measure", format!("expected one of L, P, U; got {other:?}"))),
        }
    }
}

/// Average position as a function of gamma.
pub fn position_from_gamma(gamma: f64, params: &SystemParams) -> f64 {
    (1.0 - gamma) * params.mean_ladder_position() + gamma * params.cycle_stock() as f64
}

/// Average on-hand level as a function of gamma, written out directly
/// rather than as `P - U`.
pub fn level_from_gamma(gamma: f64, params: &SystemParams) -> f64 {
    (1.0 - gamma) * (params.mean_ladder_position() - params.x()) + gamma * params.cycle_stock() as f64
}

pub fn measures_from_gamma(gamma: f64, params: &SystemParams) -> Result<PerformanceMeasures> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::OutOfRange {
            measure: "gamma",
            value: gamma,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let p = position_from_gamma(gamma, params);
    let u = (1.0 - gamma) * params.x();
    Ok(PerformanceMeasures { gamma, l: p - u, p, u })
}

/// Inverts one measure for gamma.
///
/// `P` is constant in gamma exactly when `2 q floor((r + q) / q) = 2r + q + 1`,
/// which includes every `q = 1` system; such inputs return
/// [`Error::Degenerate`].
pub fn gamma_from_measure(which: Measure, value: f64, params: &SystemParams) -> Result<f64> {
    if !value.is_finite() {
        return Err(invalid("value", format!("{which} must be finite, got {value}")));
    }
    let (at0, at1) = which.endpoints(params);
    let degenerate = match which {
        Measure::P => 2 * params.cycle_stock() == 2 * params.r() + params.q() + 1,
        Measure::U => false,
        Measure::L => (at1 - at0).abs() <= 1e-14 * at0.abs().max(at1.abs()),
    };
    if degenerate {
        return Err(Error::Degenerate {
            measure: which.name(),
            value: at0,
        });
    }
    let (lo, hi) = if at0 <= at1 { (at0, at1) } else { (at1, at0) };
    let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    if value < lo - slack || value > hi + slack {
        return Err(Error::OutOfRange {
            measure: which.name(),
            value,
            lo,
            hi,
        });
    }
    let gamma = match which {
        Measure::U => 1.0 - value / params.x(),
        _ => (value - at0) / (at1 - at0),
    };
    Ok(gamma.clamp(0.0, 1.0))
}
