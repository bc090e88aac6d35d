//! Guaranteed bounds on the fraction of demand lost by an (r, q)
//! continuous-review inventory system with unit Poisson demand, lost sales
//! and a constant lead time, plus an event-driven simulator that checks
//! them.
//!
//! ```
//! use lostsales::{bounds, SystemParams};
//!
//! let params = SystemParams::from_lead_time_demand(2, 2, 1.0).unwrap();
//! let b = bounds(&params).unwrap();
//! assert!(b.lb <= b.ub);
//! assert!((b.ub - 1.0 / 21.0).abs() < 1e-15);
//! ```

pub mod bounds;
pub mod erlang;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod measures;
pub mod params;
pub mod poisson;
pub mod report;
pub mod sim;

pub use bounds::{bounds, lower_bound_gamma, upper_bound_gamma, BoundsResult};
pub use erlang::erlang_loss;
pub use error::{Error, Result};
pub use exec::Execution;
pub use measures::{gamma_from_measure, measures_from_gamma, Measure, PerformanceMeasures};
pub use params::SystemParams;
pub use poisson::loss_function;
pub use sim::{simulate, SimConfig, SimEstimate};
