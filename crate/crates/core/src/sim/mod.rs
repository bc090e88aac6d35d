//! Discrete-event simulation of the (r, q) lost-sales system.
//!
//! Demand arrives one unit at a time as a Poisson process; a demand that
//! finds the shelf empty is lost. Each time a served demand brings the
//! position down to `r`, an order for `q` units is placed and arrives
//! exactly `tau` later. Orders cannot cross, so the pipeline is a FIFO queue.
//!
//! Randomness comes from ChaCha8 seeded through `SeedableRng::seed_from_u64`;
//! inter-arrival times are `-ln(1 - U) / lambda` with `U` built from the top
//! 53 bits of one 64-bit output. A run is a pure function of its config.

mod batch;
mod state;
mod validate;

pub use batch::{half_width, t_critical_95, BatchTotals};
pub use state::{initial_state, OutstandingOrder, SimState};
pub use validate::{conditioned_level_check, validate_theorem1, IdentityCheck, Theorem1Report};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::params::SystemParams;

pub const DEFAULT_BATCHES: usize = 32;
pub const MIN_BATCHES: usize = 10;
pub const MIN_BATCH_DEMANDS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: SystemParams,
    /// Arrivals measured after warm-up.
    pub n_demands: u64,
    /// Arrivals discarded before measurement starts.
    pub warmup_demands: u64,
    pub n_batches: usize,
    pub seed: u64,
}

impl SimConfig {
    /// Config with the default warm-up `max(10 (r + q), 10^4)` and 32 batches.
    pub fn new(params: SystemParams, n_demands: u64, seed: u64) -> Self {
        Self {
            params,
            n_demands,
            warmup_demands: default_warmup(&params),
            n_batches: DEFAULT_BATCHES,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_batches < MIN_BATCHES {
            return Err(invalid(
                "n_batches",
                format!("need at least {MIN_BATCHES} batches, got {}", self.n_batches),
            ));
        }
        if self.n_demands < self.n_batches as u64 * MIN_BATCH_DEMANDS {
            return Err(invalid(
                "n_demands",
                format!(
                    "{} demands cannot fill {} batches of {MIN_BATCH_DEMANDS}",
                    self.n_demands, self.n_batches
                ),
            ));
        }
        Ok(())
    }
}

pub fn default_warmup(params: &SystemParams) -> u64 {
    (10 * (params.r() + params.q())).max(10_000)
}

/// 95% batch-means half-widths for each estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HalfWidths {
    pub gamma_time: f64,
    pub gamma_lost: f64,
    pub l: f64,
    pub u: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    /// Fraction of measured time with nothing on hand.
    pub gamma_time: f64,
    /// Fraction of measured demands that were lost.
    pub gamma_lost: f64,
    /// Time-average on-hand level.
    pub l_hat: f64,
    /// Time-average units on order.
    pub u_hat: f64,
    /// Time-average inventory position.
    pub p_hat: f64,
    pub half_widths: HalfWidths,
    pub demands_observed: u64,
    pub lost: u64,
    /// Length of the measurement window.
    pub duration: f64,
    pub batches: Vec<BatchTotals>,
}

impl SimEstimate {
    /// Builds point estimates from whole-window totals and half-widths from
    /// the spread of per-batch averages.
    pub fn from_batches(batches: Vec<BatchTotals>) -> Self {
        let mut total = BatchTotals::default();
        for b in &batches {
            total.merge(b);
        }
        let t = t_critical_95(batches.len());
        let hw = |f: fn(&BatchTotals) -> f64| {
            let v: Vec<f64> = batches.iter().map(f).collect();
            half_width(&v, t)
        };
        let half_widths = HalfWidths {
            gamma_time: hw(BatchTotals::gamma_time),
            gamma_lost: hw(BatchTotals::gamma_lost),
            l: hw(BatchTotals::level),
            u: hw(BatchTotals::on_order),
            p: hw(BatchTotals::position),
        };
        Self {
            gamma_time: total.gamma_time(),
            gamma_lost: total.gamma_lost(),
            l_hat: total.level(),
            u_hat: total.on_order(),
            p_hat: total.position(),
            half_widths,
            demands_observed: total.demands(),
            lost: total.lost,
            duration: total.duration,
            batches,
        }
    }
}

fn unit_interval(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn exponential(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    -(-unit_interval(rng)).ln_1p() / rate
}

/// Cumulative quantities of a state, used to difference batch windows.
#[derive(Debug, Clone, Copy)]
struct Snapshot {
    clock: f64,
    stockout_time: f64,
    level_integral: f64,
    pipeline_integral: f64,
    position_integral: f64,
    served: u64,
    lost: u64,
}

impl Snapshot {
    fn of(s: &SimState) -> Self {
        Self {
            clock: s.clock,
            stockout_time: s.stockout_time,
            level_integral: s.level_integral,
            pipeline_integral: s.pipeline_integral,
            position_integral: s.position_integral,
            served: s.served,
            lost: s.lost,
        }
    }

    fn since(&self, start: &Snapshot) -> BatchTotals {
        BatchTotals {
            duration: self.clock - start.clock,
            stockout_time: self.stockout_time - start.stockout_time,
            level_integral: self.level_integral - start.level_integral,
            pipeline_integral: self.pipeline_integral - start.pipeline_integral,
            position_integral: self.position_integral - start.position_integral,
            served: self.served - start.served,
            lost: self.lost - start.lost,
        }
    }
}

/// Event loop over demand arrivals and order deliveries.
struct Run {
    params: SystemParams,
    state: SimState,
    rng: ChaCha8Rng,
    next_arrival: f64,
}

impl Run {
    fn new(config: &SimConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let next_arrival = exponential(&mut rng, config.params.lambda());
        Self {
            params: config.params,
            state: initial_state(&config.params),
            rng,
            next_arrival,
        }
    }

    /// Processes every delivery due up to and including the next arrival
    /// epoch, then the arrival itself.
    fn step(&mut self) -> Result<()> {
        let q = self.params.q();
        while let Some(order) = self.state.pipeline.front().copied() {
            // On a tie the delivery goes first and can serve the arrival.
            if order.delivery_epoch > self.next_arrival {
                break;
            }
            self.state.advance_to(order.delivery_epoch, q);
            self.state.pipeline.pop_front();
            self.state.on_hand += q;
            self.state.orders_delivered += 1;
            self.state.check_invariants(&self.params)?;
        }

        self.state.advance_to(self.next_arrival, q);
        if self.state.on_hand == 0 {
            self.state.lost += 1;
        } else {
            self.state.on_hand -= 1;
            self.state.served += 1;
            if self.state.position(q) == self.params.r() {
                let delivery_epoch = self.state.clock + self.params.tau();
                if let Some(last) = self.state.pipeline.back() {
                    if last.delivery_epoch > delivery_epoch {
                        return Err(Error::InvariantViolation {
                            clock: self.state.clock,
                            what: format!(
                                "order due at {delivery_epoch} would overtake one due at {}",
                                last.delivery_epoch
                            ),
                        });
                    }
                }
                self.state.pipeline.push_back(OutstandingOrder { delivery_epoch });
            }
            self.state.check_invariants(&self.params)?;
        }
        self.next_arrival += exponential(&mut self.rng, self.params.lambda());
        Ok(())
    }
}

/// Runs one replication and returns its estimates.
pub fn simulate(config: &SimConfig) -> Result<SimEstimate> {
    config.validate()?;
    let mut run = Run::new(config);
    for _ in 0..config.warmup_demands {
        run.step()?;
    }

    let n_batches = config.n_batches as u64;
    let base = config.n_demands / n_batches;
    let extra = config.n_demands % n_batches;
    let mut batches = Vec::with_capacity(config.n_batches);
    let mut start = Snapshot::of(&run.state);
    for j in 0..n_batches {
        let size = base + u64::from(j < extra);
        for _ in 0..size {
            run.step()?;
        }
        let end = Snapshot::of(&run.state);
        batches.push(end.since(&start));
        start = end;
    }
    Ok(SimEstimate::from_batches(batches))
}
