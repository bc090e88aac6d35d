//! Aggregate bound tables, the worst-gap sweep, simulation verification
//! grids and service-level targeting.

use crate::bounds::{bounds, upper_from_blocking, BoundsResult};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::params::SystemParams;
use crate::sim::{
    conditioned_level_check, simulate, validate_theorem1, IdentityCheck, SimConfig, SimEstimate, Theorem1Report,
};

pub const TABLE2_REORDER_POINTS: [u64; 10] = [2, 4, 8, 16, 32, 64, 128, 256, 512, 1024];
pub const TABLE2_K: [f64; 5] = [0.5, 0.75, 1.0, 1.5, 2.0];

/// Largest reorder point tried by [`search_min_r`].
pub const SEARCH_LIMIT: u64 = 1_000_000;

/// Bound aggregates over `q = 2..=r` at `x = K r`, in percent.
///
/// The labels follow the published table: `avg_ub_sl_pct` is the mean of
/// `1 - lb` (the service level from above, which comes from the *lower*
/// bound on the lost fraction) and `avg_lb_sl_pct` the mean of `1 - ub`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub r: u64,
    pub k: f64,
    pub avg_ub_sl_pct: f64,
    pub avg_lb_sl_pct: f64,
    pub avg_diff: f64,
    pub max_diff: f64,
    pub min_diff: f64,
}

impl AggregateRow {
    pub const FIELDS: [&'static str; 5] = ["avg_ub_sl_pct", "avg_lb_sl_pct", "avg_diff", "max_diff", "min_diff"];

    pub fn values(&self) -> [f64; 5] {
        [
            self.avg_ub_sl_pct,
            self.avg_lb_sl_pct,
            self.avg_diff,
            self.max_diff,
            self.min_diff,
        ]
    }
}

pub fn aggregate_row(r: u64, k: f64) -> Result<AggregateRow> {
    if r < 2 {
        return Err(invalid("r", "aggregates over q = 2..r need r >= 2"));
    }
    let x = k * r as f64;
    let mut sum_ub_sl = 0.0;
    let mut sum_lb_sl = 0.0;
    let mut sum_diff = 0.0;
    let mut max_diff = f64::NEG_INFINITY;
    let mut min_diff = f64::INFINITY;
    for q in 2..=r {
        let b = bounds(&SystemParams::from_lead_time_demand(r, q, x)?)?;
        let diff = 100.0 * b.gap();
        sum_ub_sl += 100.0 * b.service_level_upper();
        sum_lb_sl += 100.0 * b.service_level_lower();
        sum_diff += diff;
        max_diff = max_diff.max(diff);
        min_diff = min_diff.min(diff);
    }
    let n = (r - 1) as f64;
    Ok(AggregateRow {
        r,
        k,
        avg_ub_sl_pct: sum_ub_sl / n,
        avg_lb_sl_pct: sum_lb_sl / n,
        avg_diff: sum_diff / n,
        max_diff,
        min_diff,
    })
}

/// All 50 aggregate rows, ordered by `r` then `K`.
pub fn table2() -> Result<Vec<AggregateRow>> {
    table2_with(Execution::default())
}

pub fn table2_with(exec: Execution) -> Result<Vec<AggregateRow>> {
    let cells: Vec<(u64, f64)> = TABLE2_REORDER_POINTS
        .iter()
        .flat_map(|&r| TABLE2_K.iter().map(move |&k| (r, k)))
        .collect();
    exec.map(&cells, |&(r, k)| aggregate_row(r, k)).into_iter().collect()
}

const REFERENCE_TABLE2: &str = include_str!("../data/reference_table2.csv");

/// The published four-decimal values of the aggregate table.
pub fn reference_table2() -> Vec<AggregateRow> {
    REFERENCE_TABLE2
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('r'))
        .map(|line| {
            let f: Vec<f64> = line
                .split(',')
                .map(|v| v.parse().expect("reference table is numeric"))
                .collect();
            AggregateRow {
                r: f[0] as u64,
                k: f[1],
                avg_ub_sl_pct: f[2],
                avg_lb_sl_pct: f[3],
                avg_diff: f[4],
                max_diff: f[5],
                min_diff: f[6],
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub r: u64,
    pub k: f64,
    pub field: &'static str,
    pub computed: f64,
    pub reference: f64,
}

/// Every cell of `rows` that differs from the reference by more than `tol`.
/// A reference row with no computed counterpart is reported with a NaN value.
pub fn compare_with_reference(rows: &[AggregateRow], tol: f64) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for reference in reference_table2() {
        let computed = rows.iter().find(|row| row.r == reference.r && row.k == reference.k);
        let computed_values = computed.map_or([f64::NAN; 5], AggregateRow::values);
        for ((field, c), want) in AggregateRow::FIELDS
            .iter()
            .zip(computed_values)
            .zip(reference.values())
        {
            let within = (c - want).abs() <= tol;
            // NaN counts as a mismatch.
            if !within {
                out.push(Mismatch {
                    r: reference.r,
                    k: reference.k,
                    field,
                    computed: c,
                    reference: want,
                });
            }
        }
    }
    out
}

/// Sweep settings for the worst-gap curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure1Config {
    pub r_max: u64,
    pub k_min: f64,
    pub k_max: f64,
    pub k_step: f64,
}

impl Default for Figure1Config {
    fn default() -> Self {
        Self {
            r_max: 100,
            k_min: 0.5,
            k_max: 1.5,
            k_step: 0.01,
        }
    }
}

impl Figure1Config {
    pub fn validate(&self) -> Result<()> {
        if self.r_max < 2 {
            return Err(invalid("r_max", "must be at least 2"));
        }
        if !(self.k_min.is_finite() && self.k_min > 0.0) {
            return Err(invalid("k_min", "must be positive"));
        }
        if !(self.k_max.is_finite() && self.k_max >= self.k_min) {
            return Err(invalid("k_max", "must be at least k_min"));
        }
        if !(self.k_step.is_finite() && self.k_step > 0.0) {
            return Err(invalid("k_step", "must be positive"));
        }
        Ok(())
    }

    /// `K_i = k_min + i k_step` for integer `i`, up to `k_max`, snapped to
    /// 12 decimals so 1.2 prints as 1.2.
    pub fn k_values(&self) -> Vec<f64> {
        let steps = ((self.k_max - self.k_min) / self.k_step + 1e-9).floor() as u64;
        (0..=steps)
            .map(|i| ((self.k_min + i as f64 * self.k_step) * 1e12).round() / 1e12)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigurePoint {
    pub r: u64,
    /// Largest `ub - lb` over the whole `(K, q)` sub-grid.
    pub worst_gap: f64,
    /// Where the worst gap occurs.
    pub worst_k: f64,
    pub worst_q: u64,
}

pub fn figure1(config: &Figure1Config, exec: Execution) -> Result<Vec<FigurePoint>> {
    config.validate()?;
    let ks = config.k_values();
    let rs: Vec<u64> = (2..=config.r_max).collect();
    exec.map(&rs, |&r| {
        let mut best = FigurePoint {
            r,
            worst_gap: f64::NEG_INFINITY,
            worst_k: f64::NAN,
            worst_q: 0,
        };
        for &k in &ks {
            let x = k * r as f64;
            for q in 2..=r {
                let gap = bounds(&SystemParams::from_lead_time_demand(r, q, x)?)?.gap();
                if gap > best.worst_gap {
                    best = FigurePoint {
                        r,
                        worst_gap: gap,
                        worst_k: k,
                        worst_q: q,
                    };
                }
            }
        }
        Ok(best)
    })
    .into_iter()
    .collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-cell seed: SplitMix64 chained over the root seed and the cell's
/// coordinates.
pub fn derive_seed(root: u64, coordinates: &[u64]) -> u64 {
    coordinates
        .iter()
        .fold(splitmix64(root), |h, &c| splitmix64(h ^ c))
}

/// Simulation configs for the product grid `rs x qs x ks` with `x = K r`,
/// unit lead time, and seeds derived from `(root_seed, r, q, K index)`.
pub fn simulation_grid(rs: &[u64], qs: &[u64], ks: &[f64], n_demands: u64, root_seed: u64) -> Result<Vec<SimConfig>> {
    let mut grid = Vec::with_capacity(rs.len() * qs.len() * ks.len());
    for &r in rs {
        for &q in qs {
            for (ki, &k) in ks.iter().enumerate() {
                let params = SystemParams::new(r, q, k * r as f64, 1.0)?;
                let seed = derive_seed(root_seed, &[r, q, ki as u64]);
                grid.push(SimConfig::new(params, n_demands, seed));
            }
        }
    }
    Ok(grid)
}

/// Whether the simulated lost fraction lies in `[lb - k hw, ub + k hw]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketCheck {
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellChecks {
    pub estimate: SimEstimate,
    pub bounds: BoundsResult,
    pub bracket: BracketCheck,
    /// Lost fraction against the Erlang loss, when `q = 1`.
    pub erlang_equality: Option<IdentityCheck>,
    /// Lost fraction against the lower bound, when `r < q`.
    pub lower_equality: Option<IdentityCheck>,
    pub theorem1: Theorem1Report,
    /// Conditioned on-hand level, when `q = 1`.
    pub conditioned_level: Option<IdentityCheck>,
}

impl CellChecks {
    pub fn passed(&self) -> bool {
        self.bracket.passed
            && self.erlang_equality.as_ref().is_none_or(|c| c.passed)
            && self.lower_equality.as_ref().is_none_or(|c| c.passed)
            && self.conditioned_level.as_ref().is_none_or(|c| c.passed)
            && self.theorem1.passed()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub config: SimConfig,
    /// A simulation error is recorded here rather than aborting the grid.
    pub outcome: std::result::Result<CellChecks, Error>,
}

impl CellReport {
    pub fn passed(&self) -> bool {
        self.outcome.as_ref().is_ok_and(CellChecks::passed)
    }
}

pub fn check_cell(config: &SimConfig, k_sigma: f64) -> Result<CellChecks> {
    let params = &config.params;
    let estimate = simulate(config)?;
    let b = bounds(params)?;
    let spread = k_sigma * estimate.half_widths.gamma_lost;
    let g = estimate.gamma_lost;
    let lower_margin = g - (b.lb - spread);
    let upper_margin = (b.ub + spread) - g;
    let bracket = BracketCheck {
        lower_margin,
        upper_margin,
        passed: lower_margin >= 0.0 && upper_margin >= 0.0,
    };
    let hw = estimate.half_widths.gamma_lost;
    let erlang_equality =
        (params.q() == 1).then(|| IdentityCheck::compare("erlang_equality", g, b.erlang, hw, k_sigma));
    let lower_equality =
        (params.r() < params.q()).then(|| IdentityCheck::compare("lower_equality", g, b.lb, hw, k_sigma));
    let conditioned_level = if params.q() == 1 {
        Some(conditioned_level_check(&estimate, params, k_sigma)?)
    } else {
        None
    };
    let theorem1 = validate_theorem1(&estimate, params, k_sigma);
    Ok(CellChecks {
        estimate,
        bounds: b,
        bracket,
        erlang_equality,
        lower_equality,
        theorem1,
        conditioned_level,
    })
}

/// Simulates every config and checks it against the bounds and identities.
pub fn verify_grid(grid: &[SimConfig], k_sigma: f64, exec: Execution) -> Vec<CellReport> {
    exec.map(grid, |config| CellReport {
        config: *config,
        outcome: check_cell(config, k_sigma),
    })
}

/// Smallest reorder point whose guaranteed lost fraction (the upper bound)
/// is at most `target`.
pub fn search_min_r(q: u64, x: f64, target: f64) -> Result<u64> {
    if q == 0 {
        return Err(invalid("q", "order quantity must be at least 1"));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(invalid("target", format!("must lie in (0, 1), got {target}")));
    }
    // Validates x.
    SystemParams::from_lead_time_demand(0, q, x)?;

    // Walk r upward carrying the Erlang recurrence B(r, x).
    let mut blocking = 1.0;
    let mut previous = f64::INFINITY;
    for r in 0..=SEARCH_LIMIT {
        let params = SystemParams::from_lead_time_demand(r, q, x)?;
        let ub = upper_from_blocking(blocking, &params);
        if ub > previous * (1.0 + 1e-12) {
            return Err(Error::Inconsistent(format!(
                "upper bound increased from {previous} to {ub} at r = {r}"
            )));
        }
        if ub <= target {
            return Ok(r);
        }
        previous = ub;
        let xb = x * blocking;
        blocking = xb / ((r + 1) as f64 + xb);
    }
    Err(Error::UnreachableTarget {
        target,
        limit: SEARCH_LIMIT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::upper_bound_gamma;

    #[test]
    fn smallest_row() {
        let row = aggregate_row(2, 0.5).unwrap();
        assert!((row.avg_ub_sl_pct - 97.4745).abs() < 5e-5);
        assert!((row.avg_lb_sl_pct - 95.2381).abs() < 5e-5);
        assert_eq!(row.avg_diff, row.max_diff);
        assert_eq!(row.min_diff, row.max_diff);
        assert!(aggregate_row(1, 0.5).is_err());
    }

    #[test]
    fn reference_table_shape() {
        let t = reference_table2();
        assert_eq!(t.len(), 50);
        assert_eq!(t[12].r, 8);
        assert_eq!(t[12].k, 1.0);
        assert_eq!(t[12].max_diff, 6.2760);
    }

    #[test]
    fn comparison_flags_missing_and_wrong_cells() {
        let mut rows = reference_table2();
        rows[0].avg_diff += 0.01;
        rows.pop();
        let bad = compare_with_reference(&rows, 1e-4);
        assert_eq!(bad.len(), 6);
        assert_eq!(bad[0].field, "avg_diff");
        assert!(bad[1..].iter().all(|m| m.r == 1024 && m.computed.is_nan()));
    }

    #[test]
    fn k_grid_is_exact() {
        let ks = Figure1Config::default().k_values();
        assert_eq!(ks.len(), 101);
        assert_eq!(ks[0], 0.5);
        assert!((ks[100] - 1.5).abs() < 1e-12);
        assert!((ks[50] - 1.0).abs() < 1e-15);
        let single = Figure1Config {
            k_min: 1.0,
            k_max: 1.0,
            ..Default::default()
        };
        assert_eq!(single.k_values(), vec![1.0]);
    }

    #[test]
    fn figure_config_validation() {
        let bad = Figure1Config {
            k_step: 0.0,
            ..Default::default()
        };
        assert!(figure1(&bad, Execution::Serial).is_err());
        let bad = Figure1Config {
            r_max: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn r2_point_is_max_over_k_of_single_q() {
        let cfg = Figure1Config {
            r_max: 2,
            ..Default::default()
        };
        let pts = figure1(&cfg, Execution::Serial).unwrap();
        assert_eq!(pts.len(), 1);
        let direct = cfg
            .k_values()
            .iter()
            .map(|&k| {
                bounds(&SystemParams::from_lead_time_demand(2, 2, 2.0 * k).unwrap())
                    .unwrap()
                    .gap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(pts[0].worst_gap, direct);
        assert_eq!(pts[0].worst_q, 2);
    }

    #[test]
    fn seeds_depend_on_every_coordinate() {
        let a = derive_seed(1, &[2, 2, 0]);
        assert_ne!(a, derive_seed(2, &[2, 2, 0]));
        assert_ne!(a, derive_seed(1, &[2, 3, 0]));
        assert_ne!(a, derive_seed(1, &[2, 2, 1]));
        assert_eq!(a, derive_seed(1, &[2, 2, 0]));
    }

    #[test]
    fn grid_layout() {
        let g = simulation_grid(&[2, 4], &[1, 3], &[0.5, 1.0, 2.0], 5000, 9).unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!(g[5].params.r(), 2);
        assert_eq!(g[5].params.q(), 3);
        assert_eq!(g[5].params.x(), 4.0);
        assert_eq!(g[5].seed, derive_seed(9, &[2, 3, 2]));
    }

    #[test]
    fn search_examples() {
        assert_eq!(search_min_r(1, 1.0, 0.5).unwrap(), 0);
        assert_eq!(search_min_r(2, 1.0, 1.0 / 21.0 + 1e-9).unwrap(), 2);
        // 0.047619 is 1/21 truncated, so r = 2 just misses it.
        assert_eq!(search_min_r(2, 1.0, 0.047619 + 1e-9).unwrap(), 3);
        assert_eq!(search_min_r(5, 1e-9, 0.01).unwrap(), 0);
    }

    #[test]
    fn search_result_is_tight() {
        for &(q, x, target) in &[(3u64, 10.0, 0.05), (1, 25.0, 0.01), (7, 4.0, 0.001), (2, 100.0, 0.2)] {
            let r = search_min_r(q, x, target).unwrap();
            let ub = |r| upper_bound_gamma(&SystemParams::from_lead_time_demand(r, q, x).unwrap()).unwrap();
            assert!(ub(r) <= target);
            if r > 0 {
                assert!(ub(r - 1) > target, "q={q} x={x} r={r}");
            }
        }
    }

    #[test]
    fn search_rejects_bad_input() {
        assert!(search_min_r(0, 1.0, 0.1).is_err());
        assert!(search_min_r(1, 1.0, 1.0).is_err());
        assert!(search_min_r(1, 0.0, 0.1).is_err());
        assert!(matches!(
            search_min_r(1, 1e9, 1e-300),
            Err(Error::UnreachableTarget { .. })
        ));
    }
}
