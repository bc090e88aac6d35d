//! Batch-means confidence intervals.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Time integrals and counts over one batch of arrivals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BatchTotals {
    pub duration: f64,
    pub stockout_time: f64,
    pub level_integral: f64,
    pub pipeline_integral: f64,
    pub position_integral: f64,
    pub served: u64,
    pub lost: u64,
}

impl BatchTotals {
    pub fn demands(&self) -> u64 {
        self.served + self.lost
    }

    pub fn gamma_time(&self) -> f64 {
        self.stockout_time / self.duration
    }

    pub fn gamma_lost(&self) -> f64 {
        self.lost as f64 / self.demands() as f64
    }

    pub fn level(&self) -> f64 {
        self.level_integral / self.duration
    }

    pub fn on_order(&self) -> f64 {
        self.pipeline_integral / self.duration
    }

    pub fn position(&self) -> f64 {
        self.position_integral / self.duration
    }

    pub fn merge(&mut self, other: &BatchTotals) {
        self.duration += other.duration;
        self.stockout_time += other.stockout_time;
        self.level_integral += other.level_integral;
        self.pipeline_integral += other.pipeline_integral;
        self.position_integral += other.position_integral;
        self.served += other.served;
        self.lost += other.lost;
    }
}

/// Two-sided 95% Student-t critical value with `n - 1` degrees of freedom.
pub fn t_critical_95(n: usize) -> f64 {
    assert!(n >= 2, "need at least two batches");
    StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975)
}

/// 95% half-width of the mean of `values` treated as independent batch means.
pub fn half_width(values: &[f64], t_crit: f64) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let var = ss / (n - 1.0);
    t_crit * (var / n).sqrt()
}
