use crate::error::{invalid, Result};

/// One (r, q) lost-sales system: reorder point, order quantity, Poisson
/// demand rate and constant lead time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    r: u64,
    q: u64,
    lambda: f64,
    tau: f64,
    x: f64,
}

impl SystemParams {
    pub fn new(r: u64, q: u64, lambda: f64, tau: f64) -> Result<Self> {
        if q == 0 {
            return Err(invalid("q", "order quantity must be at least 1"));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(invalid("lambda", format!("demand rate must be positive and finite, got {lambda}")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid("tau", format!("lead time must be positive and finite, got {tau}")));
        }
        let x = lambda * tau;
        if !(x.is_finite() && x > 0.0) {
            return Err(invalid("x", format!("lead-time demand {x} is not a positive finite number")));
        }
        Ok(Self { r, q, lambda, tau, x })
    }

    /// Parameters given directly by the mean lead-time demand, with unit
    /// lead time (`lambda = x`, `tau = 1`).
    pub fn from_lead_time_demand(r: u64, q: u64, x: f64) -> Result<Self> {
        Self::new(r, q, x, 1.0)
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Mean lead-time demand `lambda * tau`.
    pub fn x(&self) -> f64 {
        self.x
    }

    /// Maximum number of simultaneously outstanding orders, `floor((r + q) / q)`.
    pub fn max_outstanding(&self) -> u64 {
        (self.r + self.q) / self.q
    }

    /// `q * floor((r + q) / q)`: the inventory position whenever on-hand
    /// stock is zero. Always in `(r, r + q]`.
    pub fn cycle_stock(&self) -> u64 {
        self.q * self.max_outstanding()
    }

    /// Mean of the position ladder `r+1, ..., r+q`, i.e. `r + (q + 1) / 2`.
    pub fn mean_ladder_position(&self) -> f64 {
        self.r as f64 + (self.q as f64 + 1.0) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(SystemParams::new(2, 0, 1.0, 1.0).is_err());
        assert!(SystemParams::new(2, 2, 0.0, 1.0).is_err());
        assert!(SystemParams::new(2, 2, 1.0, -1.0).is_err());
        assert!(SystemParams::new(2, 2, f64::NAN, 1.0).is_err());
        assert!(SystemParams::new(2, 2, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn x_is_product() {
        let p = SystemParams::new(3, 2, 0.3, 7.0).unwrap();
        assert_eq!(p.x(), 0.3 * 7.0);
    }

    #[test]
    fn cycle_stock_window() {
        for r in 0..200u64 {
            for q in 1..=r + 5 {
                let p = SystemParams::from_lead_time_demand(r, q, 1.0).unwrap();
                let c = p.cycle_stock();
                assert!(r < c && c <= r + q, "r={r} q={q} c={c}");
                assert_eq!(c % q, 0);
            }
        }
        let p = SystemParams::from_lead_time_demand(2, 2, 1.0).unwrap();
        assert_eq!(p.cycle_stock(), 4);
        assert_eq!(p.mean_ladder_position(), 3.5);
    }
}
