//! Poisson probabilities and the inventory loss function.
//!
//! Single probabilities use Loader's saddle-point form
//! `ln p(k) = -stirlerr(k) - bd0(k, x) - ln(2 pi k) / 2`, which keeps full
//! relative precision far into both tails. Sums are generated from one such
//! anchor by the multiplicative recurrence `p(k+1) = p(k) x / (k+1)` and
//! accumulated with compensated summation, always in the direction of
//! decreasing terms so every partial sum is of positive quantities.

use crate::error::{invalid, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// Relative size below which the remaining terms of a tail are dropped.
const TAIL_EPS: f64 = 1e-18;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `ln(n!) - [(n + 1/2) ln n - n + ln(2 pi) / 2]`, the error of Stirling's
/// approximation. Requires `n >= 1`.
fn stirlerr(n: u64) -> f64 {
    debug_assert!(n >= 1);
    if n <= 15 {
        // n! is exact in f64 up to 22!, so ln(n!) is correctly rounded.
        let fact: f64 = (1..=n).map(|i| i as f64).product();
        let nf = n as f64;
        return fact.ln() - ((nf + 0.5) * nf.ln() - nf + HALF_LN_2PI);
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let nf = n as f64;
    let nn = nf * nf;
    (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
}

/// Deviance term `k ln(k / x) + x - k`, evaluated without cancellation when
/// `k` is close to `x`.
fn bd0(k: f64, x: f64) -> f64 {
    if (k - x).abs() < 0.1 * (k + x) {
        let v = (k - x) / (k + x);
        let v2 = v * v;
        let mut s = (k - x) * v;
        let mut ej = 2.0 * k * v;
        let mut j = 1.0;
        loop {
            ej *= v2;
            let next = s + ej / (2.0 * j + 1.0);
            if next == s {
                return s;
            }
            s = next;
            j += 1.0;
        }
    }
    k * (k / x).ln() + x - k
}

/// Natural log of the Poisson(x) probability mass at `k`, for `x > 0`.
pub fn ln_pmf(x: f64, k: u64) -> f64 {
    debug_assert!(x > 0.0);
    if k == 0 {
        return -x;
    }
    let kf = k as f64;
    -stirlerr(k) - bd0(kf, x) - HALF_LN_2PI - 0.5 * kf.ln()
}

/// Poisson(x) probability mass at `k`; `x = 0` is the point mass at zero.
pub fn pmf(x: f64, k: u64) -> f64 {
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    ln_pmf(x, k).exp()
}

fn check_mean(x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(invalid("x", format!("mean demand must be finite and non-negative, got {x}")));
    }
    Ok(())
}

/// Sums `weight(k) * p(k)` for `k = start, start+1, ...` where the terms
/// are decreasing (`start > x`).
fn sweep_up(x: f64, start: u64, weight: impl Fn(u64) -> f64) -> f64 {
    let mut p = pmf(x, start);
    let mut acc = CompensatedSum::default();
    let mut k = start;
    while p > 0.0 {
        let term = weight(k) * p;
        acc.add(term);
        if term <= TAIL_EPS * acc.value() {
            break;
        }
        k += 1;
        p *= x / k as f64;
    }
    acc.value()
}

/// Sums `weight(k) * p(k)` for `k = start, start-1, ..., 0` where
/// `start < x` so the terms shrink going down.
fn sweep_down(x: f64, start: u64, weight: impl Fn(u64) -> f64) -> f64 {
    let mut p = pmf(x, start);
    let mut acc = CompensatedSum::default();
    let mut k = start;
    while p > 0.0 {
        let term = weight(k) * p;
        acc.add(term);
        if k == 0 || term <= TAIL_EPS * acc.value() {
            break;
        }
        p *= k as f64 / x;
        k -= 1;
    }
    acc.value()
}

/// `P(X >= n)` for `X ~ Poisson(x)`.
pub fn upper_tail(x: f64, n: u64) -> Result<f64> {
    check_mean(x)?;
    if n == 0 {
        return Ok(1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if n as f64 > x {
        Ok(sweep_up(x, n, |_| 1.0).min(1.0))
    } else {
        let below = sweep_down(x, n - 1, |_| 1.0);
        Ok((1.0 - below).max(0.0))
    }
}

/// The loss function `E[(X - r)^+]` for `X ~ Poisson(x)`: the expected
/// number of units demanded during a lead time beyond `r`.
///
/// For `r >= floor(x)` this sums `(k - r) p(k)` over the upper tail. Below
/// the mean it uses `E[(X - r)^+] = (x - r) + E[(r - X)^+]` and sums the
/// lower tail instead. Both sums start at their largest term.
pub fn loss_function(x: f64, r: u64) -> Result<f64> {
    check_mean(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let mode = x.floor() as u64;
    if r >= mode {
        Ok(sweep_up(x, r + 1, |k| (k - r) as f64))
    } else {
        // Here r <= floor(x) - 1, so x - r >= 1.
        let below = if r == 0 {
            0.0
        } else {
            sweep_down(x, r - 1, |k| (r - k) as f64)
        };
        Ok((x - r as f64) + below)
    }
}
