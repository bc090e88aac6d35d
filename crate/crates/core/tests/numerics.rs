//! Bound and loss-function numerics against independent oracles.

use lostsales::measures::level_from_gamma;
use lostsales::poisson::upper_tail;
use lostsales::{
    bounds, erlang_loss, gamma_from_measure, loss_function, lower_bound_gamma, measures_from_gamma,
    upper_bound_gamma, Error, Measure, SystemParams,
};
use num::{BigInt, BigRational, ToPrimitive};
use proptest::prelude::*;
use statrs::distribution::{DiscreteCDF, Poisson};

fn params(r: u64, q: u64, x: f64) -> SystemParams {
    SystemParams::from_lead_time_demand(r, q, x).unwrap()
}

/// Poisson probabilities by the plain product recurrence from e^-x.
fn brute_pmf(x: f64, upto: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(upto + 1);
    let mut t = (-x).exp();
    p.push(t);
    for k in 1..=upto {
        t *= x / k as f64;
        p.push(t);
    }
    p
}

fn brute_cutoff(x: f64, r: u64) -> usize {
    (x + 40.0 * x.sqrt() + 60.0).max(200.0).max(r as f64 + 60.0) as usize
}

/// Truncated series sum_{k >= r} (k - r) x^k e^-x / k!.
fn brute_loss(x: f64, r: u64) -> f64 {
    let p = brute_pmf(x, brute_cutoff(x, r));
    p.iter()
        .enumerate()
        .skip(r as usize)
        .map(|(k, pk)| (k as f64 - r as f64) * pk)
        .sum()
}

fn brute_tail(x: f64, n: u64) -> f64 {
    brute_pmf(x, brute_cutoff(x, n)).iter().skip(n as usize).sum()
}

/// Blocking probability by direct summation of x^k / k!.
fn direct_erlang(servers: u64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=servers {
        term *= x / k as f64;
        sum += term;
    }
    term / sum
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Upper bound evaluated in exact rational arithmetic for integer x.
fn exact_upper_bound(r: u64, q: u64, x: i64) -> f64 {
    let cycle = q * ((r + q) / q);
    let mut term = rational(1, 1);
    let mut sum = rational(0, 1);
    for k in 0..=r {
        if k > 0 {
            term *= rational(x, k as i64);
        }
        sum += term.clone();
    }
    let top = term * rational(x, r as i64 + 1);
    let weighted = top * rational(r as i64 + 1, cycle as i64);
    let ub = weighted.clone() / (weighted + sum);
    ub.to_f64().unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[test]
fn loss_matches_brute_series() {
    let mut worst = 0.0f64;
    for r in 0..=50u64 {
        for xi in 1..=200 {
            let x = xi as f64 * 0.5;
            let got = loss_function(x, r).unwrap();
            let want = brute_loss(x, r);
            if want > 1e-290 {
                worst = worst.max(rel(got, want));
            }
        }
    }
    assert!(worst < 1e-12, "worst relative error {worst:e}");
}

#[test]
fn loss_spec_value() {
    let want = brute_loss(1.0, 2);
    assert!((want - 0.103_638_323_514_33).abs() < 1e-13);
    assert!(rel(loss_function(1.0, 2).unwrap(), want) < 1e-14);
}

#[test]
fn tail_identity_holds_on_brute_series() {
    // E[(X - r)^+] = x P(X >= r - 1) - r P(X >= r)
    for r in 1..=30u64 {
        for &x in &[0.3, 1.0, 2.5, 6.0, 11.0, 20.0] {
            let via_tails = x * brute_tail(x, r - 1) - r as f64 * brute_tail(x, r);
            assert!((via_tails - brute_loss(x, r)).abs() < 1e-12, "x={x} r={r}");
        }
    }
}

#[test]
fn upper_tail_matches_brute_series() {
    for n in 0..=60u64 {
        for &x in &[0.2, 1.0, 4.0, 17.5, 40.0] {
            let want = brute_tail(x, n);
            let got = upper_tail(x, n).unwrap();
            assert!((got - want).abs() < 1e-14 || rel(got, want) < 1e-12, "x={x} n={n}");
        }
    }
}

#[test]
fn loss_monotone_on_grid() {
    let xs: Vec<f64> = (1..=120).map(|i| i as f64 * 0.75).collect();
    for r in 0..=80u64 {
        let mut prev = 0.0;
        for &x in &xs {
            let v = loss_function(x, r).unwrap();
            assert!(v >= prev, "decreased in x at r={r} x={x}");
            prev = v;
        }
    }
    for &x in &xs {
        let mut prev = f64::INFINITY;
        for r in 0..=120u64 {
            let v = loss_function(x, r).unwrap();
            assert!(v <= prev, "increased in r at r={r} x={x}");
            prev = v;
        }
    }
}

fn statrs_tail_above(x: f64, r: u64) -> f64 {
    Poisson::new(x).unwrap().sf(r)
}

proptest! {
    #[test]
    fn loss_difference_is_tail(r in 0u64..=200, x in 0.01f64..400.0) {
        let d = loss_function(x, r).unwrap() - loss_function(x, r + 1).unwrap();
        let tail = statrs_tail_above(x, r);
        prop_assert!((d - tail).abs() < 1e-10, "r={} x={} d={} tail={}", r, x, d, tail);
    }

    #[test]
    fn round_trip_through_measures(
        r in 0u64..200,
        q in 1u64..60,
        x in 0.05f64..300.0,
        gi in 0usize..5,
    ) {
        let p = params(r, q, x);
        let gamma = [0.0, 0.25, 0.5, 0.75, 1.0][gi];
        let m = measures_from_gamma(gamma, &p).unwrap();
        for which in Measure::ALL {
            match gamma_from_measure(which, which.of(&m), &p) {
                Ok(back) => prop_assert!((back - gamma).abs() < 1e-12, "{} {} -> {}", which, gamma, back),
                Err(Error::Degenerate { .. }) => {}
                Err(e) => prop_assert!(false, "{}", e),
            }
        }
    }
}

#[test]
fn erlang_recurrence_matches_direct_sum() {
    for s in 1..=30u64 {
        for xi in 0..=240 {
            let x = xi as f64 * 0.25;
            let got = erlang_loss(s, x).unwrap();
            let want = direct_erlang(s, x);
            assert!(rel(got, want) < 1e-12, "s={s} x={x} {got} vs {want}");
        }
    }
}

#[test]
fn upper_bound_against_exact_rationals() {
    let v = upper_bound_gamma(&params(8, 5, 8.0)).unwrap();
    let exact = exact_upper_bound(8, 5, 8);
    assert!(rel(v, exact) < 1e-13, "{v} vs {exact}");
    for r in 0..=40u64 {
        for q in 1..=r + 3 {
            for x in [1i64, 3, 7, 20, 45] {
                let got = upper_bound_gamma(&params(r, q, x as f64)).unwrap();
                let want = exact_upper_bound(r, q, x);
                assert!(rel(got, want) < 1e-12, "r={r} q={q} x={x}");
            }
        }
    }
}

#[test]
fn lower_bound_examples() {
    let lb = lower_bound_gamma(&params(2, 2, 1.0)).unwrap();
    assert!((lb - 0.025255).abs() < 5e-7);
    let loss = brute_loss(4.0, 4);
    let want = loss / (loss + 6.0);
    let got = lower_bound_gamma(&params(4, 3, 4.0)).unwrap();
    assert!(got > 0.0 && got < 1.0);
    assert!(rel(got, want) < 1e-13);
}

#[test]
fn bounds_bracket_each_other_on_grid() {
    for r in 0..=64u64 {
        let rf = r as f64;
        for q in 1..=r + 4 {
            for x in [0.25 * rf + 0.1, 0.5 * rf + 0.1, rf + 0.1, 2.0 * rf + 0.1] {
                let p = params(r, q, x);
                let b = bounds(&p).unwrap();
                assert!(0.0 <= b.lb && b.lb <= b.ub && b.ub <= 1.0, "r={r} q={q} x={x} {b:?}");
                assert!(b.loss >= 0.0 && (0.0..=1.0).contains(&b.erlang));
                if q == 1 {
                    assert!(rel(b.ub, b.erlang) < 1e-12, "q=1 equality r={r} x={x}");
                }
                if r < q {
                    let want = b.loss / (b.loss + q as f64);
                    assert!(rel(b.lb, want) < 1e-12, "r<q equality r={r} q={q} x={x}");
                }
            }
        }
    }
}

#[test]
fn worst_table_cell_gap() {
    let b = bounds(&params(8, 8, 8.0)).unwrap();
    assert!(b.gap() <= 0.0628, "{}", b.gap());
}

#[test]
fn bounds_survive_large_systems() {
    for &(r, q, x) in &[(1024u64, 1023u64, 2048.0), (1024, 2, 512.0), (4096, 7, 8192.0), (4096, 4096, 4096.0)] {
        let b = bounds(&params(r, q, x)).unwrap();
        assert!(b.lb.is_finite() && b.ub.is_finite() && b.lb <= b.ub, "{r} {q} {x} {b:?}");
    }
}

#[test]
fn conversions_satisfy_level_formula() {
    for &(r, q, x) in &[(2u64, 2u64, 1.0), (10, 3, 12.5), (0, 1, 0.4), (50, 17, 33.0)] {
        let p = params(r, q, x);
        for i in 0..=20 {
            let g = i as f64 / 20.0;
            let m = measures_from_gamma(g, &p).unwrap();
            let independent = level_from_gamma(g, &p);
            assert!((m.l - independent).abs() <= 1e-12 * independent.abs().max(1.0));
            assert!((m.l - (m.p - m.u)).abs() <= 1e-12 * m.p.abs());
            assert!((m.u - (1.0 - g) * x).abs() <= 1e-12 * x);
        }
    }
}

/// Reference values from 80-digit arithmetic (upper-tail sums with
/// log-gamma terms for the loss function, log-space power sums for the
/// upper bound), frozen here.
#[test]
#[allow(clippy::excessive_precision)]
fn large_arguments_against_high_precision_values() {
    let losses = [
        (8192.0, 8192, 36.107766037998029553),
        (8192.0, 8300, 5.1872786249521918368),
        (8192.0, 8500, 0.0084634092263135867594),
        (2048.0, 2100, 2.8548407173406201833),
        (4000.0, 4096, 1.8109032716703656904),
        (1000.0, 1200, 2.2276370686772344177e-9),
        (512.0, 1024, 3.1437668111651576427e-88),
        (3000.5, 2900, 101.19343951191458871),
        (700.25, 760, 0.12131911088713411719),
        (1.0, 50, 2.4655701971777418893e-67),
    ];
    for (x, r, want) in losses {
        let got = loss_function(x, r).unwrap();
        assert!(rel(got, want) < 1e-12, "LOSS({x}, {r}) = {got:e}, want {want:e}");
    }
    // Far below the smallest subnormal.
    assert_eq!(loss_function(1.0, 4096).unwrap(), 0.0);

    let uppers = [
        (1024, 2, 512.0, 7.9050845485636812198e-89),
        (1024, 1023, 1024.0, 0.012125288030993063729),
        (1024, 300, 1536.0, 0.29987397462403507597),
        (4096, 4096, 4096.0, 0.0061439858197997353102),
        (4096, 5, 8192.0, 0.49981694674774720974),
        (2000, 700, 1900.5, 0.00063062748891990759517),
    ];
    for (r, q, x, want) in uppers {
        let got = upper_bound_gamma(&params(r, q, x)).unwrap();
        assert!(rel(got, want) < 1e-12, "UB({r}, {q}, {x}) = {got:e}, want {want:e}");
    }
}
