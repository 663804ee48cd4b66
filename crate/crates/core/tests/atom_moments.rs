//! Monte Carlo moments of every atom against its Mellin transform.

use hitting_core::sampler::SamplerPlan;
use hitting_core::RVExpr;

const N: usize = 1_000_000;
const MAX_Z: f64 = 4.0;

/// Five orders strictly inside the half strip, so that `X^s` has finite
/// variance. None falls on `s = 0`, where the comparison is trivial.
fn orders(expr: &RVExpr) -> Vec<f64> {
    let strip = expr.strip().unwrap();
    let lo = (0.5 * strip.lo).max(-1.0);
    let hi = (0.5 * strip.hi).min(1.0);
    (0..5).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / 5.5).collect()
}

fn assert_moments(expr: RVExpr, seed: u64) {
    let ln_x = SamplerPlan::compile(&expr)
        .unwrap()
        .sample_ln_parallel(N, seed, 4)
        .unwrap();
    for s in orders(&expr) {
        let values: Vec<f64> = ln_x.iter().map(|l| (s * l).exp()).collect();
        let mean = values.iter().sum::<f64>() / N as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (N - 1) as f64;
        let se = (var / N as f64).sqrt();
        let exact = expr.mellin(s).unwrap();
        let z = (mean - exact) / se;
        assert!(
            z.abs() <= MAX_Z,
            "{expr} at s = {s}: mean {mean}, exact {exact}, z = {z}"
        );
    }
}

#[test]
fn exponential() {
    assert_moments(RVExpr::ExpL, 1);
}

#[test]
fn gamma() {
    assert_moments(RVExpr::gamma(0.7), 2);
    assert_moments(RVExpr::gamma(2.5), 3);
}

#[test]
fn beta() {
    assert_moments(RVExpr::beta(0.6, 1.4), 4);
    assert_moments(RVExpr::beta(2.0, 3.0), 5);
}

#[test]
fn positive_stable() {
    for (i, c) in [0.3, 0.5, 0.8].into_iter().enumerate() {
        assert_moments(RVExpr::stable(c), 10 + i as u64);
    }
}

#[test]
fn kanter() {
    for (i, c) in [0.3, 0.7].into_iter().enumerate() {
        assert_moments(RVExpr::kanter(c), 20 + i as u64);
    }
}

#[test]
fn size_biased_kanter_both_strategies() {
    // positive order: rejection; negative order: tabulated inverse CDF
    assert_moments(RVExpr::kanter(0.5).size_bias(0.5), 30);
    assert_moments(RVExpr::kanter(0.6).size_bias(-0.5), 31);
}

#[test]
fn size_biased_stable() {
    assert_moments(RVExpr::stable(0.6).size_bias(-0.8), 40);
    assert_moments(RVExpr::stable(0.6).size_bias(0.3), 41);
}
