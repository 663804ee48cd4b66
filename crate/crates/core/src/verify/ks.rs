use crate::error::{Error, Result};
use crate::mellin::{tau_expr, RVExpr, StableParams, TauForm};
use crate::report::{Metadata, VerificationReport};
use crate::sampler::SamplerPlan;

/// Seeds per two-sample comparison.
pub const KS_SEEDS: usize = 10;
/// Seeds that must pass for the comparison to pass.
pub const KS_REQUIRED_PASSES: usize = 8;
const MIN_SAMPLES: usize = 10_000;

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a − F_b|`. Sorts its inputs.
pub fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Kolmogorov survival function `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 * sum.abs() {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value of a two-sample statistic with Stephens' correction.
pub fn ks_pvalue(d: f64, na: usize, nb: usize) -> f64 {
    let en = ((na * nb) as f64 / (na + nb) as f64).sqrt();
    kolmogorov_sf((en + 0.12 + 0.11 / en) * d)
}

/// Two-sample KS between the laws of `a` and `b` repeated over
/// [`KS_SEEDS`] seeds; passes when at least [`KS_REQUIRED_PASSES`] seeds give
/// `p > level`. Seed `k` uses streams `seed + 2k` for `a` and `seed + 2k + 1`
/// for `b`.
#[allow(clippy::too_many_arguments)]
pub fn check_ks_exprs(
    name: &str,
    a: &RVExpr,
    b: &RVExpr,
    n: usize,
    level: f64,
    seed: u64,
    workers: usize,
    mut meta: Metadata,
) -> Result<VerificationReport> {
    if n < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("level {level} must lie in (0, 1)")));
    }
    let (pa, pb) = (SamplerPlan::compile(a)?, SamplerPlan::compile(b)?);
    meta.seed = Some(seed);
    meta.samples = Some(n as u64);
    meta.set("level", level)
        .set("expr_a", a)
        .set("expr_b", b)
        .set("protocol", format!("{KS_REQUIRED_PASSES} of {KS_SEEDS} seeds"));
    let mut report = VerificationReport::new(name, 0.0, meta);
    let mut passes = 0;
    for k in 0..KS_SEEDS as u64 {
        let mut xa = pa.sample_ln_parallel(n, seed.wrapping_add(2 * k), workers)?;
        let mut xb = pb.sample_ln_parallel(n, seed.wrapping_add(2 * k + 1), workers)?;
        let d = ks_statistic(&mut xa, &mut xb);
        let p = ks_pvalue(d, n, n);
        if p > level {
            passes += 1;
        }
        report.observe(format!("seed {k}: D"), d, "");
        report.observe(format!("seed {k}: p"), p, if p > level { "pass" } else { "fail" });
    }
    report.push(
        format!("seeds passing at level {level} (need {KS_REQUIRED_PASSES} of {KS_SEEDS})"),
        KS_REQUIRED_PASSES as f64,
        passes as f64,
        KS_REQUIRED_PASSES.saturating_sub(passes) as f64,
    );
    Ok(report)
}

/// [`check_ks_exprs`] on two factorizations of τ at the same parameters.
pub fn check_identity_ks(
    params: &StableParams,
    form_a: TauForm,
    form_b: TauForm,
    n: usize,
    level: f64,
    seed: u64,
    workers: usize,
) -> Result<VerificationReport> {
    let a = tau_expr(params, form_a)?;
    let b = tau_expr(params, form_b)?;
    let mut meta = Metadata::with_params(params.alpha(), params.rho());
    meta.set("forms", format!("{form_a} vs {form_b}"));
    check_ks_exprs(&format!("ks_{form_a}_{form_b}"), &a, &b, n, level, seed, workers, meta)
}
