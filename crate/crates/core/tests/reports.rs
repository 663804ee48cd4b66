//! Reports are deterministic and reproducible from their own metadata.

use hitting_core::report::VerificationReport;
use hitting_core::verify::{
    check_acceptance_rates, check_laplace_chain, check_moments_mc, default_chain_grid, run_check, CheckName,
    SuiteConfig,
};
use hitting_core::StableParams;

fn round_trip(r: &VerificationReport) -> VerificationReport {
    serde_json::from_str(&r.to_json()).unwrap()
}

#[test]
fn moment_report_is_rebuilt_from_its_metadata() {
    let p = StableParams::new(1.5, 0.4).unwrap();
    let orders = [-0.5, 0.1];
    let first = check_moments_mc(&p, &orders, 50_000, 99, 2).unwrap();

    let m = &round_trip(&first).metadata;
    let q = StableParams::new(m.alpha.unwrap(), m.rho.unwrap()).unwrap();
    let again = check_moments_mc(&q, &orders, m.samples.unwrap() as usize, m.seed.unwrap(), 7).unwrap();
    assert_eq!(first.to_json(), again.to_json());
}

#[test]
fn acceptance_report_is_rebuilt_from_its_metadata() {
    let cases = [(0.5, 0.5)];
    let first = check_acceptance_rates(&cases, 100_000, 5, 3).unwrap();
    let m = &first.metadata;
    let again = check_acceptance_rates(&cases, m.samples.unwrap(), m.seed.unwrap(), 1).unwrap();
    assert_eq!(first, again);
}

#[test]
fn laplace_chain_is_deterministic() {
    let p = StableParams::new(1.3, 0.7).unwrap();
    let grid = default_chain_grid();
    let a = check_laplace_chain(&p, &grid).unwrap();
    let b = check_laplace_chain(&p, &grid).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.passed);
}

#[test]
fn ks_reports_do_not_depend_on_workers() {
    let base = SuiteConfig {
        ks_samples: 20_000,
        params: Some(StableParams::new(1.6, 0.5).unwrap()),
        ..SuiteConfig::default()
    };
    let one = run_check(
        CheckName::Ks,
        &SuiteConfig {
            workers: 1,
            ..base.clone()
        },
    )
    .unwrap();
    let many = run_check(CheckName::Ks, &SuiteConfig { workers: 6, ..base }).unwrap();
    assert_eq!(one.len(), 2);
    assert_eq!(one, many);
}

#[test]
fn tolerance_changes_are_recorded_not_silent() {
    let cfg = SuiteConfig {
        tolerance: Some(2.0),
        clay_rs: Some(vec![0.5]),
        ..SuiteConfig::default()
    };
    for r in run_check(CheckName::Clay, &cfg).unwrap() {
        assert_eq!(r.tolerance, 2.0);
        assert_eq!(r.metadata.extra["tolerance_override"], "1e0 -> 2e0");
        assert_eq!(round_trip(&r), r);
    }
}
