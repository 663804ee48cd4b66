//! Cross-checks between factorizations of τ and between density routes.

use hitting_core::density::{
    density_tau_convolution, density_tau_mellin, kasym_product_density, GridSpec, KasymParams,
};
use hitting_core::mellin::{admissible_rho_range, identity_check, tau_expr, ClosedFormTau, IdentityOptions};
use hitting_core::sampler::TauSampler;
use hitting_core::verify::check_identity_ks;
use hitting_core::{StableParams, TauForm};
use proptest::prelude::*;

fn admissible() -> impl Strategy<Value = StableParams> {
    (1.05f64..2.0, 0.0f64..1.0).prop_map(|(a, u)| {
        let (lo, hi) = admissible_rho_range(a);
        StableParams::new(a, lo + (hi - lo) * u).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_form_matches_the_closed_form(p in admissible()) {
        for form in [TauForm::Rk, TauForm::Final] {
            let tree = tau_expr(&p, form).unwrap();
            let rep = identity_check(&ClosedFormTau(p), &tree, None, IdentityOptions::default()).unwrap();
            prop_assert!(rep.passed, "{form} at {p:?}: {rep}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn density_grids_hold_their_mass(p in admissible()) {
        for grid in [density_tau_mellin(&p, &GridSpec::Auto).unwrap(), density_tau_convolution(&p, &GridSpec::Auto).unwrap()] {
            prop_assert!(grid.satisfies_mass(), "mass defect {} at {p:?}", grid.mass_defect());
            prop_assert!(grid.values.iter().all(|&v| v >= 0.0));
        }
    }
}

#[test]
fn rk_and_final_samples_agree() {
    for (a, r) in [(1.7, 0.45), (1.3, 0.6), (1.5, 1.0 / 3.0)] {
        let p = StableParams::new(a, r).unwrap();
        let rep = check_identity_ks(&p, TauForm::Rk, TauForm::Final, 100_000, 0.01, 11, 4).unwrap();
        assert!(rep.passed, "{rep}");
    }
}

#[test]
fn sampling_is_reproducible_and_worker_invariant() {
    let s = TauSampler::new(StableParams::new(1.3, 0.6).unwrap(), TauForm::Final).unwrap();
    let once = s.sample_n(50_000, 3, 1).unwrap();
    assert_eq!(once, s.sample_n(50_000, 3, 1).unwrap());
    assert_eq!(once, s.sample_n(50_000, 3, 5).unwrap());
    assert_ne!(once, s.sample_n(50_000, 4, 1).unwrap());
}

#[test]
fn kasym_family_is_non_increasing() {
    for r in [0.5, 1.0] {
        for s in [0.5, 1.0] {
            for beta in [0.3, 0.6] {
                for gamma in [0.3, 0.6] {
                    let p = KasymParams {
                        r,
                        s,
                        beta,
                        gamma,
                        t: 0.5,
                    };
                    let xs: Vec<f64> = (0..120).map(|i| 1.0 + 1e-3 * 10f64.powf(i as f64 / 20.0)).collect();
                    let f: Vec<f64> = xs.iter().map(|&x| kasym_product_density(&p, x).unwrap()).collect();
                    let peak = f.iter().cloned().fold(0.0, f64::max);
                    for (i, w) in f.windows(2).enumerate() {
                        assert!(w[1] >= 0.0);
                        assert!(
                            w[1] - w[0] <= 1e-9 * peak,
                            "{p:?}: rises between x = {} and {}",
                            xs[i],
                            xs[i + 1]
                        );
                    }
                }
            }
        }
    }
}
