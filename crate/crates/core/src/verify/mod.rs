//! Executable checks of the analytic claims about τ and its factors.
//!
//! Each check returns a [`VerificationReport`] whose points carry the
//! gating deviations. Checks that combine several criteria express each
//! deviation in units of its own threshold and use tolerance 1; the
//! threshold is written into the point's input label.

mod chain;
mod ks;
mod lemma;
mod moments;
mod shape;
mod suite;

pub use chain::{check_laplace_chain, default_chain_grid, laplace_chain_moment};
pub use ks::{check_identity_ks, check_ks_exprs, kolmogorov_sf, ks_pvalue, ks_statistic, KS_REQUIRED_PASSES, KS_SEEDS};
pub use lemma::{
    check_clay_convexity, check_selfdecomp, default_clay_grid, default_selfdecomp_grid, CLAY_INEQUALITY_FLOOR,
    PHI_NOISE_FLOOR,
};
pub use moments::{check_acceptance_rates, check_moments_mc};
pub use shape::{check_shape_claims, log_x_alpha_density};
pub use suite::{
    default_acceptance_cases, default_laplace_params, default_moment_params, default_shape_params, run_check,
    run_suite, CheckName, SuiteConfig, DEFAULT_CLAY_RS, DEFAULT_MOMENT_ORDERS, DEFAULT_SELFDECOMP_BETAS,
};

pub use crate::report::VerificationReport;
