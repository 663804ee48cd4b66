use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mellin::{StableParams, TauForm};
use crate::report::VerificationReport;

use super::chain::{check_laplace_chain, default_chain_grid};
use super::ks::check_identity_ks;
use super::lemma::{check_clay_convexity, check_selfdecomp, default_clay_grid, default_selfdecomp_grid};
use super::moments::{check_acceptance_rates, check_moments_mc};
use super::shape::check_shape_claims;

/// A named group of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckName {
    Moments,
    Laplace,
    Selfdecomp,
    Clay,
    Shape,
    Ks,
    Acceptance,
    All,
}

impl CheckName {
    pub const EACH: [CheckName; 7] = [
        CheckName::Moments,
        CheckName::Laplace,
        CheckName::Selfdecomp,
        CheckName::Clay,
        CheckName::Shape,
        CheckName::Ks,
        CheckName::Acceptance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckName::Moments => "moments",
            CheckName::Laplace => "laplace",
            CheckName::Selfdecomp => "selfdecomp",
            CheckName::Clay => "clay",
            CheckName::Shape => "shape",
            CheckName::Ks => "ks",
            CheckName::Acceptance => "acceptance",
            CheckName::All => "all",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        CheckName::EACH
            .iter()
            .chain(std::iter::once(&CheckName::All))
            .find(|c| c.name() == lower)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check '{s}'")))
    }
}

/// Knobs of the verification suite. `None` fields fall back to the default
/// parameter sets.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub workers: usize,
    pub mc_samples: usize,
    pub ks_samples: usize,
    pub ks_level: f64,
    pub acceptance_proposals: u64,
    /// Replaces every report's tolerance; recorded in the report metadata.
    pub tolerance: Option<f64>,
    /// Restricts the moment, chain, shape and KS checks to one parameter pair.
    pub params: Option<StableParams>,
    pub s_list: Option<Vec<f64>>,
    pub clay_rs: Option<Vec<f64>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            mc_samples: 1_000_000,
            ks_samples: 100_000,
            ks_level: 0.01,
            acceptance_proposals: 1_000_000,
            tolerance: None,
            params: None,
            s_list: None,
            clay_rs: None,
        }
    }
}

fn pairs(list: &[(f64, f64)]) -> Result<Vec<StableParams>> {
    list.iter().map(|&(a, r)| StableParams::new(a, r)).collect()
}

/// The nine (α, ρ) pairs of the chain check.
pub fn default_laplace_params() -> Result<Vec<StableParams>> {
    pairs(&[
        (2.0, 0.5),
        (1.5, 1.0 / 3.0),
        (1.5, 0.5),
        (1.5, 2.0 / 3.0),
        (1.2, 0.3),
        (1.2, 0.5),
        (1.8, 0.5),
        (1.8, 0.45),
        (1.3, 0.7),
    ])
}

/// α ∈ {1.2, 1.5, 1.9} at ρ = 1/2, the midpoint of the admissible range.
pub fn default_moment_params() -> Result<Vec<StableParams>> {
    pairs(&[(1.2, 0.5), (1.5, 0.5), (1.9, 0.5)])
}

pub const DEFAULT_MOMENT_ORDERS: [f64; 3] = [-0.5, -0.25, 0.25];
pub const DEFAULT_CLAY_RS: [f64; 4] = [0.5, 0.1, 0.9, 0.999_999];
pub const DEFAULT_SELFDECOMP_BETAS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

pub fn default_shape_params() -> Result<Vec<StableParams>> {
    pairs(&[(1.2, 0.5), (1.5, 0.5), (1.8, 0.5)])
}

/// Acceptance-rate cases `(c, t)`.
pub fn default_acceptance_cases() -> Vec<(f64, f64)> {
    vec![(0.5, 0.5), (0.5, 2.0 / 3.0), (0.75, 0.5), (0.75, 2.0 / 3.0)]
}

fn run_moments(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let params = match cfg.params {
        Some(p) => vec![p],
        None => default_moment_params()?,
    };
    let orders = cfg.s_list.clone().unwrap_or_else(|| DEFAULT_MOMENT_ORDERS.to_vec());
    let mut out = Vec::new();
    for p in params {
        let strip = p.tau_strip();
        let (inside, outside): (Vec<f64>, Vec<f64>) = orders.iter().partition(|&&s| strip.contains(s));
        let mut report = check_moments_mc(&p, &inside, cfg.mc_samples, cfg.seed, cfg.workers)?;
        for s in outside {
            report.observe(
                format!("s={s}"),
                f64::NAN,
                format!("skipped: outside the strip ({}, {})", strip.lo, strip.hi),
            );
        }
        out.push(report);
    }
    Ok(out)
}

fn run_laplace(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let params = match cfg.params {
        Some(p) => vec![p],
        None => default_laplace_params()?,
    };
    let grid = cfg.s_list.clone().unwrap_or_else(default_chain_grid);
    params.iter().map(|p| check_laplace_chain(p, &grid)).collect()
}

fn run_ks(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let cases = match cfg.params {
        Some(p) if p.is_symmetric() => vec![(p, TauForm::Yano, TauForm::Rk), (p, TauForm::Rk, TauForm::Final)],
        Some(p) => vec![(p, TauForm::Rk, TauForm::Final)],
        None => vec![
            (StableParams::new(1.5, 0.5)?, TauForm::Yano, TauForm::Rk),
            (StableParams::new(1.7, 0.45)?, TauForm::Rk, TauForm::Final),
        ],
    };
    cases
        .iter()
        .map(|(p, a, b)| check_identity_ks(p, *a, *b, cfg.ks_samples, cfg.ks_level, cfg.seed, cfg.workers))
        .collect()
}

/// Runs one check group (or all of them) and returns its reports.
pub fn run_check(name: CheckName, cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let mut reports = match name {
        CheckName::All => {
            let mut all = Vec::new();
            for c in CheckName::EACH {
                all.extend(run_check(c, cfg)?);
            }
            return Ok(all);
        }
        CheckName::Moments => run_moments(cfg)?,
        CheckName::Laplace => run_laplace(cfg)?,
        CheckName::Selfdecomp => vec![check_selfdecomp(&DEFAULT_SELFDECOMP_BETAS, &default_selfdecomp_grid())?],
        CheckName::Clay => {
            let rs = cfg.clay_rs.clone().unwrap_or_else(|| DEFAULT_CLAY_RS.to_vec());
            vec![check_clay_convexity(&rs, &default_clay_grid())?]
        }
        CheckName::Shape => {
            let params = match cfg.params {
                Some(p) => vec![p],
                None => default_shape_params()?,
            };
            params.iter().map(check_shape_claims).collect::<Result<Vec<_>>>()?
        }
        CheckName::Ks => run_ks(cfg)?,
        CheckName::Acceptance => vec![check_acceptance_rates(
            &default_acceptance_cases(),
            cfg.acceptance_proposals,
            cfg.seed,
            cfg.workers,
        )?],
    };
    if let Some(t) = cfg.tolerance {
        for r in &mut reports {
            r.override_tolerance(t);
        }
    }
    Ok(reports)
}

/// Every check at the configured settings.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    run_check(CheckName::All, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for c in CheckName::EACH.iter().chain(std::iter::once(&CheckName::All)) {
            assert_eq!(c.name().parse::<CheckName>().unwrap(), *c);
        }
        assert!("bogus".parse::<CheckName>().is_err());
    }

    #[test]
    fn default_parameter_sets_are_admissible() {
        assert_eq!(default_laplace_params().unwrap().len(), 9);
        assert_eq!(default_moment_params().unwrap().len(), 3);
        assert_eq!(default_shape_params().unwrap().len(), 3);
    }

    #[test]
    fn deterministic_checks_pass() {
        let cfg = SuiteConfig::default();
        for c in [CheckName::Laplace, CheckName::Clay] {
            for r in run_check(c, &cfg).unwrap() {
                assert!(r.passed, "{r}");
            }
        }
    }

    #[test]
    fn tolerance_override_is_recorded() {
        let cfg = SuiteConfig {
            tolerance: Some(1e-30),
            clay_rs: Some(vec![0.5]),
            ..SuiteConfig::default()
        };
        let r = &run_check(CheckName::Laplace, &cfg).unwrap()[1];
        assert!(!r.passed);
        assert!(r.metadata.extra.contains_key("tolerance_override"));
    }

    #[test]
    fn out_of_strip_orders_are_skipped_with_a_note() {
        let cfg = SuiteConfig {
            mc_samples: 20_000,
            params: Some(StableParams::new(1.2, 0.5).unwrap()),
            workers: 2,
            ..SuiteConfig::default()
        };
        let r = &run_check(CheckName::Moments, &cfg).unwrap()[0];
        assert_eq!(r.points.len(), 2);
        assert!(r.observations.iter().any(|o| o.note.starts_with("skipped")));
    }
}
