use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{RVExpr, StableParams};
use crate::error::{Error, Result};
use crate::specfun::{kappa_const, log_gamma, sin_pi, sin_ratio};

/// Factorization used to build τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TauForm {
    /// Symmetric case only: `2^{−α} L^{−α/2} (Z_{α/2}^{(−1/2)})^{−α/2} B_{1−1/α,1/α}^{−1}`.
    Yano,
    /// Size-biased stable quotient times `Z_{1/α}`.
    #[default]
    Rk,
    /// Gamma and Kanter factors only.
    Final,
}

impl TauForm {
    pub const ALL: [TauForm; 3] = [TauForm::Yano, TauForm::Rk, TauForm::Final];

    pub fn name(&self) -> &'static str {
        match self {
            TauForm::Yano => "yano",
            TauForm::Rk => "rk",
            TauForm::Final => "final",
        }
    }
}

impl fmt::Display for TauForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TauForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "yano" => Ok(TauForm::Yano),
            "rk" => Ok(TauForm::Rk),
            "final" => Ok(TauForm::Final),
            other => Err(Error::InvalidArgument(format!(
                "unknown form '{other}' (expected yano, rk or final)"
            ))),
        }
    }
}

/// Expression tree whose law is that of τ.
///
/// At ρ = 1/α both RK and FINAL collapse to `Z_{1/α}`.
pub fn tau_expr(params: &StableParams, form: TauForm) -> Result<RVExpr> {
    let alpha = params.alpha();
    let ra = params.rho_alpha();
    match form {
        TauForm::Yano => {
            if !params.is_symmetric() {
                return Err(Error::Admissibility(format!(
                    "the yano form needs rho = 1/2, got {}",
                    params.rho()
                )));
            }
            Ok(RVExpr::product(vec![
                RVExpr::constant(2f64.powf(-alpha)),
                RVExpr::ExpL.pow(-alpha / 2.0),
                RVExpr::stable(alpha / 2.0).size_bias(-0.5).pow(-alpha / 2.0),
                RVExpr::beta(1.0 - 1.0 / alpha, 1.0 / alpha).pow(-1.0),
            ]))
        }
        _ if params.is_spectrally_negative() => Ok(RVExpr::stable(1.0 / alpha)),
        TauForm::Rk => {
            let quotient = RVExpr::product(vec![RVExpr::stable(ra).pow(ra), RVExpr::stable(ra).pow(-ra)]);
            Ok(RVExpr::product(vec![
                quotient.size_bias(1.0 / alpha),
                RVExpr::stable(1.0 / alpha),
            ]))
        }
        TauForm::Final => {
            let a = 1.0 - ra;
            let kappa = kappa_const(1.0 / alpha)?;
            Ok(RVExpr::product(vec![
                RVExpr::constant(kappa.powf(-alpha)),
                RVExpr::product(vec![RVExpr::ExpL.pow(a), RVExpr::ExpL.pow(-a)]).size_bias(1.0 / alpha),
                RVExpr::ExpL.pow(1.0 - alpha),
                RVExpr::kanter(ra).size_bias(1.0 / alpha),
                RVExpr::kanter(ra).pow(-1.0).size_bias(1.0 / alpha),
                RVExpr::kanter(1.0 / alpha).pow(-alpha),
            ]))
        }
    }
}

/// Closed-form `E[τ^s]`:
///
/// `sin(π/α) sin(πρα(s+1/α)) Γ(1−αs) / (sin(πρ) sin(π(s+1/α)) Γ(1−s))`.
pub fn moments_tau(params: &StableParams, s: f64) -> Result<f64> {
    Ok(ln_moments_tau(params, s)?.exp())
}

pub(crate) fn ln_moments_tau(params: &StableParams, s: f64) -> Result<f64> {
    let strip = params.tau_strip();
    if !strip.contains(s) {
        return Err(Error::StripViolation {
            subtree: "τ".into(),
            s,
            lo: strip.lo,
            hi: strip.hi,
        });
    }
    let alpha = params.alpha();
    let gamma_part = log_gamma(1.0 - alpha * s)? - log_gamma(1.0 - s)?;
    if params.is_spectrally_negative() {
        return Ok(gamma_part);
    }
    let w = s + 1.0 / alpha;
    let trig = sin_pi(1.0 / alpha) / sin_pi(params.rho()) * sin_ratio(params.rho_alpha(), w);
    Ok(trig.ln() + gamma_part)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, rho: f64) -> StableParams {
        StableParams::new(alpha, rho).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn brownian_case() {
        let m = moments_tau(&p(2.0, 0.5), -0.5).unwrap();
        assert!(rel(m, std::f64::consts::FRAC_2_SQRT_PI) < 1e-14);
    }

    #[test]
    fn frozen_values() {
        // mpmath, 30 digits
        let cases = [
            (1.5, 1.0 / 3.0, 0.1, 1.4524716980395214),
            (1.7, 0.5, 0.2, 1.573811181523302),
            (1.5, 0.5, 0.25, 3.256891165599288),
            (1.5, 0.5, -0.5, 0.6873855624044841),
        ];
        for (a, r, s, want) in cases {
            let got = moments_tau(&p(a, r), s).unwrap();
            assert!(rel(got, want) < 1e-13, "({a},{r},{s}): {got} vs {want}");
        }
    }

    #[test]
    fn normalized_and_removable_point() {
        for &(a, r) in &[(1.2, 0.3), (1.5, 0.5), (1.9, 0.48), (2.0, 0.5)] {
            let q = p(a, r);
            assert!((moments_tau(&q, 0.0).unwrap() - 1.0).abs() < 1e-15);
            let at = moments_tau(&q, -1.0 / a).unwrap();
            let near = moments_tau(&q, -1.0 / a + 1e-7).unwrap();
            assert!(rel(at, near) < 1e-5);
        }
    }

    #[test]
    fn strip_violations() {
        let q = p(1.2, 0.5);
        assert!(matches!(moments_tau(&q, 0.25), Err(Error::StripViolation { .. })));
        assert!(moments_tau(&q, -1.0 - 1.0 / 1.2).is_err());
        assert!(moments_tau(&p(1.5, 2.0 / 3.0), 0.6).is_ok());
    }

    #[test]
    fn trees_match_closed_form() {
        for &(a, r) in &[(1.5, 1.0 / 3.0), (1.3, 0.5), (1.7, 0.45), (1.9, 0.52), (1.5, 2.0 / 3.0)] {
            let q = p(a, r);
            for form in [TauForm::Rk, TauForm::Final] {
                let e = tau_expr(&q, form).unwrap();
                let strip = e.strip().unwrap();
                assert_eq!(strip, q.tau_strip(), "{form} strip at ({a},{r})");
                for &s in &[-1.2, -0.7, -0.3, 0.05, 0.15] {
                    if !strip.contains(s) {
                        continue;
                    }
                    let want = moments_tau(&q, s).unwrap();
                    let got = e.mellin(s).unwrap();
                    assert!(rel(got, want) < 1e-11, "{form} ({a},{r}) s={s}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn yano_matches_closed_form() {
        for &a in &[1.2, 1.5, 1.8, 2.0] {
            let q = p(a, 0.5);
            let e = tau_expr(&q, TauForm::Yano).unwrap();
            for &s in &[-1.0, -0.5, -0.1, 0.1] {
                if !q.tau_strip().contains(s) {
                    continue;
                }
                assert!(rel(e.mellin(s).unwrap(), moments_tau(&q, s).unwrap()) < 1e-12);
            }
        }
        assert!(tau_expr(&p(1.5, 0.4), TauForm::Yano).is_err());
    }

    #[test]
    fn spectrally_positive_ratio_is_stable_quotient_of_index_alpha_minus_one() {
        let q = p(1.5, 1.0 / 3.0);
        assert!((q.rho_alpha() - 0.5).abs() < 1e-15);
        let e = tau_expr(&q, TauForm::Rk).unwrap();
        assert!(e.to_string().contains("Z[0.5]"));
    }

    #[test]
    fn form_parsing() {
        assert_eq!("RK".parse::<TauForm>().unwrap(), TauForm::Rk);
        assert_eq!("final".parse::<TauForm>().unwrap(), TauForm::Final);
        assert!("other".parse::<TauForm>().is_err());
        assert_eq!(TauForm::default(), TauForm::Rk);
    }
}
