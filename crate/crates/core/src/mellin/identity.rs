use super::tau::ln_moments_tau;
use super::{MellinStrip, RVExpr, StableParams};
use crate::error::{Error, Result};
use crate::report::{Metadata, VerificationReport};

/// Anything with a real Mellin transform on a strip.
pub trait MellinTransform {
    fn strip(&self) -> Result<MellinStrip>;
    fn ln_mellin(&self, s: f64) -> Result<f64>;
    fn label(&self) -> String;
}

impl MellinTransform for RVExpr {
    fn strip(&self) -> Result<MellinStrip> {
        RVExpr::strip(self)
    }

    fn ln_mellin(&self, s: f64) -> Result<f64> {
        RVExpr::ln_mellin(self, s)
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

/// The closed-form moment function of τ, as a transform in its own right.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormTau(pub StableParams);

impl MellinTransform for ClosedFormTau {
    fn strip(&self) -> Result<MellinStrip> {
        Ok(self.0.tau_strip())
    }

    fn ln_mellin(&self, s: f64) -> Result<f64> {
        ln_moments_tau(&self.0, s)
    }

    fn label(&self) -> String {
        format!("closed(α={}, ρ={})", self.0.alpha(), self.0.rho())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityOptions {
    pub tolerance: f64,
    pub points: usize,
    /// Fraction of the strip, centred, that the default grid covers.
    pub coverage: f64,
    /// Half-width used in place of an infinite strip end.
    pub infinite_reach: f64,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            points: 50,
            coverage: 0.8,
            infinite_reach: 4.0,
        }
    }
}

/// `n` Chebyshev nodes on the centred `coverage` fraction of `strip`.
/// Infinite ends are replaced by the finite end shifted by `reach`.
pub fn chebyshev_grid(strip: &MellinStrip, n: usize, coverage: f64, reach: f64) -> Vec<f64> {
    let (lo, hi) = match (strip.lo.is_finite(), strip.hi.is_finite()) {
        (true, true) => (strip.lo, strip.hi),
        (true, false) => (strip.lo, strip.lo + 2.0 * reach),
        (false, true) => (strip.hi - 2.0 * reach, strip.hi),
        (false, false) => (-reach, reach),
    };
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo) * coverage;
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::PI * (2 * k + 1) as f64 / (2 * n) as f64;
            mid + half * theta.cos()
        })
        .rev()
        .collect()
}

/// Compares two Mellin transforms by maximum relative deviation over `grid`
/// (or the default Chebyshev grid on their common strip).
pub fn identity_check(
    lhs: &dyn MellinTransform,
    rhs: &dyn MellinTransform,
    grid: Option<&[f64]>,
    opts: IdentityOptions,
) -> Result<VerificationReport> {
    let common = lhs.strip()?.intersect(&rhs.strip()?);
    if common.is_empty() {
        return Err(Error::EmptyStrip(format!("{} vs {}", lhs.label(), rhs.label())));
    }
    let owned;
    let grid = match grid {
        Some(g) => g,
        None => {
            owned = chebyshev_grid(&common, opts.points, opts.coverage, opts.infinite_reach);
            &owned
        }
    };
    let mut meta = Metadata::default();
    meta.set("lhs", lhs.label())
        .set("rhs", rhs.label())
        .set("strip", common);
    let mut report = VerificationReport::new("mellin_identity", opts.tolerance, meta);
    for &s in grid {
        let a = lhs.ln_mellin(s)?;
        let b = rhs.ln_mellin(s)?;
        // relative deviation of the transforms themselves
        let dev = (a - b).exp_m1().abs();
        report.push(format!("s={s:.6}"), b.exp(), a.exp(), dev);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mellin::{tau_expr, TauForm};

    fn p(alpha: f64, rho: f64) -> StableParams {
        StableParams::new(alpha, rho).unwrap()
    }

    #[test]
    fn grid_stays_inside_the_middle() {
        let g = chebyshev_grid(&MellinStrip::new(-1.0, 1.0), 50, 0.8, 4.0);
        assert_eq!(g.len(), 50);
        assert!(g.iter().all(|&s| s.abs() < 0.8));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let g = chebyshev_grid(&MellinStrip::new(f64::NEG_INFINITY, 0.5), 10, 0.8, 4.0);
        assert!(g.iter().all(|&s| s > -7.5 && s < 0.5));
    }

    #[test]
    fn closed_form_vs_rk() {
        let q = p(1.7, 0.5);
        let rk = tau_expr(&q, TauForm::Rk).unwrap();
        let r = identity_check(&ClosedFormTau(q), &rk, None, IdentityOptions::default()).unwrap();
        assert_eq!(r.points.len(), 50);
        assert!(r.passed);
        assert!(r.max_deviation() < 1e-10, "{}", r.max_deviation());
    }

    #[test]
    fn yano_vs_rk() {
        let q = p(1.5, 0.5);
        let yano = tau_expr(&q, TauForm::Yano).unwrap();
        let rk = tau_expr(&q, TauForm::Rk).unwrap();
        assert!(
            identity_check(&yano, &rk, None, IdentityOptions::default())
                .unwrap()
                .passed
        );
    }

    #[test]
    fn distinct_laws_fail() {
        let a = tau_expr(&p(1.5, 0.4), TauForm::Rk).unwrap();
        let b = tau_expr(&p(1.5, 0.45), TauForm::Rk).unwrap();
        let r = identity_check(&a, &b, None, IdentityOptions::default()).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn explicit_grid_outside_strip_errors() {
        let q = p(1.5, 0.5);
        let rk = tau_expr(&q, TauForm::Rk).unwrap();
        assert!(identity_check(&ClosedFormTau(q), &rk, Some(&[0.5]), IdentityOptions::default()).is_err());
    }
}
