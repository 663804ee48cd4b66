use crate::error::{Error, Result};
use crate::report::{Metadata, VerificationReport};
use crate::specfun::spectral_phi;

/// Rounding allowance for increments of `φ_β`, whose values are O(1).
pub const PHI_NOISE_FLOOR: f64 = 1e-12;
/// Allowed shortfall of `r² x^{r−1} (1−x)² / (1 − x^r)²` below 1.
pub const CLAY_INEQUALITY_FLOOR: f64 = 1e-12;
const PHI_ZERO_POINT: f64 = 1e-6;
const PHI_ZERO_TOLERANCE: f64 = 1e-5;

/// 10⁴ log-spaced points on [1e−4, 50].
pub fn default_selfdecomp_grid() -> Vec<f64> {
    let n = 10_000;
    let (a, b) = (1e-4f64.ln(), 50f64.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Uniform grid on [−10, −0.01] with step 1e−3.
pub fn default_clay_grid() -> Vec<f64> {
    let n = 9_991;
    (0..n).map(|i| -10.0 + 1e-3 * i as f64).collect()
}

/// Spectral function of `−ln K_β`: nonnegative, non-increasing along
/// `x_grid` (up to [`PHI_NOISE_FLOOR`]), and within 1e−5 of 1/2 at 1e−6.
pub fn check_selfdecomp(betas: &[f64], x_grid: &[f64]) -> Result<VerificationReport> {
    if x_grid.len() < 2 || x_grid.iter().any(|x| !(*x > 0.0)) || x_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "x grid must be positive and strictly increasing".into(),
        ));
    }
    let mut meta = Metadata::default();
    meta.set("betas", format!("{betas:?}"))
        .set(
            "grid",
            format!(
                "{} points on [{:e}, {:e}]",
                x_grid.len(),
                x_grid[0],
                x_grid[x_grid.len() - 1]
            ),
        )
        .set("noise_floor", PHI_NOISE_FLOOR);
    let mut report = VerificationReport::new("selfdecomp", 1.0, meta);
    for &beta in betas {
        let phi = x_grid
            .iter()
            .map(|&x| spectral_phi(beta, x))
            .collect::<Result<Vec<_>>>()?;
        let at_zero = spectral_phi(beta, PHI_ZERO_POINT)?;
        report.push(
            format!("beta={beta}: |phi(1e-6) - 1/2| (threshold {PHI_ZERO_TOLERANCE:e})"),
            0.5,
            at_zero,
            (at_zero - 0.5).abs() / PHI_ZERO_TOLERANCE,
        );
        let min = phi.iter().copied().fold(f64::INFINITY, f64::min);
        report.push(
            format!("beta={beta}: min phi >= 0 (floor {PHI_NOISE_FLOOR:e})"),
            0.0,
            min,
            (-min).max(0.0) / PHI_NOISE_FLOOR,
        );
        let rise = phi.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        report.push(
            format!("beta={beta}: max increment <= 0 (floor {PHI_NOISE_FLOOR:e})"),
            0.0,
            rise,
            rise.max(0.0) / PHI_NOISE_FLOOR,
        );
    }
    Ok(report)
}

/// `ln(1 − e^t) − ln(1 − e^{rt})` for `t < 0`.
fn clay_function(r: f64, t: f64) -> f64 {
    (-t.exp_m1()).ln() - (-(r * t).exp_m1()).ln()
}

/// Convexity of `t ↦ ln(1 − e^t) − ln(1 − e^{rt})` on a uniform grid in
/// `(−∞, 0)`, plus the equivalent pointwise inequality
/// `r² x^{r−1} (1−x)² / (1 − x^r)² ≥ 1` at `x = e^t`.
///
/// Second differences are compared with the floor
/// `ε_h = 16 ε (max|ln(1 − e^t)| + max|ln(1 − e^{rt})|)`, the rounding error
/// of a three-term difference of `g` computed from its two logarithms.
pub fn check_clay_convexity(rs: &[f64], t_grid: &[f64]) -> Result<VerificationReport> {
    let n = t_grid.len();
    if n < 3 || t_grid.iter().any(|t| !(*t < 0.0)) {
        return Err(Error::InvalidArgument("t grid needs at least 3 negative points".into()));
    }
    let h = (t_grid[n - 1] - t_grid[0]) / (n - 1) as f64;
    if t_grid
        .windows(2)
        .any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0))
        || !(h > 0.0)
    {
        return Err(Error::InvalidArgument(
            "t grid must be increasing with uniform spacing".into(),
        ));
    }
    let mut meta = Metadata::default();
    meta.set("rs", format!("{rs:?}")).set(
        "grid",
        format!("{n} points on [{}, {}], h = {h:e}", t_grid[0], t_grid[n - 1]),
    );
    let mut report = VerificationReport::new("clay_convexity", 1.0, meta);
    for &r in rs {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("r = {r} must lie in (0, 1)")));
        }
        let g: Vec<f64> = t_grid.iter().map(|&t| clay_function(r, t)).collect();
        let term_max = |k: f64| {
            t_grid
                .iter()
                .fold(0.0f64, |m, &t| m.max((-(k * t).exp_m1()).ln().abs()))
        };
        let scale = term_max(1.0) + term_max(r);
        let floor = (16.0 * f64::EPSILON * scale).max(f64::MIN_POSITIVE);
        let d2 = g
            .windows(3)
            .map(|w| w[2] - 2.0 * w[1] + w[0])
            .fold(f64::INFINITY, f64::min);
        report.push(
            format!("r={r}: min second difference >= -{floor:.2e}"),
            0.0,
            d2,
            (-d2).max(0.0) / floor,
        );
        let worst = t_grid
            .iter()
            .map(|&t| 2.0 * r.ln() + (r - 1.0) * t + 2.0 * (-t.exp_m1()).ln() - 2.0 * (-(r * t).exp_m1()).ln())
            .fold(f64::INFINITY, f64::min)
            .exp();
        report.push(
            format!("r={r}: min of r^2 x^(r-1) (1-x)^2/(1-x^r)^2 >= 1 (floor {CLAY_INEQUALITY_FLOOR:e})"),
            1.0,
            worst,
            (1.0 - worst).max(0.0) / CLAY_INEQUALITY_FLOOR,
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_holds_on_default_grid() {
        let r = check_selfdecomp(&[0.5, 0.1, 0.9], &default_selfdecomp_grid()).unwrap();
        assert!(r.passed, "{r}");
        assert!((r.points[0].actual - 0.5).abs() < 1e-5);
    }

    #[test]
    fn symmetric_betas_give_identical_numbers() {
        let grid = default_selfdecomp_grid();
        let a = check_selfdecomp(&[0.25], &grid).unwrap();
        let b = check_selfdecomp(&[0.75], &grid).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p.actual.to_bits(), q.actual.to_bits());
            assert_eq!(p.deviation.to_bits(), q.deviation.to_bits());
        }
    }

    #[test]
    fn clay_claim_holds() {
        let r = check_clay_convexity(&[0.5, 0.05, 0.95], &default_clay_grid()).unwrap();
        assert!(r.passed, "{r}");
    }

    #[test]
    fn clay_near_one_is_flat() {
        let r = check_clay_convexity(&[1.0 - 1e-9], &default_clay_grid()).unwrap();
        assert!(r.passed, "{r}");
        assert!(r.points[0].actual.abs() < 1e-12);
    }

    #[test]
    fn concave_function_would_fail() {
        // sanity: the same machinery rejects −g
        let grid = default_clay_grid();
        let g: Vec<f64> = grid.iter().map(|&t| -clay_function(0.5, t)).collect();
        let d2 = g
            .windows(3)
            .map(|w| w[2] - 2.0 * w[1] + w[0])
            .fold(f64::INFINITY, f64::min);
        assert!(d2 < -1e-9);
    }

    #[test]
    fn grid_validation() {
        assert!(check_clay_convexity(&[0.5], &[-1.0, -0.5, 0.5]).is_err());
        assert!(check_clay_convexity(&[0.5], &[-3.0, -2.0, -0.5]).is_err());
        assert!(check_selfdecomp(&[0.5], &[1.0, 0.5]).is_err());
    }
}
