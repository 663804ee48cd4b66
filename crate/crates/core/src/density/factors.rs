//! Densities of the individual factors: the first factor of τ, positive
//! stable and Kanter variables, inverse Beta, and the two products used in
//! the unimodality argument.

use crate::error::{Error, Result};
use crate::mellin::{RVExpr, StableParams};
use crate::quadrature::{tanh_sinh, tanh_sinh_abs};
use crate::specfun::{
    cos_pi, kanter_inverse, kanter_log_slope, kanter_log_slope_complement, kappa_const, ln_kanter_ratio,
    ln_kanter_ratio_complement, log_gamma, sin_pi,
};

const QUAD_TOL: f64 = 1e-12;
/// Relative tolerance for the product densities, whose inner Kanter
/// inversions carry errors near 1e-12.
const PRODUCT_TOL: f64 = 1e-10;
/// Absolute floor for the stable mixture integrals, which lie in [0, 1].
const MIXTURE_ABS_TOL: f64 = 1e-17;
/// Absolute floor for the product densities, far below any value that
/// matters to normalisation or shape checks.
const PRODUCT_ABS_TOL: f64 = 1e-15;

/// `ln(b_c/κ_c)` at `u`, with `w = 1 − u` supplied separately for accuracy near 1.
fn ln_k(c: f64, u: f64, w: f64) -> f64 {
    if u <= 0.5 {
        ln_kanter_ratio(c, u)
    } else {
        ln_kanter_ratio_complement(c, w)
    }
}

fn slope(c: f64, u: f64, w: f64) -> f64 {
    if u <= 0.5 {
        kanter_log_slope(c, u)
    } else {
        kanter_log_slope_complement(c, w)
    }
}

/// `ln k(v) − ln k(v₀)` for `v = v₀ + d`, where `(v, w)` is the endpoint
/// with `w = 1 − v` supplied accurately. Steps that are small against the
/// distance to 0 and 1 use Simpson's rule on the slope, since the direct
/// difference cancels there.
fn ln_k_increment(c: f64, v0: f64, w0: f64, d: f64, v: f64, w: f64) -> f64 {
    let scale = v0.min(w0).min(v).min(w);
    if d.abs() < 1e-2 * scale {
        let (um, wm) = (v0 + 0.5 * d, w0 - 0.5 * d);
        d * (slope(c, v0, w0) + 4.0 * slope(c, um, wm) + slope(c, v, w)) / 6.0
    } else {
        ln_k(c, v, w) - ln_k(c, v0, w0)
    }
}

/// Density of the first factor of τ, the stable quotient
/// `(Z_{ρα}/Z'_{ρα})^{ρα}` size-biased at order `1/α`:
///
/// `sin(πρα) sin(π/α) t^{1/α} / (π sin(πρ) (t² + 2t cos(πρα) + 1))`.
///
/// Undefined at ρα = 1, where τ has no such factor.
pub fn density_first_factor(params: &StableParams, t: f64) -> Result<f64> {
    let ra = params.rho_alpha();
    if params.is_spectrally_negative() {
        return Err(Error::Admissibility(format!(
            "first-factor density needs rho*alpha < 1, got {ra}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} must be nonnegative")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let alpha = params.alpha();
    let k = sin_pi(ra) * sin_pi(1.0 / alpha) / (std::f64::consts::PI * sin_pi(params.rho()));
    let cs = cos_pi(ra);
    if t <= 1.0 {
        Ok(k * t.powf(1.0 / alpha) / (t * (t + 2.0 * cs) + 1.0))
    } else {
        let r = 1.0 / t;
        Ok(k * t.powf(1.0 / alpha - 2.0) / (1.0 + r * (2.0 * cs + r)))
    }
}

/// `P(U ≤ t)` for the first factor `U`.
pub fn first_factor_cdf(params: &StableParams, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} must be nonnegative")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return Ok(1.0);
    }
    let g = |x: f64| density_first_factor(params, x).unwrap_or(0.0);
    // the upper tail through x = 1/y, where the integrand is ~ y^{−1/α}
    let upper =
        |lo: f64| -> Result<f64> { Ok(tanh_sinh(|y, _, _| g(1.0 / y) / (y * y), 0.0, 1.0 / lo, QUAD_TOL)?.value) };
    if t <= 1.0 {
        Ok(tanh_sinh(|x, _, _| g(x), 0.0, t, QUAD_TOL)?.value)
    } else {
        Ok(1.0 - upper(t)?)
    }
}

fn check_unit(name: &str, c: f64) -> Result<()> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {c} outside (0,1)")))
    }
}

/// `∫₀¹ φ(ln z(u)) du` with `z(u) = (x^{−c} κ_c^{−1} k(u)^{−1})^{1/(1−c)}`,
/// split where `z = 1` so each piece is monotone.
fn kanter_mixture<F: Fn(f64) -> f64>(c: f64, ln_x: f64, phi: F) -> Result<f64> {
    let ln_kappa = kappa_const(c)?.ln();
    let base = -c * ln_x - ln_kappa;
    let integrand = |lk: f64| phi((base - lk) / (1.0 - c));
    if base >= 0.0 {
        return Ok(tanh_sinh_abs(|u, _, w| integrand(ln_k(c, u, w)), 0.0, 1.0, QUAD_TOL, MIXTURE_ABS_TOL)?.value);
    }
    let root = kanter_inverse(c, base)?;
    let left = tanh_sinh_abs(
        |u, _, d| {
            let w = root.w + d;
            integrand(ln_k(c, u, w))
        },
        0.0,
        root.u,
        QUAD_TOL,
        MIXTURE_ABS_TOL,
    )?;
    let right = tanh_sinh_abs(
        |u, _, w| integrand(ln_k(c, u, w)),
        root.u,
        1.0,
        QUAD_TOL,
        MIXTURE_ABS_TOL,
    )?;
    Ok(left.value + right.value)
}

/// Density of the positive `c`-stable variable `Z_c` at `x`.
///
/// Integrating out `U` in `Z_c = (L^{1−c} b_c(U))^{−1/c}` gives
/// `f(x) = (c/((1−c)x)) ∫₀¹ z e^{−z} du` with `z = x^{−c/(1−c)} b_c(u)^{−1/(1−c)}`.
pub fn density_stable_pos(c: f64, x: f64) -> Result<f64> {
    check_unit("c", c)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("x = {x} must be positive")));
    }
    if x == 0.0 || x.is_infinite() {
        return Ok(0.0);
    }
    let value = kanter_mixture(c, x.ln(), |ln_z| (ln_z - ln_z.exp()).exp())?;
    Ok(c / ((1.0 - c) * x) * value)
}

/// `P(Z_c ≤ x) = ∫₀¹ e^{−z} du`, same `z` as in [`density_stable_pos`].
pub fn cdf_stable_pos(c: f64, x: f64) -> Result<f64> {
    check_unit("c", c)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("x = {x} must be positive")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    kanter_mixture(c, x.ln(), |ln_z| (-ln_z.exp()).exp())
}

/// `P(Z_c > x) = ∫₀¹ (1 − e^{−z}) du`, accurate deep in the upper tail.
pub fn sf_stable_pos(c: f64, x: f64) -> Result<f64> {
    check_unit("c", c)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("x = {x} must be positive")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    kanter_mixture(c, x.ln(), |ln_z| -(-ln_z.exp()).exp_m1())
}

/// Closed form of the `c = 1/2` stable density, `(2√π)^{−1} x^{−3/2} e^{−1/(4x)}`.
pub fn stable_half_density(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (-(1.0 / (4.0 * x)) - 1.5 * x.ln()).exp() / (2.0 * std::f64::consts::PI.sqrt())
}

/// Density of `K_c` (or of its size-biased version `K_c^{(q)}`) at `x ∈ (0,1)`.
///
/// With `u*` solving `ln(b_c(u*)/κ_c) = ln x`, `f(x) = 1/(x |d ln b_c/du (u*)|)`;
/// the biased density is `x^q f(x) / E[K_c^q]`.
pub fn density_kanter(c: f64, x: f64, bias_order: f64) -> Result<f64> {
    check_unit("c", c)?;
    if !(bias_order > -1.0) {
        return Err(Error::InfeasibleOrder {
            subtree: format!("K[{c}]"),
            t: bias_order,
        });
    }
    if !(x > 0.0 && x < 1.0) {
        if x == 0.0 || x == 1.0 {
            return Err(Error::Domain(format!("density of K_c is singular or undefined at {x}")));
        }
        return Ok(0.0);
    }
    let root = kanter_inverse(c, x.ln())?;
    let slope = root.log_slope(c).abs();
    let base = 1.0 / (x * slope);
    if bias_order == 0.0 {
        return Ok(base);
    }
    let m = RVExpr::kanter(c).mellin(bias_order)?;
    Ok(base * x.powf(bias_order) / m)
}

/// Density of `B_{a,b}^{−1}` at `y > 1`.
pub fn density_beta_inverse(a: f64, b: f64, y: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("beta parameters ({a}, {b}) must be positive")));
    }
    if !(y > 1.0) {
        return Ok(0.0);
    }
    let ln_beta = log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?;
    let one_minus = -(-y.ln()).exp_m1();
    Ok(((-a - 1.0) * y.ln() + (b - 1.0) * one_minus.ln() - ln_beta).exp())
}

/// Parameters of the product `(K_β^{−r})^{(t)} × K_γ^{−s}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KasymParams {
    pub r: f64,
    pub s: f64,
    pub beta: f64,
    pub gamma: f64,
    pub t: f64,
}

/// Density of `(K_β^{−r})^{(t)} × K_γ^{−s}` at `x`, supported on (1, ∞).
///
/// `(K_β^{−r})^{(t)} = (K_β^{(q)})^{−r}` with `q = −rt`. Conditioning on the
/// uniform level `v` of the first factor (density `k(v)^q / E[K_β^q]`, with
/// `k = b_β/κ_β`) leaves `K_γ = e^{ℓ(v)}`, `ℓ(v) = −(ln x + r ln k(v))/s`, so
/// `f(x) = E[K_β^q]^{−1} ∫_0^{v*} k(v)^q / (s x |D_γ(u_γ(ℓ(v)))|) dv`
/// where `D_γ = d ln b_γ/du` and `v*` solves `r ln k(v*) = −ln x`.
pub fn kasym_product_density(p: &KasymParams, x: f64) -> Result<f64> {
    check_unit("beta", p.beta)?;
    check_unit("gamma", p.gamma)?;
    if !(p.r > 0.0 && p.s > 0.0) {
        return Err(Error::Domain("r and s must be positive".into()));
    }
    let q = -p.r * p.t;
    if !(q > -1.0) {
        return Err(Error::InfeasibleOrder {
            subtree: format!("K[{}]^(-{})", p.beta, p.r),
            t: p.t,
        });
    }
    if !(x > 1.0) {
        return Ok(0.0);
    }
    let ln_x = x.ln();
    let vstar = kanter_inverse(p.beta, -ln_x / p.r)?;
    let m = RVExpr::kanter(p.beta).mellin(q)?;
    let ln_k_star = -ln_x / p.r;
    let integrand = |v: f64, d: f64| -> f64 {
        // v = v* − d
        let inc = ln_k_increment(p.beta, vstar.u, vstar.w, -d, v, vstar.w + d);
        let lk = ln_k_star + inc;
        let ell = -(p.r / p.s) * inc;
        if !(ell < 0.0) {
            return 0.0;
        }
        let Ok(root) = kanter_inverse(p.gamma, ell) else {
            return 0.0;
        };
        let slope = root.log_slope(p.gamma).abs();
        (q * lk).exp() / (p.s * x * slope)
    };
    let quad = tanh_sinh_abs(|v, _, d| integrand(v, d), 0.0, vstar.u, PRODUCT_TOL, PRODUCT_ABS_TOL)?;
    Ok(quad.value / m)
}

/// Density of `K_{α/2}^{(1/α)} × B_{1−1/α,1/α}^{−1}` at `x`.
///
/// `f(x) = E[K^{1/α}]^{−1} ∫_{k(v)<x} k(v)^{1/α} f_Y(x/k(v)) / k(v) dv` with
/// `Y = B^{−1}`; the factor `(1 − k/x)^{1/α−1}` is integrably singular where
/// `k(v) = x`.
pub fn ksym_product_density(alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must lie in (1, 2)")));
    }
    if !(x > 0.0) {
        return Ok(0.0);
    }
    let c = alpha / 2.0;
    let t = 1.0 / alpha;
    let (a, b) = (1.0 - 1.0 / alpha, 1.0 / alpha);
    let ln_beta = log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?;
    let m = RVExpr::kanter(c).mellin(t)?;
    let ln_x = x.ln();
    // k^t f_Y(x/k)/k with ln(1 − k/x) supplied by the caller
    let body = |lk: f64, ln_one_minus: f64| -> f64 {
        let ln_y = ln_x - lk;
        (t * lk - lk + (-a - 1.0) * ln_y + (b - 1.0) * ln_one_minus - ln_beta).exp()
    };
    let value = if x >= 1.0 {
        let piece = |a: f64, b: f64| -> Result<f64> {
            let f = |u: f64, _: f64, to_b: f64| {
                let w = if b == 1.0 { to_b } else { 1.0 - u };
                let lk = ln_k(c, u, w);
                body(lk, (-(lk - ln_x).exp_m1()).ln())
            };
            Ok(tanh_sinh_abs(f, a, b, PRODUCT_TOL, PRODUCT_ABS_TOL)?.value)
        };
        // for x just above 1 the factor (1 − k/x)^{b−1} peaks sharply near
        // u = 0; split where 1 − k/x has doubled from its value there
        if x < 2.0 {
            let split = kanter_inverse(c, (2.0 - x).ln())?.u;
            piece(0.0, split)? + piece(split, 1.0)?
        } else {
            piece(0.0, 1.0)?
        }
    } else {
        let root = kanter_inverse(c, ln_x)?;
        tanh_sinh_abs(
            |u, d, w| {
                // u = u_x + d, ln k(u) − ln x < 0
                let diff = ln_k_increment(c, root.u, root.w, d, u, w);
                let lk = ln_x + diff;
                body(lk, (-diff.exp_m1()).ln())
            },
            root.u,
            1.0,
            PRODUCT_TOL,
            PRODUCT_ABS_TOL,
        )?
        .value
    };
    Ok(value / m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Tolerance};

    fn p(a: f64, r: f64) -> StableParams {
        StableParams::new(a, r).unwrap()
    }

    #[test]
    fn first_factor_integrates_to_one() {
        for &(a, r) in &[(1.5, 1.0 / 3.0), (1.2, 0.5), (1.9, 0.5), (1.7, 0.55)] {
            let q = p(a, r);
            let g = |t: f64| density_first_factor(&q, t).unwrap();
            let below = integrate(g, &[0.0, 0.5, 1.0], Tolerance::default()).unwrap().value;
            // the upper tail decays like t^{1/α−2}; integrate it in 1/t
            let above_from = |t: f64| {
                integrate(|y| g(1.0 / y) / (y * y), &[0.0, 1.0 / t], Tolerance::default())
                    .unwrap()
                    .value
            };
            let above = above_from(1.0);
            assert!((below + above - 1.0).abs() < 1e-8, "({a},{r}): {}", below + above);
            assert!((first_factor_cdf(&q, 1.0).unwrap() - below).abs() < 1e-10);
            assert!((first_factor_cdf(&q, 3.0).unwrap() + above_from(3.0) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn first_factor_spectrally_positive_form() {
        // ρα = α − 1: −sin(πα) t^{1/α} / (π (t² − 2t cos πα + 1))
        let a = 1.5;
        let q = p(a, 1.0 - 1.0 / a);
        for &t in &[0.1f64, 1.0, 4.0] {
            let pi = std::f64::consts::PI;
            let want = -(pi * a).sin() * t.powf(1.0 / a) / (pi * (t * t - 2.0 * t * (pi * a).cos() + 1.0));
            let got = density_first_factor(&q, t).unwrap();
            assert!(((got - want) / want).abs() < 1e-14);
        }
    }

    #[test]
    fn first_factor_rejects_boundary() {
        assert!(density_first_factor(&p(2.0, 0.5), 1.0).is_err());
        assert!(density_first_factor(&p(1.5, 2.0 / 3.0), 1.0).is_err());
    }

    #[test]
    fn stable_half_distribution_function() {
        // erfc(1/(2√x)) and its complement
        let cases = [
            (0.1, 0.0253473186774682679964029046722, 0.974652681322531732003597095328),
            (1.0, 0.479500122186953462317253346108, 0.520499877813046537682746653892),
            (10.0, 0.823063273758121476112649059446, 0.176936726241878523887350940554),
            (
                1e10,
                0.999994358104164569452929147833,
                0.00000564189583543054707085216744352,
            ),
        ];
        for (x, cdf, sf) in cases {
            assert!((cdf_stable_pos(0.5, x).unwrap() - cdf).abs() < 1e-12, "x={x}");
            assert!(((sf_stable_pos(0.5, x).unwrap() - sf) / sf).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn stable_half_matches_closed_form() {
        let mut x = 0.05;
        while x <= 20.0 {
            let got = density_stable_pos(0.5, x).unwrap();
            let want = stable_half_density(x);
            assert!(((got - want) / want).abs() < 1e-8, "x={x}: {got} vs {want}");
            x *= 1.07;
        }
    }

    #[test]
    fn stable_density_normalized_with_negative_moment() {
        for &c in &[0.3, 0.5, 0.7, 0.9] {
            let f = |y: f64| {
                let x = y.exp();
                density_stable_pos(c, x).unwrap() * x
            };
            let mass = integrate(
                f,
                &[-12.0, -4.0, -1.0, 0.0, 1.0, 4.0, 20.0, 80.0, 300.0],
                Tolerance::new(1e-12, 1e-11),
            )
            .unwrap()
            .value;
            // right tail beyond e^{300} is ~ e^{−300c}
            assert!((mass - 1.0).abs() < 1e-8, "c={c}: {mass}");
        }
        let inv = integrate(
            |y: f64| density_stable_pos(0.5, y.exp()).unwrap(),
            &[-12.0, -4.0, -1.0, 0.0, 1.0, 4.0, 20.0, 80.0],
            Tolerance::new(1e-12, 1e-11),
        )
        .unwrap()
        .value;
        assert!((inv - 2.0).abs() < 1e-8);
    }

    #[test]
    fn stable_density_vanishes_fast_at_zero() {
        assert!(density_stable_pos(0.5, 1e-3).unwrap() < 1e-100);
        assert!(density_stable_pos(0.7, 1e-2).unwrap() < 1e-10);
    }

    #[test]
    fn kanter_density_normalized_and_mean() {
        // near 1 the density blows up like (1−x)^{−1/2}; the mass above
        // 1 − δ is P(U < u(1−δ)) = u(1−δ) exactly
        let delta: f64 = 1e-6;
        // x = 1 − y² removes the square-root growth
        let integral = |f: &dyn Fn(f64) -> f64| {
            tanh_sinh(|y, _, to_one| f(to_one * (1.0 + y)) * 2.0 * y, delta.sqrt(), 1.0, 1e-12)
                .unwrap()
                .value
        };
        for &c in &[0.25, 0.5, 0.75] {
            let top = kanter_inverse(c, (1.0 - delta).ln()).unwrap().u;
            let mass = integral(&|x| density_kanter(c, x, 0.0).unwrap()) + top;
            assert!((mass - 1.0).abs() < 1e-9, "c={c}: {mass}");
        }
        let top = kanter_inverse(0.5, (1.0 - delta).ln()).unwrap().u;
        let mean = integral(&|x| x * density_kanter(0.5, x, 0.0).unwrap());
        // E[K; K > 1−δ] lies between (1−δ)·top and top
        assert!((mean + top - 2.0 / std::f64::consts::PI).abs() < 2e-6);
        // K^q ∈ [(1−δ)^q, 1] above 1 − δ, so that mass is top / E[K^q] to O(δ)
        let top = kanter_inverse(0.6, (1.0 - delta).ln()).unwrap().u / RVExpr::kanter(0.6).mellin(-0.7).unwrap();
        let biased = integral(&|x| density_kanter(0.6, x, -0.7).unwrap()) + top;
        assert!((biased - 1.0).abs() < 1e-8, "{biased}");
    }

    #[test]
    fn biased_kanter_density_increases_for_ksym_orders() {
        for &a in &[1.2, 1.5, 1.8] {
            let mut prev = 0.0;
            for i in 1..2000 {
                let x = i as f64 / 2000.0;
                let v = density_kanter(a / 2.0, x, 1.0 / a).unwrap();
                assert!(v >= prev * (1.0 - 1e-12), "alpha={a} x={x}");
                prev = v;
            }
        }
    }

    #[test]
    fn beta_inverse_density() {
        // singular at 1 and heavy-tailed, so integrate in b = 1/y
        let m = tanh_sinh(
            |b, _, _| density_beta_inverse(0.4, 0.6, 1.0 / b).unwrap() / (b * b),
            0.0,
            1.0,
            1e-12,
        )
        .unwrap()
        .value;
        assert!((m - 1.0).abs() < 1e-9);
    }

    #[test]
    fn kasym_density_normalized() {
        let kp = KasymParams {
            r: 0.5,
            s: 1.0,
            beta: 0.6,
            gamma: 0.3,
            t: 0.5,
        };
        let mass = integrate(
            |y: f64| {
                let x = y.exp();
                kasym_product_density(&kp, x).unwrap() * x
            },
            &[0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0, 120.0],
            Tolerance::new(1e-10, 1e-9),
        )
        .unwrap()
        .value;
        assert!((mass - 1.0).abs() < 1e-6, "{mass}");
    }

    #[test]
    fn kasym_converges_far_from_one() {
        // the integrand is ~ d^{-1/2} at the upper end; ell must keep full
        // relative precision there for the quadrature to converge
        let kp = KasymParams {
            r: 1.0,
            s: 1.2,
            beta: 0.6,
            gamma: 1.0 / 1.2,
            t: 1.0 / 1.2,
        };
        let mut prev = f64::INFINITY;
        for &x in &[64.001_894_092_376_29, 106.388_987_063_762_8, 933.048_074_223_756_5] {
            let f = kasym_product_density(&kp, x).unwrap();
            assert!(f > 0.0 && f < prev, "x={x} f={f}");
            prev = f;
        }
    }

    #[test]
    fn ksym_density_normalized() {
        let a = 1.5;
        let mass = integrate(
            |y: f64| {
                let x = y.exp();
                ksym_product_density(a, x).unwrap() * x
            },
            &[-30.0, -10.0, -3.0, -1.0, -0.3, 0.0, 0.3, 1.0, 3.0, 10.0, 40.0, 200.0],
            Tolerance::new(1e-10, 1e-9),
        )
        .unwrap()
        .value;
        assert!((mass - 1.0).abs() < 1e-6, "{mass}");
    }
}
