//! Numerical integration used by the density and verification modules.
//!
//! Two schemes:
//! - adaptive Gauss–Kronrod (7/15 points) for smooth integrands, with a
//!   rational map for half-lines;
//! - tanh–sinh for integrands with algebraic endpoint singularities. The
//!   integrand receives the distances to both endpoints, computed without
//!   cancellation, so singular factors like `(b − x)^{-1/2}` stay accurate.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

/// One 15-point Kronrod panel on `[a, b]`, with the embedded 7-point Gauss
/// difference as error estimate.
pub fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Quad {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let s = f(center - dx) + f(center + dx);
        kronrod += w * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Quad {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Tolerances and subdivision budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-13,
            rel: 1e-11,
            max_panels: 2000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }
}

/// Globally adaptive G7K15 on `[a, b]` over the given breakpoints.
pub fn integrate<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Result<Quad> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("need at least two breakpoints".into()));
    }
    let mut panels: Vec<(f64, f64, Quad)> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1], qk15(&f, w[0], w[1])))
        .collect();
    loop {
        let value: f64 = panels.iter().map(|p| p.2.value).sum();
        let error: f64 = panels.iter().map(|p| p.2.error).sum();
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            return Ok(Quad { value, error });
        }
        if panels.len() >= tol.max_panels {
            return Err(Error::Quadrature {
                achieved: error,
                target,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .expect("non-empty");
        let (a, b, _) = panels.swap_remove(idx);
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            // cannot split further; accept what we have
            let value: f64 = panels.iter().map(|p| p.2.value).sum::<f64>() + qk15(&f, a, b).value;
            return Ok(Quad { value, error });
        }
        panels.push((a, m, qk15(&f, a, m)));
        panels.push((m, b, qk15(&f, m, b)));
    }
}

/// ∫_a^∞ f via x = a + t/(1−t), t ∈ [0, 1).
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<Quad> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - t;
        let x = a + t / one_minus;
        let v = f(x) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, &[0.0, 0.5, 0.9, 0.99, 1.0], tol)
}

/// Tanh–sinh quadrature on `[a, b]`.
///
/// `f(x, x − a, b − x)` receives both endpoint distances computed from the
/// node transform itself. Nodes whose distance underflows to zero are skipped.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Quad> {
    tanh_sinh_abs(f, a, b, rel_tol, 0.0)
}

/// [`tanh_sinh`] that also accepts an absolute error below `abs_tol`.
pub fn tanh_sinh_abs<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Quad> {
    if !(b > a) {
        return Ok(Quad { value: 0.0, error: 0.0 });
    }
    let half = 0.5 * (b - a);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let eval = |t: f64| -> f64 {
        let s = half_pi * t.sinh();
        let c = half_pi * t.cosh();
        // 1 − tanh(s) = 2 / (1 + e^{2s}), 1 + tanh(s) = 2 / (1 + e^{−2s})
        let to_b = half * 2.0 / (1.0 + (2.0 * s).exp());
        let to_a = half * 2.0 / (1.0 + (-2.0 * s).exp());
        if to_a <= 0.0 || to_b <= 0.0 {
            return 0.0;
        }
        let x = if s >= 0.0 { b - to_b } else { a + to_a };
        let cosh_s = s.cosh();
        let w = half * c / (cosh_s * cosh_s);
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        let v = f(x, to_a, to_b);
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };
    let t_max = 4.5;
    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut prev_diff = f64::INFINITY;
    for level in 1..=12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let next = sum * h;
        let diff = (next - estimate).abs();
        estimate = next;
        if level >= 3 && (diff <= rel_tol * estimate.abs() || diff <= abs_tol) {
            return Ok(Quad {
                value: estimate,
                error: diff,
            });
        }
        prev_diff = diff;
    }
    Err(Error::Quadrature {
        achieved: prev_diff,
        target: (rel_tol * estimate.abs()).max(abs_tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_for_polynomials() {
        let q = qk15(&|x: f64| x.powi(10) - 3.0 * x.powi(3) + 1.0, 0.0, 2.0);
        let exact = 2f64.powi(11) / 11.0 - 3.0 * 4.0 + 2.0;
        assert!((q.value - exact).abs() < 1e-11);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let q = integrate(|x| 1.0 / (1e-4 + x * x), &[-1.0, 1.0], Tolerance::default()).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((q.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn half_line_integral() {
        let q = integrate_to_infinity(|x| (-x).exp(), 0.0, Tolerance::default()).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12);
        let q = integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 0.0, Tolerance::default()).unwrap();
        assert!((q.value - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        // ∫_0^1 x^{-1/2} (1−x)^{-2/3} dx = B(1/2, 1/3)
        let q = tanh_sinh(|_, da, db| da.powf(-0.5) * db.powf(-2.0 / 3.0), 0.0, 1.0, 1e-12).unwrap();
        let exact = 4.206_546_315_976_36;
        assert!((q.value - exact).abs() < 1e-10, "{}", q.value);
    }
}
