//! Inverse-CDF tabulation for size-biased Kanter variables `K_c^{(u)}`, −1 < u < 0.
//!
//! With `K = b_c(V)/κ_c` and `V` uniform, `K^{(u)}` is `b_c(V')/κ_c` where `V'`
//! has density `∝ b_c(v)^u` on (0,1). That density blows up like `(1−v)^u`
//! at v = 1, so the table lives in `w = (1−v)^{1+u}`, where it becomes
//! `g(w) = (K/(1−v))^u / (1+u)`: bounded, smooth, and integrating to `E[K^u]`.

use crate::error::{Error, Result};
use crate::quadrature::qk15;
use crate::specfun::{ln_kanter_ratio, ln_kanter_ratio_complement};

const INITIAL_CELLS: usize = 4096;
const MAX_CELLS: usize = 1 << 18;
pub const DEFAULT_CDF_TOLERANCE: f64 = 1e-6;

/// Tabulated CDF of `w` with monotone cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct KanterBiasTable {
    c: f64,
    u: f64,
    exponent: f64,
    nodes: Vec<f64>,
    cdf: Vec<f64>,
    slopes: Vec<f64>,
    normalizer: f64,
    cdf_error: f64,
}

/// `(1 − v, v)` and `ln K` at table coordinate `w`, all to full relative precision.
fn kanter_at(c: f64, exponent: f64, w: f64) -> (f64, f64) {
    let lw = w.max(1e-300).ln() * exponent;
    let one_minus_v = lw.exp().max(1e-300);
    let v = -lw.exp_m1();
    let ln_k = if v <= 0.5 {
        ln_kanter_ratio(c, v)
    } else {
        ln_kanter_ratio_complement(c, one_minus_v)
    };
    (one_minus_v, ln_k)
}

fn table_density(c: f64, u: f64, exponent: f64, w: f64) -> f64 {
    let (one_minus_v, ln_k) = kanter_at(c, exponent, w);
    (u * (ln_k - one_minus_v.ln())).exp() / (1.0 + u)
}

impl KanterBiasTable {
    pub fn new(c: f64, u: f64) -> Result<Self> {
        Self::with_tolerance(c, u, DEFAULT_CDF_TOLERANCE)
    }

    pub fn with_tolerance(c: f64, u: f64, tolerance: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::Domain(format!("kanter index {c} outside (0,1)")));
        }
        if !(u > -1.0 && u < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "inverse-CDF tabulation is for orders in (−1, 0), got {u}"
            )));
        }
        let mut cells = INITIAL_CELLS;
        loop {
            let table = Self::build(c, u, cells);
            if table.cdf_error <= tolerance {
                return Ok(table);
            }
            if cells >= MAX_CELLS {
                return Err(Error::Tabulation {
                    target: tolerance,
                    achieved: table.cdf_error,
                    nodes: cells + 1,
                });
            }
            cells *= 2;
        }
    }

    fn build(c: f64, u: f64, cells: usize) -> Self {
        let exponent = 1.0 / (1.0 + u);
        let g = |w: f64| table_density(c, u, exponent, w);
        let nodes: Vec<f64> = (0..=cells).map(|i| i as f64 / cells as f64).collect();
        let mut cdf = Vec::with_capacity(cells + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for pair in nodes.windows(2) {
            acc += qk15(&g, pair[0], pair[1]).value;
            cdf.push(acc);
        }
        let normalizer = acc;
        for v in cdf.iter_mut() {
            *v /= normalizer;
        }
        *cdf.last_mut().expect("non-empty") = 1.0;
        let mut slopes: Vec<f64> = nodes.iter().map(|&w| g(w) / normalizer).collect();
        limit_slopes(&nodes, &cdf, &mut slopes);
        let mut table = Self {
            c,
            u,
            exponent,
            nodes,
            cdf,
            slopes,
            normalizer,
            cdf_error: 0.0,
        };
        // interpolation error at cell midpoints against exact partial integrals
        let mut worst: f64 = 0.0;
        for i in 0..cells {
            let (a, b) = (table.nodes[i], table.nodes[i + 1]);
            let mid = 0.5 * (a + b);
            let exact = table.cdf[i] + qk15(&g, a, mid).value / normalizer;
            worst = worst.max((table.hermite(i, mid) - exact).abs());
        }
        table.cdf_error = worst;
        table
    }

    fn hermite(&self, i: usize, w: f64) -> f64 {
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let h = x1 - x0;
        let t = (w - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.cdf[i] + h10 * h * self.slopes[i] + h01 * self.cdf[i + 1] + h11 * h * self.slopes[i + 1]
    }

    fn hermite_slope(&self, i: usize, w: f64) -> f64 {
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let h = x1 - x0;
        let t = (w - x0) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.cdf[i] + d10 * self.slopes[i] + d01 * self.cdf[i + 1] + d11 * self.slopes[i + 1]
    }

    /// Table coordinate `w` at CDF level `p ∈ (0,1)`.
    pub fn quantile_w(&self, p: f64) -> f64 {
        let i = match self.cdf.partition_point(|&f| f <= p) {
            0 => 0,
            k => (k - 1).min(self.nodes.len() - 2),
        };
        let (mut lo, mut hi) = (self.nodes[i], self.nodes[i + 1]);
        let span = self.cdf[i + 1] - self.cdf[i];
        let mut w = if span > 0.0 {
            lo + (hi - lo) * ((p - self.cdf[i]) / span).clamp(0.0, 1.0)
        } else {
            lo
        };
        for _ in 0..60 {
            let f = self.hermite(i, w) - p;
            if f > 0.0 {
                hi = w;
            } else {
                lo = w;
            }
            let d = self.hermite_slope(i, w);
            let mut next = if d > 0.0 { w - f / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - w).abs() <= 1e-15 * (hi - lo).max(f64::MIN_POSITIVE) || hi - lo < 1e-16 {
                return next;
            }
            w = next;
        }
        w
    }

    /// `ln K` of a draw at CDF level `p`.
    pub fn ln_kanter_at(&self, p: f64) -> f64 {
        kanter_at(self.c, self.exponent, self.quantile_w(p)).1
    }

    /// `E[K^u]`, the normalizing constant of the tabulated law.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Maximum CDF interpolation error found at cell midpoints.
    pub fn cdf_error(&self) -> f64 {
        self.cdf_error
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn order(&self) -> f64 {
        self.u
    }

    pub fn index(&self) -> f64 {
        self.c
    }
}

/// Fritsch–Carlson limiter: keeps the Hermite interpolant monotone.
fn limit_slopes(x: &[f64], y: &[f64], m: &mut [f64]) {
    for i in 0..x.len() - 1 {
        let delta = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if delta <= 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / delta;
        let b = m[i + 1] / delta;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * a * delta;
            m[i + 1] = tau * b * delta;
        }
    }
}
