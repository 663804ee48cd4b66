//! Density reconstruction for τ and its factors, and modality analysis.
//!
//! τ has two independent routes: numerical inversion of the closed-form
//! Mellin transform ([`density_tau_mellin`]) and the multiplicative
//! convolution of the first-factor density with the `Z_{1/α}` density
//! ([`density_tau_convolution`]). Both fill a [`DensityGrid`] on a
//! log-uniform abscissa and report the probability outside it.

mod complex;
mod convolution;
mod factors;
mod mellin_inv;
mod mode;

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use complex::{ln_gamma as ln_gamma_complex, ln_sin_pi as ln_sin_pi_complex};
pub use convolution::{density_tau_convolution, ConvolutionRoute};
pub use factors::{
    cdf_stable_pos, density_beta_inverse, density_first_factor, density_kanter, density_stable_pos, first_factor_cdf,
    kasym_product_density, ksym_product_density, sf_stable_pos, stable_half_density, KasymParams,
};
pub use mellin_inv::{density_tau_mellin, MellinInverter};
pub use mode::{find_mode, ModeReport, DEFAULT_SMOOTHING_TOLERANCE};

/// Schema version of the JSON form of [`DensityGrid`].
pub const GRID_SCHEMA_VERSION: u32 = 1;

/// How to choose abscissae for a τ density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// Log-uniform with step [`AUTO_LOG_STEP`], wide enough that each tail
    /// outside the grid carries at most [`AUTO_TAIL_MASS`].
    Auto,
    LogUniform {
        min: f64,
        max: f64,
        points: usize,
    },
}

pub const AUTO_LOG_STEP: f64 = 0.01;
pub const AUTO_TAIL_MASS: f64 = 2.5e-4;

/// Strictly increasing abscissae with density values and quadrature weights.
///
/// Invariant: `|Σ values·weights + tail_mass − 1| ≤ mass_tolerance`, where
/// `tail_mass` is the probability outside `[x_0, x_last]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub schema_version: u32,
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub mass_tolerance: f64,
    pub tail_mass: f64,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl DensityGrid {
    pub fn new(
        abscissae: Vec<f64>,
        values: Vec<f64>,
        weights: Vec<f64>,
        mass_tolerance: f64,
        tail_mass: f64,
    ) -> Result<Self> {
        let n = abscissae.len();
        if n < 3 || values.len() != n || weights.len() != n {
            return Err(Error::DegenerateGrid(format!(
                "need ≥ 3 points with matching lengths (x {n}, f {}, w {})",
                values.len(),
                weights.len()
            )));
        }
        if !(abscissae[0] > 0.0) || abscissae.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::DegenerateGrid(
                "abscissae must be positive and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::DegenerateGrid(
                "density values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            schema_version: GRID_SCHEMA_VERSION,
            abscissae,
            values,
            weights,
            mass_tolerance,
            tail_mass,
            metadata: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    /// `Σ values·weights`, the mass on the grid.
    pub fn mass(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// `|mass + tail_mass − 1|`.
    pub fn mass_defect(&self) -> f64 {
        (self.mass() + self.tail_mass - 1.0).abs()
    }

    pub fn satisfies_mass(&self) -> bool {
        self.mass_defect() <= self.mass_tolerance
    }

    /// `Σ x^s f(x) w`, the grid part of `E[X^s]`.
    pub fn moment(&self, s: f64) -> f64 {
        self.abscissae
            .iter()
            .zip(&self.values)
            .zip(&self.weights)
            .map(|((x, v), w)| x.powf(s) * v * w)
            .sum()
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    /// Largest `|f − g|` over the points whose abscissa lies in `[lo, hi]`.
    /// Both grids must share abscissae.
    pub fn sup_distance(&self, other: &DensityGrid, lo: f64, hi: f64) -> Result<f64> {
        if self.abscissae != other.abscissae {
            return Err(Error::InvalidArgument("grids have different abscissae".into()));
        }
        Ok(self
            .abscissae
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .filter(|(x, _)| **x >= lo && **x <= hi)
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// CSV with columns `x,f,weight`, preceded by `# key=value` comment lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# schema_version={}", self.schema_version)?;
        writeln!(w, "# mass_tolerance={:e}", self.mass_tolerance)?;
        writeln!(w, "# tail_mass={:e}", self.tail_mass)?;
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "x,f,weight")?;
        for i in 0..self.len() {
            writeln!(w, "{:e},{:e},{:e}", self.abscissae[i], self.values[i], self.weights[i])?;
        }
        Ok(w.flush()?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid serializes")
    }
}

/// Log-uniform abscissae on `[min, max]` with trapezoid weights for `∫ f dx`.
pub fn log_uniform(min: f64, max: f64, points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(min > 0.0 && max > min && points >= 3) {
        return Err(Error::DegenerateGrid(format!(
            "log-uniform grid needs 0 < min < max and ≥ 3 points (got {min}, {max}, {points})"
        )));
    }
    let (a, b) = (min.ln(), max.ln());
    let h = (b - a) / (points - 1) as f64;
    let mut xs: Vec<f64> = (0..points).map(|i| (a + h * i as f64).exp()).collect();
    xs[0] = min;
    xs[points - 1] = max;
    let ws = xs
        .iter()
        .enumerate()
        .map(|(i, x)| if i == 0 || i == points - 1 { 0.5 * h * x } else { h * x })
        .collect();
    Ok((xs, ws))
}

/// Resolves a [`GridSpec`] given a function returning the two tail masses
/// `(P(X < x_lo), P(X > x_hi))` for candidate bounds.
pub(crate) fn resolve_grid<F>(spec: &GridSpec, tails: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64, f64) -> Result<(f64, f64)>,
{
    match *spec {
        GridSpec::LogUniform { min, max, points } => log_uniform(min, max, points),
        GridSpec::Auto => {
            let (mut lo, mut hi) = (-3.0f64, 3.0f64);
            for _ in 0..200 {
                let (left, _) = tails(lo.exp(), hi.exp())?;
                if left <= AUTO_TAIL_MASS {
                    break;
                }
                lo -= 1.0;
            }
            for _ in 0..400 {
                let (_, right) = tails(lo.exp(), hi.exp())?;
                if right <= AUTO_TAIL_MASS {
                    break;
                }
                hi += 2.0;
            }
            let points = ((hi - lo) / AUTO_LOG_STEP).round() as usize + 1;
            log_uniform(lo.exp(), hi.exp(), points)
        }
    }
}
