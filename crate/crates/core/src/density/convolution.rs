//! Density of τ as the multiplicative convolution of its first factor `U`
//! with an independent `Z_{1/α}`.
//!
//! In logarithms `ln τ = ln U + ln Z`, so `p(y) = ∫ p_U(y − z) p_Z(z) dz`.
//! `p_Z` is tabulated once on a uniform lattice; `p_U` is closed form and
//! analytic in a strip of half-width `π(1 − ρα)`, which makes the lattice
//! sum converge geometrically in the step.

use rayon::prelude::*;

use super::factors::{cdf_stable_pos, density_stable_pos, sf_stable_pos};
use super::{resolve_grid, DensityGrid, GridSpec};
use crate::error::{Error, Result};
use crate::mellin::StableParams;
use crate::specfun::{cos_pi, sin_pi};

pub const CONVOLUTION_MASS_TOLERANCE: f64 = 1e-6;
const Z_LEFT_CUTOFF: f64 = 1e-16;
const Z_RIGHT_CUTOFF: f64 = 1e-10;
const MAX_TABLE_CELLS: usize = 400_000;

/// 5-point Gauss–Legendre nodes and weights on [−1, 1].
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// Log-scale density of the first factor, `p_U(v) = g(e^v) e^v`.
#[derive(Debug, Clone, Copy)]
struct FirstFactor {
    k: f64,
    cos: f64,
    inv_alpha: f64,
}

impl FirstFactor {
    fn new(p: &StableParams) -> Self {
        let alpha = p.alpha();
        Self {
            k: sin_pi(p.rho_alpha()) * sin_pi(1.0 / alpha) / (std::f64::consts::PI * sin_pi(p.rho())),
            cos: cos_pi(p.rho_alpha()),
            inv_alpha: 1.0 / alpha,
        }
    }

    fn log_density(&self, v: f64) -> f64 {
        if v <= 0.0 {
            let t = v.exp();
            self.k * ((1.0 + self.inv_alpha) * v).exp() / (1.0 + t * (2.0 * self.cos + t))
        } else {
            let r = (-v).exp();
            self.k * ((self.inv_alpha - 1.0) * v).exp() / (1.0 + r * (2.0 * self.cos + r))
        }
    }

    /// `P(ln U ≤ v)` for `v → −∞`.
    fn lower_asymptote(&self, v: f64) -> f64 {
        self.k * ((1.0 + self.inv_alpha) * v).exp() / (1.0 + self.inv_alpha)
    }

    /// `P(ln U > v)` for `v → ∞`.
    fn upper_asymptote(&self, v: f64) -> f64 {
        self.k * ((self.inv_alpha - 1.0) * v).exp() / (1.0 - self.inv_alpha)
    }
}

/// Distribution and survival functions of `ln U` on a lattice, by
/// Gauss–Legendre accumulation from each end; read back with cubic Hermite
/// interpolation using the exact derivative.
#[derive(Debug, Clone)]
struct FirstFactorTable {
    u: FirstFactor,
    v0: f64,
    h: f64,
    cdf: Vec<f64>,
    sf: Vec<f64>,
}

impl FirstFactorTable {
    fn new(u: FirstFactor, h: f64) -> Result<Self> {
        let v0 = -40.0 / (1.0 + u.inv_alpha);
        let v1 = 30.0 / (1.0 - u.inv_alpha);
        let cells = ((v1 - v0) / h).ceil() as usize;
        if cells > MAX_TABLE_CELLS {
            return Err(Error::Tabulation {
                target: h,
                achieved: (v1 - v0) / MAX_TABLE_CELLS as f64,
                nodes: cells,
            });
        }
        let cell_mass: Vec<f64> = (0..cells)
            .map(|i| {
                let mid = v0 + (i as f64 + 0.5) * h;
                GL5.iter()
                    .map(|(x, w)| w * u.log_density(mid + 0.5 * h * x))
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .collect();
        let mut cdf = Vec::with_capacity(cells + 1);
        cdf.push(u.lower_asymptote(v0));
        for m in &cell_mass {
            cdf.push(cdf.last().expect("seeded") + m);
        }
        let mut sf = vec![0.0; cells + 1];
        sf[cells] = u.upper_asymptote(v0 + cells as f64 * h);
        for i in (0..cells).rev() {
            sf[i] = sf[i + 1] + cell_mass[i];
        }
        Ok(Self { u, v0, h, cdf, sf })
    }

    fn hermite(&self, table: &[f64], sign: f64, v: f64) -> Option<f64> {
        let pos = (v - self.v0) / self.h;
        if !(pos >= 0.0) || pos >= (table.len() - 1) as f64 {
            return None;
        }
        let i = pos.floor() as usize;
        let t = pos - i as f64;
        let (a, b) = (self.v0 + i as f64 * self.h, self.v0 + (i + 1) as f64 * self.h);
        let (da, db) = (
            sign * self.u.log_density(a) * self.h,
            sign * self.u.log_density(b) * self.h,
        );
        let (t2, t3) = (t * t, t * t * t);
        Some(
            (2.0 * t3 - 3.0 * t2 + 1.0) * table[i]
                + (t3 - 2.0 * t2 + t) * da
                + (-2.0 * t3 + 3.0 * t2) * table[i + 1]
                + (t3 - t2) * db,
        )
    }

    fn cdf(&self, v: f64) -> f64 {
        if v < self.v0 {
            return self.u.lower_asymptote(v);
        }
        self.hermite(&self.cdf, 1.0, v)
            .unwrap_or_else(|| 1.0 - self.u.upper_asymptote(v))
    }

    fn sf(&self, v: f64) -> f64 {
        if v < self.v0 {
            return 1.0 - self.u.lower_asymptote(v);
        }
        self.hermite(&self.sf, -1.0, v)
            .unwrap_or_else(|| self.u.upper_asymptote(v))
    }
}

#[derive(Debug, Clone)]
enum Route {
    /// ρα = 1: τ is `Z_{1/α}` itself.
    Stable { c: f64 },
    Product {
        u: FirstFactorTable,
        h: f64,
        z0: f64,
        /// `p_Z` at `z0 + j h`.
        pz: Vec<f64>,
        z_right_mass: f64,
    },
}

/// Tabulated ingredients of the convolution for one parameter pair.
#[derive(Debug, Clone)]
pub struct ConvolutionRoute {
    params: StableParams,
    route: Route,
}

impl ConvolutionRoute {
    pub fn new(params: StableParams) -> Result<Self> {
        let c = 1.0 / params.alpha();
        if params.is_spectrally_negative() {
            return Ok(Self {
                params,
                route: Route::Stable { c },
            });
        }
        let h = (0.01f64).min((1.0 - params.rho_alpha()) / 5.0);
        let mut zl = 0.0f64;
        while cdf_stable_pos(c, zl.exp())? > Z_LEFT_CUTOFF {
            zl -= 1.0;
        }
        let mut zr = 1.0f64;
        let mut z_right_mass = sf_stable_pos(c, zr.exp())?;
        while z_right_mass > Z_RIGHT_CUTOFF {
            zr += 2.0;
            z_right_mass = sf_stable_pos(c, zr.exp())?;
        }
        let n = ((zr - zl) / h).ceil() as usize + 1;
        let pz = (0..n)
            .into_par_iter()
            .map(|j| {
                let z = zl + j as f64 * h;
                let x = z.exp();
                Ok(density_stable_pos(c, x)? * x)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            params,
            route: Route::Product {
                u: FirstFactorTable::new(FirstFactor::new(&params), h)?,
                h,
                z0: zl,
                pz,
                z_right_mass,
            },
        })
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    /// `h Σ' w(j) p_Z(z_j)` over the lattice.
    fn lattice_sum<F: Fn(f64) -> f64>(h: f64, z0: f64, pz: &[f64], w: F) -> f64 {
        let last = pz.len() - 1;
        let body: f64 = pz
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let term = w(z0 + j as f64 * h) * p;
                if j == 0 || j == last {
                    0.5 * term
                } else {
                    term
                }
            })
            .sum();
        h * body
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || x.is_infinite() {
            return Ok(0.0);
        }
        match &self.route {
            Route::Stable { c } => density_stable_pos(*c, x),
            Route::Product { u, h, z0, pz, .. } => {
                let y = x.ln();
                Ok(Self::lattice_sum(*h, *z0, pz, |z| u.u.log_density(y - z)) / x)
            }
        }
    }

    /// `P(τ ≤ x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Ok(0.0);
        }
        match &self.route {
            Route::Stable { c } => cdf_stable_pos(*c, x),
            Route::Product { u, h, z0, pz, .. } => {
                let y = x.ln();
                Ok(Self::lattice_sum(*h, *z0, pz, |z| u.cdf(y - z)))
            }
        }
    }

    /// `P(τ > x)`.
    pub fn sf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Ok(1.0);
        }
        match &self.route {
            Route::Stable { c } => sf_stable_pos(*c, x),
            Route::Product {
                u,
                h,
                z0,
                pz,
                z_right_mass,
            } => {
                let y = x.ln();
                Ok(Self::lattice_sum(*h, *z0, pz, |z| u.sf(y - z)) + z_right_mass)
            }
        }
    }
}

/// Density of τ on a grid by multiplicative convolution of its factors.
pub fn density_tau_convolution(params: &StableParams, spec: &GridSpec) -> Result<DensityGrid> {
    let route = ConvolutionRoute::new(*params)?;
    let (xs, ws) = resolve_grid(spec, |lo, hi| Ok((route.cdf(lo)?, route.sf(hi)?)))?;
    let values = xs
        .par_iter()
        .map(|&x| route.density(x).map(|v| v.max(0.0)))
        .collect::<Result<Vec<f64>>>()?;
    let tail = route.cdf(xs[0])? + route.sf(*xs.last().expect("non-empty"))?;
    let grid = DensityGrid::new(xs, values, ws, CONVOLUTION_MASS_TOLERANCE, tail)?;
    if !grid.satisfies_mass() {
        return Err(Error::Quadrature {
            achieved: grid.mass_defect(),
            target: CONVOLUTION_MASS_TOLERANCE,
        });
    }
    Ok(grid
        .with_meta("method", "convolution")
        .with_meta("alpha", params.alpha())
        .with_meta("rho", params.rho()))
}
