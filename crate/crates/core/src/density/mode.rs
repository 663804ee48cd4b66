use serde::{Deserialize, Serialize};

use super::DensityGrid;
use crate::error::{Error, Result};

/// Relative prominence below which a local maximum is treated as ripple.
pub const DEFAULT_SMOOTHING_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    /// Location of the global maximum, refined by a parabola through its neighbours.
    pub mode_location: f64,
    pub mode_value: f64,
    /// Number of local maxima whose prominence, relative to the global
    /// maximum, exceeds `smoothing_tolerance`.
    pub local_max_count: usize,
    pub smoothing_tolerance: f64,
    /// Abscissae of the counted maxima.
    pub maxima: Vec<f64>,
}

/// Counts the significant local maxima of a gridded density.
///
/// A maximum's prominence is its height above the higher of the two lowest
/// points separating it from taller terrain on either side; grid ends count
/// as maxima when the density falls away from them.
pub fn find_mode(grid: &DensityGrid, smoothing_tolerance: f64) -> Result<ModeReport> {
    let x = &grid.abscissae;
    let v = &grid.values;
    let n = v.len();
    if n < 3 {
        return Err(Error::DegenerateGrid("need at least 3 points".into()));
    }
    let (imax, &vmax) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if !(vmax > 0.0) {
        return Err(Error::DegenerateGrid("density is identically zero".into()));
    }

    // collapse plateaus into single candidates at their first index
    let mut candidates = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && v[j + 1] == v[i] {
            j += 1;
        }
        let left_ok = i == 0 || v[i - 1] < v[i];
        let right_ok = j == n - 1 || v[j + 1] < v[i];
        if left_ok && right_ok {
            candidates.push((i, j));
        }
        i = j + 1;
    }

    let mut maxima = Vec::new();
    for &(start, end) in &candidates {
        let h = v[start];
        let prominence = if start == imax || (start <= imax && imax <= end) {
            h
        } else {
            let left_min = {
                let mut m = h;
                let mut k = start;
                let mut found_higher = false;
                while k > 0 {
                    k -= 1;
                    if v[k] > h {
                        found_higher = true;
                        break;
                    }
                    m = m.min(v[k]);
                }
                if found_higher {
                    m
                } else {
                    f64::NEG_INFINITY
                }
            };
            let right_min = {
                let mut m = h;
                let mut k = end;
                let mut found_higher = false;
                while k + 1 < n {
                    k += 1;
                    if v[k] > h {
                        found_higher = true;
                        break;
                    }
                    m = m.min(v[k]);
                }
                if found_higher {
                    m
                } else {
                    f64::NEG_INFINITY
                }
            };
            h - left_min.max(right_min)
        };
        if prominence / vmax > smoothing_tolerance {
            maxima.push(x[start]);
        }
    }

    let mode_location = if imax > 0 && imax < n - 1 {
        parabola_vertex(
            (x[imax - 1], v[imax - 1]),
            (x[imax], v[imax]),
            (x[imax + 1], v[imax + 1]),
        )
    } else {
        x[imax]
    };

    Ok(ModeReport {
        mode_location,
        mode_value: vmax,
        local_max_count: maxima.len(),
        smoothing_tolerance,
        maxima,
    })
}

fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let d1 = (b.1 - a.1) / (b.0 - a.0);
    let d2 = (c.1 - b.1) / (c.0 - b.0);
    let curvature = (d2 - d1) / (c.0 - a.0);
    if !(curvature < 0.0) {
        return b.0;
    }
    let vertex = 0.5 * (a.0 + b.0) - d1 / (2.0 * curvature);
    vertex.clamp(a.0, c.0)
}
