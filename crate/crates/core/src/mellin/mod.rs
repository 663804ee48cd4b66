//! Positive random variables as expression trees, handled through their
//! Mellin transforms `s ↦ E[X^s]`.
//!
//! Independent products multiply transforms, powers rescale the argument,
//! and size-biasing at order `t` shifts it: `E[(X^{(t)})^s] = E[X^{s+t}] / E[X^t]`.
//! Two trees describe the same law iff their transforms agree on a common
//! strip, which is what [`identity_check`] tests numerically.

mod identity;
mod params;
mod tau;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{kappa_const, log_gamma};

pub use identity::{chebyshev_grid, identity_check, ClosedFormTau, IdentityOptions, MellinTransform};
pub use params::{admissible_rho_range, StableParams};
pub use tau::{moments_tau, tau_expr, TauForm};

/// Open interval `(lo, hi)` of exponents with finite moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinStrip {
    pub lo: f64,
    pub hi: f64,
}

impl MellinStrip {
    pub const REAL_LINE: MellinStrip = MellinStrip {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, s: f64) -> bool {
        s > self.lo && s < self.hi
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn intersect(&self, other: &MellinStrip) -> MellinStrip {
        MellinStrip::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Strip of `X^p` given the strip of `X`.
    pub fn power(&self, p: f64) -> MellinStrip {
        if p == 0.0 {
            MellinStrip::REAL_LINE
        } else if p > 0.0 {
            MellinStrip::new(self.lo / p, self.hi / p)
        } else {
            MellinStrip::new(self.hi / p, self.lo / p)
        }
    }

    pub fn shift(&self, t: f64) -> MellinStrip {
        MellinStrip::new(self.lo - t, self.hi - t)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl fmt::Display for MellinStrip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Expression tree of a positive random variable. Distinct nodes are
/// independent, so `Product` children are mutually independent by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum RVExpr {
    /// Deterministic constant `k > 0`.
    Const {
        k: f64,
    },
    /// Unit exponential `L`.
    #[serde(rename = "exp")]
    ExpL,
    /// Gamma variable `Γ_t` with density `x^{t−1} e^{−x} / Γ(t)`.
    #[serde(rename = "gamma")]
    GammaRV {
        shape: f64,
    },
    /// Beta variable `B_{a,b}`.
    #[serde(rename = "beta")]
    BetaRV {
        a: f64,
        b: f64,
    },
    /// Positive `c`-stable `Z_c` with `E[e^{−λZ_c}] = e^{−λ^c}`; `Z_1 = 1`.
    StablePos {
        c: f64,
    },
    /// Kanter variable `K_c = κ_c^{−1} b_c(U)` on `(0, 1)`.
    #[serde(rename = "kanter")]
    KanterRV {
        c: f64,
    },
    Power {
        child: Box<RVExpr>,
        p: f64,
    },
    Product {
        children: Vec<RVExpr>,
    },
    /// Size-biased sampling `X^{(t)}`.
    SizeBias {
        child: Box<RVExpr>,
        t: f64,
    },
}

impl RVExpr {
    pub fn constant(k: f64) -> Self {
        RVExpr::Const { k }
    }

    pub fn gamma(shape: f64) -> Self {
        RVExpr::GammaRV { shape }
    }

    pub fn beta(a: f64, b: f64) -> Self {
        RVExpr::BetaRV { a, b }
    }

    pub fn stable(c: f64) -> Self {
        RVExpr::StablePos { c }
    }

    pub fn kanter(c: f64) -> Self {
        RVExpr::KanterRV { c }
    }

    pub fn pow(self, p: f64) -> Self {
        RVExpr::Power {
            child: Box::new(self),
            p,
        }
    }

    pub fn size_bias(self, t: f64) -> Self {
        RVExpr::SizeBias {
            child: Box::new(self),
            t,
        }
    }

    pub fn product(children: Vec<RVExpr>) -> Self {
        RVExpr::Product { children }
    }

    /// Exact strip for atoms; intersection-based (conservative) for products.
    pub fn strip(&self) -> Result<MellinStrip> {
        match self {
            RVExpr::Product { children } => {
                let mut acc = MellinStrip::REAL_LINE;
                for child in children {
                    acc = acc.intersect(&child.strip()?);
                }
                if acc.is_empty() {
                    return Err(Error::EmptyStrip(self.to_string()));
                }
                Ok(acc)
            }
            RVExpr::Power { child, p } => {
                if !p.is_finite() {
                    return Err(Error::Domain(format!("power {p} in {self}")));
                }
                Ok(child.strip()?.power(*p))
            }
            RVExpr::SizeBias { child, t } => {
                let inner = child.strip()?;
                if !t.is_finite() || !inner.contains(*t) {
                    return Err(Error::InfeasibleOrder {
                        subtree: child.to_string(),
                        t: *t,
                    });
                }
                Ok(inner.shift(*t))
            }
            atom => atom_strip(atom),
        }
    }

    /// ln E[X^s].
    pub fn ln_mellin(&self, s: f64) -> Result<f64> {
        match self {
            RVExpr::Product { children } => {
                let mut acc = 0.0;
                for child in children {
                    acc += child.ln_mellin(s)?;
                }
                Ok(acc)
            }
            RVExpr::Power { child, p } => child.ln_mellin(p * s),
            RVExpr::SizeBias { child, t } => {
                let inner = child.strip()?;
                if !inner.contains(*t) {
                    return Err(Error::InfeasibleOrder {
                        subtree: child.to_string(),
                        t: *t,
                    });
                }
                if !inner.contains(s + t) {
                    return Err(Error::StripViolation {
                        subtree: self.to_string(),
                        s,
                        lo: inner.lo - t,
                        hi: inner.hi - t,
                    });
                }
                Ok(child.ln_mellin(s + t)? - child.ln_mellin(*t)?)
            }
            atom => {
                let strip = atom_strip(atom)?;
                if !strip.contains(s) {
                    return Err(Error::StripViolation {
                        subtree: atom.to_string(),
                        s,
                        lo: strip.lo,
                        hi: strip.hi,
                    });
                }
                atom_ln_mellin(atom, s)
            }
        }
    }

    /// E[X^s].
    pub fn mellin(&self, s: f64) -> Result<f64> {
        let ln = self.ln_mellin(s)?;
        if ln > f64::MAX.ln() {
            return Err(Error::Overflow(format!("E[X^{s}] for {self}")));
        }
        Ok(ln.exp())
    }

    /// Number of nodes in the tree.
    pub fn node_count(&self) -> usize {
        match self {
            RVExpr::Product { children } => 1 + children.iter().map(RVExpr::node_count).sum::<usize>(),
            RVExpr::Power { child, .. } | RVExpr::SizeBias { child, .. } => 1 + child.node_count(),
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("expression serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let expr: RVExpr =
            serde_json::from_str(json).map_err(|e| Error::InvalidArgument(format!("expression JSON: {e}")))?;
        expr.strip()?;
        Ok(expr)
    }
}

/// `E[X^s]` for the tree.
pub fn mellin_eval(expr: &RVExpr, s: f64) -> Result<f64> {
    expr.mellin(s)
}

/// Finiteness strip of the tree.
pub fn strip_of(expr: &RVExpr) -> Result<MellinStrip> {
    expr.strip()
}

fn unit_param(name: &str, v: f64, closed_top: bool) -> Result<()> {
    let ok = v > 0.0 && (v < 1.0 || (closed_top && v == 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} out of range")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} must be positive")))
    }
}

fn atom_strip(atom: &RVExpr) -> Result<MellinStrip> {
    match *atom {
        RVExpr::Const { k } => {
            positive("constant", k)?;
            Ok(MellinStrip::REAL_LINE)
        }
        RVExpr::ExpL => Ok(MellinStrip::new(-1.0, f64::INFINITY)),
        RVExpr::GammaRV { shape } => {
            positive("gamma shape", shape)?;
            Ok(MellinStrip::new(-shape, f64::INFINITY))
        }
        RVExpr::BetaRV { a, b } => {
            positive("beta a", a)?;
            positive("beta b", b)?;
            Ok(MellinStrip::new(-a, f64::INFINITY))
        }
        RVExpr::StablePos { c } => {
            unit_param("stable index", c, true)?;
            if c == 1.0 {
                Ok(MellinStrip::REAL_LINE)
            } else {
                Ok(MellinStrip::new(f64::NEG_INFINITY, c))
            }
        }
        RVExpr::KanterRV { c } => {
            unit_param("kanter index", c, false)?;
            Ok(MellinStrip::new(-1.0, f64::INFINITY))
        }
        _ => unreachable!("composite node"),
    }
}

fn atom_ln_mellin(atom: &RVExpr, s: f64) -> Result<f64> {
    match *atom {
        RVExpr::Const { k } => Ok(s * k.ln()),
        RVExpr::ExpL => log_gamma(1.0 + s),
        RVExpr::GammaRV { shape } => Ok(log_gamma(shape + s)? - log_gamma(shape)?),
        RVExpr::BetaRV { a, b } => Ok(log_gamma(a + s)? + log_gamma(a + b)? - log_gamma(a)? - log_gamma(a + b + s)?),
        RVExpr::StablePos { c } => {
            if c == 1.0 {
                Ok(0.0)
            } else {
                Ok(log_gamma(1.0 - s / c)? - log_gamma(1.0 - s)?)
            }
        }
        RVExpr::KanterRV { c } => {
            let kappa = kappa_const(c)?;
            Ok(-s * kappa.ln() + log_gamma(1.0 + s)? - log_gamma(1.0 + c * s)? - log_gamma(1.0 + (1.0 - c) * s)?)
        }
        _ => unreachable!("composite node"),
    }
}

impl fmt::Display for RVExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RVExpr::Const { k } => write!(f, "{k}"),
            RVExpr::ExpL => write!(f, "L"),
            RVExpr::GammaRV { shape } => write!(f, "Γ[{shape}]"),
            RVExpr::BetaRV { a, b } => write!(f, "B[{a},{b}]"),
            RVExpr::StablePos { c } => write!(f, "Z[{c}]"),
            RVExpr::KanterRV { c } => write!(f, "K[{c}]"),
            RVExpr::Power { child, p } => write!(f, "({child})^{p}"),
            RVExpr::Product { children } => {
                write!(f, "(")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, " × ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            RVExpr::SizeBias { child, t } => write!(f, "({child})^({t})"),
        }
    }
}
