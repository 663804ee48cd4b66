//! Hitting times of strictly α-stable Lévy processes.
//!
//! For a strictly α-stable process with `1 < α ≤ 2` and positivity parameter
//! `ρ`, the first hitting time `τ` of the level 1 factorizes into independent
//! products of positive stable, Kanter, Gamma and Beta variables. This crate
//! makes that law computable:
//!
//! - [`mellin`]: positive random variables as expression trees, evaluated
//!   through their Mellin transforms `s ↦ E[X^s]`; closed-form moments of `τ`.
//! - [`sampler`]: exact samplers for every atom and for `τ` itself.
//! - [`density`]: density reconstruction (Mellin inversion and log-domain
//!   convolution) and mode analysis.
//! - [`verify`]: executable checks producing [`VerificationReport`]s.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod density;
pub mod error;
pub mod mellin;
pub mod quadrature;
pub mod report;
pub mod sampler;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use mellin::{MellinStrip, RVExpr, StableParams, TauForm};
pub use report::VerificationReport;
