//! Exact samplers for the atoms of [`RVExpr`] and for τ itself.
//!
//! A [`SamplerPlan`] compiles an expression once: size-bias orders are pushed
//! down to the atoms through the rules
//! `(X^p)^{(t)} = (X^{(tp)})^p`, `(XY)^{(t)} = X^{(t)} Y^{(t)}`,
//! `Γ_a^{(t)} = Γ_{a+t}`, `B_{a,b}^{(t)} = B_{a+t,b}` and
//! `Z_c^{(t)} = (κ_c Γ_{1+u(1−c)}^{1−c} K_c^{(u)})^{−1/c}` with `u = −t/c`,
//! so the only non-trivial biased atoms left are Kanter variables. Those use
//! rejection for positive orders (weight `K^u ≤ 1`) and a tabulated inverse
//! CDF for negative ones. Everything is sampled in log space.

mod dump;
mod table;

use std::fmt;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin::{tau_expr, RVExpr, StableParams, TauForm};
use crate::specfun::{kappa_const, ln_kanter_ratio};

pub use dump::{
    read_binary, read_csv, read_json, write_binary, write_csv, write_json, SampleFormat, SampleHeader, BINARY_MAGIC,
};
pub use table::{KanterBiasTable, DEFAULT_CDF_TOLERANCE};

/// Draws per block in parallel sampling. Block `k` always uses stream `k`,
/// so output does not depend on the number of workers.
pub const BLOCK_SIZE: usize = 1 << 14;

/// A reproducible random stream: ChaCha8 keyed by `seed`, on stream `stream_index`.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Self {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Unit exponential.
    pub fn exponential(&mut self) -> f64 {
        Exp1.sample(&mut self.rng)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// ln of a Gamma(shape) draw, boosting small shapes through
/// `Γ_a = Γ_{a+1} U^{1/a}` so that tiny values do not underflow.
#[derive(Debug, Clone)]
struct LnGammaSampler {
    shape: f64,
    dist: Option<Gamma<f64>>,
    boost: bool,
}

impl LnGammaSampler {
    fn new(shape: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::Domain(format!("gamma shape {shape} must be positive")));
        }
        if shape == 1.0 {
            return Ok(Self {
                shape,
                dist: None,
                boost: false,
            });
        }
        let boost = shape < 1.0;
        let base = if boost { shape + 1.0 } else { shape };
        let dist = Gamma::new(base, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
        Ok(Self {
            shape,
            dist: Some(dist),
            boost,
        })
    }

    fn sample(&self, rs: &mut RandomStream) -> f64 {
        match &self.dist {
            None => rs.exponential().ln(),
            Some(d) => {
                let g: f64 = d.sample(rs.rng());
                if self.boost {
                    g.ln() + rs.uniform().ln() / self.shape
                } else {
                    g.ln()
                }
            }
        }
    }
}

/// How a size-biased atom is sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Strategy {
    /// Exact rewrite to a Gamma or Beta variable.
    ClosedForm,
    /// Draw `K`, accept with probability `K^u / weight_bound`.
    Rejection { weight_bound: f64, acceptance: f64 },
    /// Tabulated inverse CDF with the given number of cells and achieved CDF accuracy.
    InverseCdf { cells: usize, cdf_error: f64 },
}

/// Strategy chosen for one biased atom of the compiled tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeStrategy {
    pub node: String,
    pub strategy: Strategy,
}

#[derive(Debug, Clone)]
enum Node {
    LnConst(f64),
    Gamma(LnGammaSampler),
    Beta(LnGammaSampler, LnGammaSampler),
    Stable(f64),
    Kanter(f64),
    KanterRejection { c: f64, u: f64 },
    KanterTable(Arc<KanterBiasTable>),
    Power(Box<Node>, f64),
    Product(Vec<Node>),
}

impl Node {
    fn sample_ln(&self, rs: &mut RandomStream) -> f64 {
        match self {
            Node::LnConst(v) => *v,
            Node::Gamma(g) => g.sample(rs),
            Node::Beta(a, b) => {
                let x = a.sample(rs);
                let y = b.sample(rs);
                let m = x.max(y);
                x - (m + ((x - m).exp() + (y - m).exp()).ln())
            }
            Node::Stable(c) => ln_stable(*c, rs),
            Node::Kanter(c) => ln_kanter_ratio(*c, rs.uniform()),
            Node::KanterRejection { c, u } => loop {
                let ln_k = ln_kanter_ratio(*c, rs.uniform());
                if rs.uniform().ln() < u * ln_k {
                    break ln_k;
                }
            },
            Node::KanterTable(t) => t.ln_kanter_at(rs.uniform()),
            Node::Power(child, p) => p * child.sample_ln(rs),
            Node::Product(children) => children.iter().map(|c| c.sample_ln(rs)).sum(),
        }
    }
}

/// `ln Z_c = −((1−c) ln L + ln b_c(U)) / c`.
fn ln_stable(c: f64, rs: &mut RandomStream) -> f64 {
    let ln_kappa = -c * c.ln() - (1.0 - c) * (-c).ln_1p();
    let ln_l = rs.exponential().ln();
    let ln_b = ln_kappa + ln_kanter_ratio(c, rs.uniform());
    -((1.0 - c) * ln_l + ln_b) / c
}

/// Compiled sampler for an expression tree.
#[derive(Debug, Clone)]
pub struct SamplerPlan {
    expr: RVExpr,
    root: Node,
    strategies: Vec<NodeStrategy>,
}

impl SamplerPlan {
    pub fn compile(expr: &RVExpr) -> Result<Self> {
        expr.strip()?;
        let mut strategies = Vec::new();
        let root = compile_node(expr, 0.0, &mut strategies)?;
        Ok(Self {
            expr: expr.clone(),
            root,
            strategies,
        })
    }

    pub fn expr(&self) -> &RVExpr {
        &self.expr
    }

    pub fn strategies(&self) -> &[NodeStrategy] {
        &self.strategies
    }

    pub fn sample_ln(&self, rs: &mut RandomStream) -> f64 {
        self.root.sample_ln(rs)
    }

    pub fn sample(&self, rs: &mut RandomStream) -> f64 {
        self.sample_ln(rs).exp()
    }

    /// `n` draws split into fixed blocks, block `k` on stream `k`, run on
    /// `workers` threads. Identical output for any worker count.
    pub fn sample_parallel(&self, n: usize, seed: u64, workers: usize) -> Result<Vec<f64>> {
        parallel_blocks(n, seed, workers, |rs, len| (0..len).map(|_| self.sample(rs)).collect())
    }

    pub fn sample_ln_parallel(&self, n: usize, seed: u64, workers: usize) -> Result<Vec<f64>> {
        parallel_blocks(n, seed, workers, |rs, len| {
            (0..len).map(|_| self.sample_ln(rs)).collect()
        })
    }
}

impl fmt::Display for SamplerPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "plan for {}", self.expr)?;
        for s in &self.strategies {
            writeln!(f, "  {}: {:?}", s.node, s.strategy)?;
        }
        Ok(())
    }
}

fn compile_node(expr: &RVExpr, t: f64, out: &mut Vec<NodeStrategy>) -> Result<Node> {
    let biased = t != 0.0;
    let closed = |out: &mut Vec<NodeStrategy>, label: String| {
        if biased {
            out.push(NodeStrategy {
                node: label,
                strategy: Strategy::ClosedForm,
            });
        }
    };
    Ok(match expr {
        RVExpr::Const { k } => Node::LnConst(k.ln()),
        RVExpr::ExpL => {
            closed(out, format!("L^({t})"));
            Node::Gamma(LnGammaSampler::new(1.0 + t)?)
        }
        RVExpr::GammaRV { shape } => {
            closed(out, format!("Γ[{shape}]^({t})"));
            Node::Gamma(LnGammaSampler::new(shape + t)?)
        }
        RVExpr::BetaRV { a, b } => {
            closed(out, format!("B[{a},{b}]^({t})"));
            Node::Beta(LnGammaSampler::new(a + t)?, LnGammaSampler::new(*b)?)
        }
        RVExpr::StablePos { c } => {
            let c = *c;
            if c == 1.0 {
                Node::LnConst(0.0)
            } else if !biased {
                Node::Stable(c)
            } else {
                let u = -t / c;
                closed(out, format!("Z[{c}]^({t}) → Γ[{}]", 1.0 + u * (1.0 - c)));
                let inner = Node::Product(vec![
                    Node::LnConst(kappa_const(c)?.ln()),
                    Node::Power(
                        Box::new(Node::Gamma(LnGammaSampler::new(1.0 + u * (1.0 - c))?)),
                        1.0 - c,
                    ),
                    kanter_node(c, u, out)?,
                ]);
                Node::Power(Box::new(inner), -1.0 / c)
            }
        }
        RVExpr::KanterRV { c } => kanter_node(*c, t, out)?,
        RVExpr::Power { child, p } => Node::Power(Box::new(compile_node(child, t * p, out)?), *p),
        RVExpr::Product { children } => Node::Product(
            children
                .iter()
                .map(|c| compile_node(c, t, out))
                .collect::<Result<Vec<_>>>()?,
        ),
        RVExpr::SizeBias { child, t: t1 } => compile_node(child, t + t1, out)?,
    })
}

fn kanter_node(c: f64, u: f64, out: &mut Vec<NodeStrategy>) -> Result<Node> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("kanter index {c} outside (0,1)")));
    }
    if u == 0.0 {
        return Ok(Node::Kanter(c));
    }
    if u <= -1.0 {
        return Err(Error::InfeasibleOrder {
            subtree: format!("K[{c}]"),
            t: u,
        });
    }
    let node = format!("K[{c}]^({u})");
    if u > 0.0 {
        let acceptance = RVExpr::kanter(c).mellin(u)?;
        out.push(NodeStrategy {
            node,
            strategy: Strategy::Rejection {
                weight_bound: 1.0,
                acceptance,
            },
        });
        Ok(Node::KanterRejection { c, u })
    } else {
        let table = KanterBiasTable::new(c, u)?;
        out.push(NodeStrategy {
            node,
            strategy: Strategy::InverseCdf {
                cells: table.cells(),
                cdf_error: table.cdf_error(),
            },
        });
        Ok(Node::KanterTable(Arc::new(table)))
    }
}

/// Runs `fill(stream, len)` on consecutive blocks of [`BLOCK_SIZE`] and
/// concatenates the results in block order.
pub fn parallel_blocks<T, F>(n: usize, seed: u64, workers: usize, fill: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RandomStream, usize) -> Vec<T> + Sync,
{
    if workers == 0 {
        return Err(Error::InvalidArgument("workers must be at least 1".into()));
    }
    let blocks = n.div_ceil(BLOCK_SIZE);
    let run = || {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let len = BLOCK_SIZE.min(n - b * BLOCK_SIZE);
                let mut rs = RandomStream::new(seed, b as u64);
                fill(&mut rs, len)
            })
            .collect::<Vec<_>>()
    };
    let chunks = if workers == rayon::current_num_threads() {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(run)
    };
    Ok(chunks.into_iter().flatten().collect())
}

/// One draw of the positive `c`-stable variable `Z_c`.
pub fn sample_stable_pos(c: f64, rs: &mut RandomStream) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!("stable index {c} outside (0,1]")));
    }
    if c == 1.0 {
        return Ok(1.0);
    }
    Ok(ln_stable(c, rs).exp())
}

/// One draw of `K_c = b_c(U)/κ_c`.
pub fn sample_kanter(c: f64, rs: &mut RandomStream) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("kanter index {c} outside (0,1)")));
    }
    Ok(ln_kanter_ratio(c, rs.uniform()).exp())
}

/// One draw of `X^{(t)}`. Compiles a plan on every call; use
/// [`SamplerPlan`] for repeated draws.
pub fn sample_size_biased(node: &RVExpr, rs: &mut RandomStream) -> Result<f64> {
    match node {
        RVExpr::SizeBias { .. } => Ok(SamplerPlan::compile(node)?.sample(rs)),
        other => Err(Error::InvalidArgument(format!("{other} is not a size-bias node"))),
    }
}

/// Sampler for τ through one of its factorizations.
#[derive(Debug, Clone)]
pub struct TauSampler {
    params: StableParams,
    form: TauForm,
    plan: SamplerPlan,
}

impl TauSampler {
    pub fn new(params: StableParams, form: TauForm) -> Result<Self> {
        let plan = SamplerPlan::compile(&tau_expr(&params, form)?)?;
        Ok(Self { params, form, plan })
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    pub fn form(&self) -> TauForm {
        self.form
    }

    pub fn plan(&self) -> &SamplerPlan {
        &self.plan
    }

    pub fn sample(&self, rs: &mut RandomStream) -> f64 {
        self.plan.sample(rs)
    }

    pub fn sample_n(&self, n: usize, seed: u64, workers: usize) -> Result<Vec<f64>> {
        self.plan.sample_parallel(n, seed, workers)
    }
}

/// One draw of τ.
pub fn sample_tau(params: &StableParams, form: TauForm, rs: &mut RandomStream) -> Result<f64> {
    Ok(TauSampler::new(*params, form)?.sample(rs))
}

/// Outcome of running the `K_c^{(u)}` rejection step on a fixed number of proposals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceMeasurement {
    pub c: f64,
    pub order: f64,
    pub proposals: u64,
    pub accepted: u64,
    /// `E[K_c^u]`, the exact acceptance probability.
    pub predicted: f64,
}

impl AcceptanceMeasurement {
    pub fn rate(&self) -> f64 {
        self.accepted as f64 / self.proposals as f64
    }

    pub fn standard_error(&self) -> f64 {
        (self.predicted * (1.0 - self.predicted) / self.proposals as f64).sqrt()
    }

    /// |measured − predicted| in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.rate() - self.predicted).abs() / self.standard_error()
    }
}

/// Runs `proposals` rejection trials for `K_c^{(u)}`, `u > 0`.
pub fn measure_acceptance(c: f64, u: f64, proposals: u64, seed: u64, workers: usize) -> Result<AcceptanceMeasurement> {
    if !(u > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rejection needs a positive order, got {u}"
        )));
    }
    let predicted = RVExpr::kanter(c).mellin(u)?;
    let counts = parallel_blocks(proposals as usize, seed, workers, |rs, len| {
        let mut hits = 0u64;
        for _ in 0..len {
            let ln_k = ln_kanter_ratio(c, rs.uniform());
            if rs.uniform().ln() < u * ln_k {
                hits += 1;
            }
        }
        vec![hits]
    })?;
    Ok(AcceptanceMeasurement {
        c,
        order: u,
        proposals,
        accepted: counts.iter().sum(),
        predicted,
    })
}
