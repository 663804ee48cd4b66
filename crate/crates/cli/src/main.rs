//! `hitting`: sampling, moments, densities, modes and verification for the
//! first hitting time τ of level 1 by a strictly α-stable Lévy process.
//!
//! Data goes to stdout or `--out`; diagnostics go to stderr.
//! Exit status: 0 success, 1 check failure or numerical failure,
//! 2 usage error, 3 inadmissible (α, ρ).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hitting_core::density::{
    density_tau_convolution, density_tau_mellin, find_mode, DensityGrid, GridSpec, DEFAULT_SMOOTHING_TOLERANCE,
};
use hitting_core::mellin::moments_tau;
use hitting_core::sampler::{write_binary, write_csv, write_json, SampleHeader, TauSampler, BLOCK_SIZE};
use hitting_core::verify::{run_check, CheckName, SuiteConfig};
use hitting_core::{Error, StableParams, TauForm};

const SAMPLE_SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "hitting",
    version,
    about = "First hitting time of level 1 by a strictly alpha-stable Levy process"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump N draws of tau.
    ///
    /// csv: a `# {header json}` line, a `tau` title line, one draw per line.
    /// json: {"header": {...}, "samples": [...]}.
    /// bin: magic TAUSAMP1, u32 LE header length, header json, f64 LE draws.
    Sample(SampleArgs),
    /// Table of E[tau^s]: closed form, plus Monte Carlo when --n is given.
    ///
    /// csv columns: s, exact, and with --n also mc_mean, mc_se, z.
    Moments(MomentArgs),
    /// Density of tau on a grid.
    ///
    /// csv columns: x, f, weight (trapezoid weight of the point),
    /// preceded by `# key=value` lines.
    Density(DensityArgs),
    /// Local maxima of the density of tau.
    Mode(ModeArgs),
    /// Run the verification suite or one named check.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct ParamArgs {
    /// Stability index, 1 < alpha <= 2.
    #[arg(long)]
    alpha: f64,
    /// Positivity parameter, 1 - 1/alpha <= rho <= 1/alpha.
    #[arg(long)]
    rho: f64,
    /// Hitting level x; tau_x has the law of x^alpha tau.
    #[arg(long, default_value_t = 1.0)]
    level: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<StableParams, Error> {
        if !(self.level > 0.0 && self.level.is_finite()) {
            return Err(Error::InvalidArgument(format!("level {} must be positive", self.level)));
        }
        StableParams::new(self.alpha, self.rho)
    }

    /// `x^α`, the factor mapping τ to τ_x.
    fn scale(&self) -> f64 {
        self.level.powf(self.alpha)
    }
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; changes wall time only, never values.
    #[arg(long, default_value_t = default_workers(), value_parser = clap::value_parser!(u32).range(1..))]
    workers: u32,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn default_workers() -> u32 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u32)
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Form::Rk)]
    form: Form,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, value_enum, default_value_t = SampleFormat::Csv)]
    format: SampleFormat,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Grid bounds and size; all three or none (automatic grid).
    #[arg(long, allow_negative_numbers = true, requires_all = ["grid_max", "grid_points"])]
    grid_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires_all = ["grid_min", "grid_points"])]
    grid_max: Option<f64>,
    #[arg(long, requires_all = ["grid_min", "grid_max"])]
    grid_points: Option<usize>,
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Orders s, comma separated. Alternatively use --grid-min/--grid-max/--grid-points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    s: Vec<f64>,
    #[command(flatten)]
    grid: GridArgs,
    /// Monte Carlo sample size (RK form); omit for closed form only.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Route::Mellin)]
    route: Route,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModeArgs {
    #[command(flatten)]
    density: DensityArgs,
    /// Relative prominence below which a local maximum is ignored.
    #[arg(long, default_value_t = DEFAULT_SMOOTHING_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Check::All)]
    check: Check,
    /// Restrict parameter-dependent checks to one (alpha, rho); give both or neither.
    #[arg(long, requires = "rho")]
    alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    rho: Option<f64>,
    /// Orders for the moment check, or the s grid of the laplace check.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    s: Vec<f64>,
    /// Exponents r in (0, 1) for the clay check.
    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,
    /// Monte Carlo sample size of the moment check.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    /// Sample size per seed of the KS checks.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    ks_n: Option<u64>,
    /// Significance level of the KS checks.
    #[arg(long, default_value_t = 0.01)]
    ks_level: f64,
    /// Replace every report's tolerance (recorded in the report).
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Form {
    Yano,
    Rk,
    Final,
}

impl From<Form> for TauForm {
    fn from(f: Form) -> Self {
        match f {
            Form::Yano => TauForm::Yano,
            Form::Rk => TauForm::Rk,
            Form::Final => TauForm::Final,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum SampleFormat {
    Csv,
    Json,
    Bin,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Route {
    Mellin,
    Convolution,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Check {
    Moments,
    Laplace,
    Selfdecomp,
    Clay,
    Shape,
    Ks,
    Acceptance,
    All,
}

impl From<Check> for CheckName {
    fn from(c: Check) -> Self {
        match c {
            Check::Moments => CheckName::Moments,
            Check::Laplace => CheckName::Laplace,
            Check::Selfdecomp => CheckName::Selfdecomp,
            Check::Clay => CheckName::Clay,
            Check::Shape => CheckName::Shape,
            Check::Ks => CheckName::Ks,
            Check::Acceptance => CheckName::Acceptance,
            Check::All => CheckName::All,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(io::Error),
    ChecksFailed(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Admissibility(_)) => 3,
            Failure::Core(
                Error::InvalidArgument(_)
                | Error::Domain(_)
                | Error::StripViolation { .. }
                | Error::EmptyStrip(_)
                | Error::InfeasibleOrder { .. }
                | Error::Io { .. },
            ) => 2,
            Failure::Io(_) => 2,
            Failure::Core(_) | Failure::ChecksFailed(_) => 1,
        }
    }

    /// The reader went away (e.g. `| head`); not worth reporting.
    fn is_broken_pipe(&self) -> bool {
        match self {
            Failure::Io(e) => e.kind() == io::ErrorKind::BrokenPipe,
            Failure::Core(Error::Io { kind, .. }) => *kind == io::ErrorKind::BrokenPipe,
            _ => false,
        }
    }
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn in_pool<T: Send>(workers: u32, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers as usize)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn sample(a: &SampleArgs) -> Result<(), Failure> {
    let params = a.params.params()?;
    let form = TauForm::from(a.form);
    let sampler = TauSampler::new(params, form)?;
    let workers = a.run.workers as usize;
    let start = Instant::now();
    let mut values = sampler.sample_n(a.n as usize, a.run.seed, workers)?;
    let scale = a.params.scale();
    if scale != 1.0 {
        values.iter_mut().for_each(|v| *v *= scale);
    }
    eprintln!("sampled {} draws of tau ({form}) in {:.2?}", a.n, start.elapsed());
    let header = SampleHeader {
        schema_version: SAMPLE_SCHEMA_VERSION,
        alpha: params.alpha(),
        rho: params.rho(),
        form: form.name().into(),
        seed: a.run.seed,
        n: a.n,
        level: a.params.level,
        block_size: BLOCK_SIZE as u64,
    };
    let w = sink(&a.run.out)?;
    match a.format {
        SampleFormat::Csv => write_csv(w, &header, &values)?,
        SampleFormat::Json => write_json(w, &header, &values)?,
        SampleFormat::Bin => write_binary(w, &header, &values)?,
    }
    Ok(())
}

fn grid_spec(g: &GridArgs) -> Result<GridSpec, Error> {
    Ok(match (g.grid_min, g.grid_max, g.grid_points) {
        (Some(min), Some(max), Some(points)) => GridSpec::LogUniform { min, max, points },
        (None, None, None) => GridSpec::Auto,
        _ => {
            return Err(Error::InvalidArgument(
                "give all of --grid-min, --grid-max, --grid-points or none".into(),
            ))
        }
    })
}

#[derive(serde::Serialize)]
struct MomentRow {
    s: f64,
    exact: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_se: Option<f64>,
}

fn moments(a: &MomentArgs) -> Result<(), Failure> {
    let params = a.params.params()?;
    let orders = match (a.s.is_empty(), grid_spec(&a.grid)?) {
        (false, GridSpec::Auto) => a.s.clone(),
        (true, GridSpec::LogUniform { min, max, points }) => {
            if points < 2 || max.partial_cmp(&min) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::InvalidArgument("moment grid needs max > min and at least 2 points".into()).into());
            }
            (0..points)
                .map(|i| min + (max - min) * i as f64 / (points - 1) as f64)
                .collect()
        }
        _ => return Err(Error::InvalidArgument("give either --s or a full --grid-*".into()).into()),
    };
    let scale = a.params.scale();
    let mut rows = orders
        .iter()
        .map(|&s| {
            Ok(MomentRow {
                s,
                exact: moments_tau(&params, s)? * scale.powf(s),
                mc_mean: None,
                mc_se: None,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    if let Some(n) = a.n {
        let sampler = TauSampler::new(params, TauForm::Rk)?;
        let ln_tau = sampler
            .plan()
            .sample_ln_parallel(n as usize, a.run.seed, a.run.workers as usize)?;
        let ln_scale = scale.ln();
        for row in &mut rows {
            let xs: Vec<f64> = ln_tau.iter().map(|l| (row.s * (l + ln_scale)).exp()).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
            row.mc_mean = Some(mean);
            row.mc_se = Some((var / n as f64).sqrt());
            if !params.tau_strip().contains(2.0 * row.s) {
                eprintln!("note: s = {} has infinite variance; mc_se is empirical only", row.s);
            }
        }
    }
    let mut w = sink(&a.run.out)?;
    match a.format {
        TableFormat::Json => writeln!(w, "{}", serde_json::to_string_pretty(&rows).expect("rows serialize"))?,
        TableFormat::Csv => {
            if a.n.is_some() {
                writeln!(w, "s,exact,mc_mean,mc_se,z")?;
            } else {
                writeln!(w, "s,exact")?;
            }
            for r in &rows {
                match (r.mc_mean, r.mc_se) {
                    (Some(m), Some(se)) => writeln!(
                        w,
                        "{},{:.16e},{:.16e},{:.6e},{:.3}",
                        r.s,
                        r.exact,
                        m,
                        se,
                        (m - r.exact) / se
                    )?,
                    _ => writeln!(w, "{},{:.16e}", r.s, r.exact)?,
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn compute_density(a: &DensityArgs) -> Result<DensityGrid, Failure> {
    let params = a.params.params()?;
    let spec = grid_spec(&a.grid)?;
    let start = Instant::now();
    let grid = match a.route {
        Route::Mellin => density_tau_mellin(&params, &spec)?,
        Route::Convolution => density_tau_convolution(&params, &spec)?,
    };
    eprintln!(
        "density on {} points in {:.2?}, mass defect {:.2e}",
        grid.len(),
        start.elapsed(),
        grid.mass_defect()
    );
    let x = a.params.scale();
    if x == 1.0 {
        return Ok(grid);
    }
    // f_{x^α τ}(y) = f_τ(y / x^α) / x^α
    let mut scaled = grid;
    scaled.abscissae.iter_mut().for_each(|v| *v *= x);
    scaled.weights.iter_mut().for_each(|v| *v *= x);
    scaled.values.iter_mut().for_each(|v| *v /= x);
    Ok(scaled.with_meta("level", a.params.level))
}

fn density(a: &DensityArgs) -> Result<(), Failure> {
    let grid = compute_density(a)?;
    let mut w = sink(&a.out)?;
    match a.format {
        TableFormat::Csv => grid.write_csv(w)?,
        TableFormat::Json => {
            writeln!(w, "{}", grid.to_json())?;
            w.flush()?;
        }
    }
    Ok(())
}

fn mode(a: &ModeArgs) -> Result<(), Failure> {
    let grid = compute_density(&a.density)?;
    let report = find_mode(&grid, a.tolerance)?;
    let mut w = sink(&a.density.out)?;
    match a.density.format {
        TableFormat::Json => writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        )?,
        TableFormat::Csv => {
            writeln!(w, "mode_location,mode_value,local_max_count,smoothing_tolerance")?;
            writeln!(
                w,
                "{:.10e},{:.10e},{},{:e}",
                report.mode_location, report.mode_value, report.local_max_count, report.smoothing_tolerance
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let params = match (a.alpha, a.rho) {
        (Some(alpha), Some(rho)) => Some(StableParams::new(alpha, rho)?),
        _ => None,
    };
    let defaults = SuiteConfig::default();
    let cfg = SuiteConfig {
        seed: a.run.seed,
        workers: a.run.workers as usize,
        mc_samples: a.n.map_or(defaults.mc_samples, |n| n as usize),
        ks_samples: a.ks_n.map_or(defaults.ks_samples, |n| n as usize),
        ks_level: a.ks_level,
        tolerance: a.tolerance,
        params,
        s_list: (!a.s.is_empty()).then(|| a.s.clone()),
        clay_rs: (!a.r.is_empty()).then(|| a.r.clone()),
        ..defaults
    };
    let check = CheckName::from(a.check);
    let start = Instant::now();
    let reports = in_pool(a.run.workers, || run_check(check, &cfg))??;
    eprintln!("{} report(s) for '{check}' in {:.2?}", reports.len(), start.elapsed());
    let mut w = sink(&a.run.out)?;
    match a.format {
        ReportFormat::Json => writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&reports).expect("reports serialize")
        )?,
        ReportFormat::Text => {
            for r in &reports {
                write!(w, "{r}")?;
            }
        }
    }
    w.flush()?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Failure::ChecksFailed(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sample(a) => in_pool(a.run.workers, || sample(a)).and_then(|r| r),
        Command::Moments(a) => in_pool(a.run.workers, || moments(a)).and_then(|r| r),
        Command::Density(a) => density(a),
        Command::Mode(a) => mode(a),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if f.is_broken_pipe() => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::ChecksFailed(n) => eprintln!("{n} check(s) failed"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
