//! `monoclt`: experiment runner for monotone convolution powers and the
//! associated boundary maps.
//!
//! Exit codes: 0 success, 2 resource or budget, 3 validation, 4 numeric failure.

mod spec;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use monoclt::clt::{
    berry_esseen_bound, check_standardized, clt_distance, BoundPart, DistanceConfig, Method,
};
use monoclt::ergodic::{choose_k, cone_invariance_check, darling_kac_mc, return_sequence_partial};
use monoclt::inversion::{stieltjes_cdf_many, uniform_grid};
use monoclt::transforms::{monotone_power_exact, nevanlinna_extract, DEFAULT_ATOM_BUDGET};
use monoclt::{Error, FTransform, MeasureSpec};

const BUDGET_VAR: &str = "MONOCLT_ATOM_BUDGET";

#[derive(Debug, Parser)]
#[command(
    name = "monoclt",
    version,
    about = "Monotone CLT and Boole-type dynamics experiments"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Atoms (exact) or sampled CDF (numeric) of the n-th monotone power.
    Power(PowerArgs),
    /// Kolmogorov distance to the arcsine law and the explicit bound, per n.
    Rates(RatesArgs),
    /// Partial sums of the return series along the orbit of (2k+2)i.
    ReturnSeq(ReturnArgs),
    /// Monte Carlo occupation times against the Darling-Kac limit.
    Occupation(OccupationArgs),
    /// Counts sampled cone points mapped out of the cone.
    ConeCheck(ConeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    Exact,
    Numeric,
    Auto,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Numeric => Method::Numeric,
            MethodArg::Auto => Method::Auto,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct Common {
    /// Measure spec (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output file (default: stdout).
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct Numeric {
    /// Stieltjes smoothing height.
    #[arg(long, default_value_t = 1e-5)]
    y: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 16001)]
    grid: usize,
}

#[derive(Debug, Args, Serialize)]
struct PowerArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    #[command(flatten)]
    #[serde(flatten)]
    numeric: Numeric,
}

#[derive(Debug, Args, Serialize)]
struct RatesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    /// Comma separated list of n.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<u64>,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    #[command(flatten)]
    #[serde(flatten)]
    numeric: Numeric,
}

#[derive(Debug, Args, Serialize)]
struct ReturnArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    #[arg(long)]
    n: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Interval {
    a: f64,
    b: f64,
}

impl std::str::FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
        Ok(Interval {
            a: parse(a)?,
            b: parse(b)?,
        })
    }
}

#[derive(Debug, Args, Serialize)]
struct OccupationArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    /// Interval A as `a,b`.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    interval: Interval,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1000)]
    orbits: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args, Serialize)]
struct ConeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum Failure {
    Resource(String),
    Validation(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Resource(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Numeric(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Resource(m) | Failure::Validation(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::AtomBudgetExceeded { .. } => Failure::Resource(msg),
            Error::BracketFailure { .. }
            | Error::EpsilonTooLarge { .. }
            | Error::NonPositiveDistance { .. }
            | Error::PoleHit { .. } => Failure::Numeric(msg),
            _ => Failure::Validation(msg),
        }
    }
}

impl From<spec::SpecError> for Failure {
    fn from(e: spec::SpecError) -> Self {
        match e {
            spec::SpecError::Io(_) => Failure::Resource(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn atom_budget() -> Run<usize> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Validation(format!("{BUDGET_VAR}={v} is not a non-negative integer"))
        }),
        Err(_) => Ok(DEFAULT_ATOM_BUDGET),
    }
}

/// Accumulates one output artifact: `#` header lines, then CSV rows.
struct Output {
    text: String,
}

impl Output {
    fn new(command: &Command, budget: usize, seed: Option<u64>) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# monoclt {}", env!("CARGO_PKG_VERSION"));
        let config = serde_json::to_string(command).expect("config serializes");
        let _ = writeln!(text, "# config: {config}");
        let _ = writeln!(text, "# atom_budget: {budget}");
        match seed {
            Some(s) => {
                let _ = writeln!(text, "# seed: {s}");
            }
            None => text.push_str("# seed: none\n"),
        }
        Output { text }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn finish(self, out: Option<&PathBuf>) -> Run<()> {
        match out {
            Some(path) => std::fs::write(path, self.text)
                .map_err(|e| Failure::Resource(format!("cannot write {}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(self.text.as_bytes())
                .map_err(|e| Failure::Resource(format!("cannot write output: {e}"))),
        }
    }
}

/// Cone level for a spec: `choose_k` for atomic seeds, otherwise the first
/// integer covering the band `[r - sqrt 2, r + sqrt 2]` that carries `nu`.
fn cone_k(spec: &MeasureSpec<f64>) -> u32 {
    match spec {
        MeasureSpec::Atomic(m) => choose_k(&nevanlinna_extract(m)),
        MeasureSpec::Arcsine => 2,
        MeasureSpec::NuR(r) => (r.abs() + 2f64.sqrt()).ceil() as u32,
    }
}

fn power(args: &PowerArgs, out: &mut Output, budget: usize) -> Run<()> {
    let spec = spec::load(&args.common.spec)?;
    match args.method {
        MethodArg::Exact => {
            let m = spec.as_atomic().ok_or(Error::NotAtomic)?;
            let p = monotone_power_exact(m, args.n, budget)?;
            out.line("t,w");
            for (t, w) in p.atoms() {
                out.line(format!("{t:.16e},{w:.16e}"));
            }
        }
        _ => {
            // mu^n sits around n * mean with spread sqrt(n)
            let n = args.n as u64;
            let root = (n.max(1) as f64).sqrt();
            let centre = n as f64 * spec.mean();
            let half = 4.0 * root * spec.variance().sqrt().max(1.0);
            let grid = uniform_grid(centre - half, centre + half, args.numeric.grid);
            let f = FTransform::new(&spec);
            let curve = stieltjes_cdf_many(
                |zs| f.iterate_many(n, zs),
                args.numeric.y * root,
                &grid,
                &Default::default(),
            )?;
            out.line("x,cdf");
            for (x, c) in curve.x.iter().zip(&curve.cdf) {
                out.line(format!("{x:.11e},{c:.11e}"));
            }
        }
    }
    Ok(())
}

fn rates(args: &RatesArgs, out: &mut Output, budget: usize) -> Run<()> {
    let spec = spec::load(&args.common.spec)?;
    check_standardized(spec.mean(), spec.variance())?;
    let mut cfg = DistanceConfig::<f64> {
        budget,
        ..Default::default()
    };
    cfg.numeric.y = args.numeric.y;
    cfg.numeric.points = args.numeric.grid;
    out.line("n,distance,method,bound_part,bound_value,threshold_ok");
    for &n in &args.n_list {
        let point = clt_distance(&spec, n, args.method.into(), &cfg)?;
        let bound = match &spec {
            MeasureSpec::Atomic(m) => {
                // the tighter of the parts that apply to this seed
                [BoundPart::One, BoundPart::Two, BoundPart::Three]
                    .into_iter()
                    .filter_map(|p| berry_esseen_bound(m, n, p).ok())
                    .min_by(|a, b| a.bound_value.total_cmp(&b.bound_value))
            }
            _ => None,
        };
        let bound_cols = match bound {
            Some(b) => format!("{},{:.11e},{}", b.part, b.bound_value, b.applicable),
            None => ",,".to_string(),
        };
        out.line(format!(
            "{n},{:.11e},{},{bound_cols}",
            point.distance, point.method
        ));
    }
    Ok(())
}

fn return_seq(args: &ReturnArgs, out: &mut Output) -> Run<()> {
    let spec = spec::load(&args.common.spec)?;
    let s = return_sequence_partial(&spec, cone_k(&spec), args.n)?;
    out.line("n,S_n,sqrt_2n,ratio");
    for j in 1..=s.len() {
        out.line(format!(
            "{j},{:.11e},{:.11e},{:.11e}",
            s.sum(j),
            s.comparator(j),
            s.ratio(j)
        ));
    }
    Ok(())
}

fn occupation(args: &OccupationArgs, out: &mut Output) -> Run<()> {
    let spec = spec::load(&args.common.spec)?;
    let m = spec.as_atomic().ok_or(Error::NotAtomic)?;
    let Interval { a, b } = args.interval;
    let r = darling_kac_mc(m, a, b, args.n, args.orbits, args.seed)?;
    let dropped = r.dropped.len();
    if dropped * 1000 >= args.orbits {
        eprintln!(
            "warning: {dropped} of {} orbits hit a pole and were dropped",
            args.orbits
        );
    }
    out.line("t,empirical_cdf,limit_cdf");
    for &(t, c) in &r.ecdf {
        let limit = monoclt::special::half_gaussian_cdf(t)?;
        out.line(format!("{t:.11e},{c:.11e},{limit:.11e}"));
    }
    out.line(format!("ks={:.11e},dropped={dropped}", r.ks));
    eprintln!(
        "seed {}: {} orbits, {dropped} dropped",
        args.seed, args.orbits
    );
    Ok(())
}

fn cone_check(args: &ConeArgs, out: &mut Output) -> Run<()> {
    let spec = spec::load(&args.common.spec)?;
    let k = cone_k(&spec);
    let v = cone_invariance_check(&spec, k, args.samples, args.seed);
    out.line(format!("# k: {k}"));
    out.line(format!("violations: {v}"));
    eprintln!(
        "seed {}: {} samples, {v} violations",
        args.seed, args.samples
    );
    Ok(())
}

fn run(cli: Cli) -> Run<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Resource(format!("cannot start {t} threads: {e}")))?;
    }
    let budget = atom_budget()?;
    let (seed, out_path) = match &cli.command {
        Command::Power(a) => (None, &a.common.out),
        Command::Rates(a) => (None, &a.common.out),
        Command::ReturnSeq(a) => (None, &a.common.out),
        Command::Occupation(a) => (Some(a.seed), &a.common.out),
        Command::ConeCheck(a) => (Some(a.seed), &a.common.out),
    };
    let mut out = Output::new(&cli.command, budget, seed);
    match cli.threads {
        Some(t) => out.line(format!("# threads: {t}")),
        None => out.line("# threads: default"),
    }
    match &cli.command {
        Command::Power(a) => power(a, &mut out, budget)?,
        Command::Rates(a) => rates(a, &mut out, budget)?,
        Command::ReturnSeq(a) => return_seq(a, &mut out)?,
        Command::Occupation(a) => occupation(a, &mut out)?,
        Command::ConeCheck(a) => cone_check(a, &mut out)?,
    }
    out.finish(out_path.as_ref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
