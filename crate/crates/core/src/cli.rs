//! Command-line front end of the `latentpc` binary.
//!
//! Exit statuses:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (any query verdict) |
//! | 1 | I/O error |
//! | 2 | parse error in a graph, pattern, report or CSV file |
//! | 3 | oracle or statistical failure, or a report that does not verify |
//! | 4 | unknown vertex |
//! | 5 | no counterexample within the search bounds |
//! | 64 | invalid flags or configuration |

use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{monte_carlo_benchmark, BenchError, BenchmarkConfig, CommissionBase, EstimateOracle};
use crate::citest::{CiError, DataOracle};
use crate::claims::{evaluate_auto, evaluate_claim, ClaimError, ClaimRule, PremiseReading, Witness};
use crate::dsep::{d_separated, DsepError, SepQuery};
use crate::format::{parse_dag, parse_pattern, write_dag, write_pattern, ParseError};
use crate::graph::{GraphError, MarkedGraph, Pattern};
use crate::latent::LatentInstance;
use crate::pc::{pc, PcError, PcOutput};
use crate::search::{parse_report, search_counterexample, verify_report, ReportError, SearchError};
use crate::sem::{random_sparse_dag_with, sample_linear_sem_with, CoefficientBand, Dataset, LinearSem, SemError};

pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;
pub const EXIT_UNKNOWN_VERTEX: i32 = 4;
pub const EXIT_NOT_FOUND: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable overriding the default worker count.
pub const JOBS_ENV: &str = "LATENTPC_JOBS";

#[derive(Debug, Parser)]
#[command(name = "latentpc", version, about = "PC discovery, d-separation and causal-claim queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run PC on a DAG's d-separations (exact oracle) or on a CSV dataset.
    Discover(DiscoverArgs),
    /// Answer a d-separation or causal-claim query.
    #[command(subcommand)]
    Query(QueryCommand),
    /// Sample a dataset from a random linear-Gaussian model.
    Simulate(SimulateArgs),
    /// Monte Carlo error rates of PC on simulated data.
    Benchmark(BenchmarkArgs),
    /// Search small latent-variable DAGs for a misleading directed edge.
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Kv,
    Trace,
}

#[derive(Debug, Args)]
struct DiscoverArgs {
    /// DAG file; its observe clause selects the variables.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    graph: Option<PathBuf>,
    /// CSV dataset.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Fisher z significance level.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Also write the step-by-step trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Subcommand)]
enum QueryCommand {
    /// Is X d-separated from Y given the conditioning set?
    Dsep(DsepArgs),
    /// Does the pattern license a causal claim from X to Z?
    Claim(ClaimArgs),
}

#[derive(Debug, Args)]
struct DsepArgs {
    #[arg(long, conflicts_with = "pattern", required_unless_present = "pattern")]
    graph: Option<PathBuf>,
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// Conditioning vertices, comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    given: Vec<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    /// No semi-directed path: not a cause.
    Thm2,
    /// Anchored, triangle-free directed edge.
    Thm3,
    /// Anchored, triangle-free directed path.
    Cor1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PremiseArg {
    /// Any arrowhead into the cause.
    Arrow,
    /// Only a directed edge into the cause.
    Directed,
}

#[derive(Debug, Args)]
struct ClaimArgs {
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    /// Rule to apply; without it the path, edge and no-influence rules are tried in turn.
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
    #[arg(long, value_enum, default_value_t = PremiseArg::Arrow)]
    premise: PremiseArg,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 10)]
    vars: usize,
    #[arg(long, default_value_t = 2.0)]
    degree: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    coef_min: f64,
    #[arg(long, default_value_t = 1.5)]
    coef_max: f64,
    /// CSV output path (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the generating DAG here.
    #[arg(long)]
    graph_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CommissionArg {
    Estimated,
    Complement,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    #[arg(long, default_value_t = 10)]
    vars: usize,
    #[arg(long, default_value_t = 2.0)]
    degree: f64,
    #[arg(long, default_value_t = 5000)]
    samples: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    coef_min: f64,
    #[arg(long, default_value_t = 1.5)]
    coef_max: f64,
    /// Denominator of the commission rates.
    #[arg(long, value_enum, default_value_t = CommissionArg::Estimated)]
    commission: CommissionArg,
    /// Estimate with the exact d-separation oracle instead of data.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct CounterexampleArgs {
    #[arg(long, default_value_t = 6)]
    max_vertices: usize,
    #[arg(long, default_value_t = 1)]
    max_latents: usize,
    /// Report output path (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-verify an existing report instead of searching.
    #[arg(long, conflicts_with_all = ["out"])]
    verify: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

/// A failure carrying its exit status and one-line reason.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        CliError::new(EXIT_USAGE, message)
    }
}

fn graph_error(file: &FsPath, e: GraphError) -> CliError {
    let code = match e {
        GraphError::UnknownVertex(_) => EXIT_UNKNOWN_VERTEX,
        _ => EXIT_USAGE,
    };
    CliError::new(code, format!("{}: {e}", file.display()))
}

fn dsep_error(file: &FsPath, e: DsepError) -> CliError {
    match e {
        DsepError::Graph(g) => graph_error(file, g),
        other => CliError::usage(other.to_string()),
    }
}

fn claim_error(file: &FsPath, e: ClaimError) -> CliError {
    match e {
        ClaimError::Graph(g) => graph_error(file, g),
        other => CliError::usage(other.to_string()),
    }
}

fn parse_error(file: &FsPath, e: ParseError) -> CliError {
    CliError::new(EXIT_PARSE, format!("{}:{}", file.display(), e))
}

fn pc_error(e: PcError) -> CliError {
    CliError::new(EXIT_ORACLE, e.to_string())
}

fn read(file: &FsPath) -> Result<String, CliError> {
    fs::read_to_string(file).map_err(|e| CliError::new(EXIT_IO, format!("{}: {e}", file.display())))
}

fn write_to(path: Option<&PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::new(EXIT_IO, format!("{}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::new(EXIT_IO, e.to_string())),
    }
}

fn default_jobs() -> Result<usize, CliError> {
    match std::env::var(JOBS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&j| j > 0)
            .ok_or_else(|| CliError::usage(format!("{JOBS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn with_jobs<T>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    let jobs = match jobs {
        Some(0) => return Err(CliError::usage("--jobs must be positive")),
        Some(j) => j,
        None => default_jobs()?,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::usage(e.to_string()))?;
    Ok(pool.install(f))
}

fn pattern_kv(p: &Pattern) -> String {
    let mut s = format!("vertices={}\n", p.names().join(" "));
    for line in write_pattern(p).lines().filter(|l| !l.starts_with("node ")) {
        s.push_str("edge=");
        s.push_str(line);
        s.push('\n');
    }
    s
}

fn discover(a: &DiscoverArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let result: PcOutput = if let Some(path) = &a.graph {
        let (dag, observed) = parse_dag(&read(path)?).map_err(|e| parse_error(path, e))?;
        let inst = LatentInstance::new(dag, &observed)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        pc(&inst.oracle()).map_err(pc_error)?
    } else {
        let path = a.data.as_ref().expect("clap enforces one input");
        if !(a.alpha > 0.0 && a.alpha < 1.0) {
            return Err(CliError::usage(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
        }
        let file = fs::File::open(path).map_err(|e| CliError::new(EXIT_IO, format!("{}: {e}", path.display())))?;
        let data = Dataset::read_csv(file).map_err(|e| match e {
            SemError::Io(io) => CliError::new(EXIT_IO, format!("{}: {io}", path.display())),
            other => CliError::new(EXIT_PARSE, format!("{}: {other}", path.display())),
        })?;
        let oracle = DataOracle::new(&data, a.alpha).map_err(|e: CiError| CliError::usage(e.to_string()))?;
        pc(&oracle).map_err(pc_error)?
    };
    let names = result.pattern.names().to_vec();
    let trace = result.trace.render(&names);
    if let Some(t) = &a.trace {
        write_to(Some(t), &trace, out)?;
    }
    let text = match a.format {
        OutputFormat::Text => write_pattern(&result.pattern),
        OutputFormat::Kv => pattern_kv(&result.pattern),
        OutputFormat::Trace => trace,
    };
    write_to(a.out.as_ref(), &text, out)
}

fn query_dsep(a: &DsepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let given: Vec<&str> = a.given.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
    let separated = if let Some(path) = &a.graph {
        let (dag, _) = parse_dag(&read(path)?).map_err(|e| parse_error(path, e))?;
        let q = SepQuery::by_name(&dag, &a.x, &a.y, &given).map_err(|e| dsep_error(path, e))?;
        d_separated(&dag, &q).map_err(|e| dsep_error(path, e))?
    } else {
        let path = a.pattern.as_ref().expect("clap enforces one input");
        let p = parse_pattern(&read(path)?).map_err(|e| parse_error(path, e))?;
        let q = SepQuery::by_name(&p, &a.x, &a.y, &given).map_err(|e| dsep_error(path, e))?;
        d_separated(&p, &q).map_err(|e| dsep_error(path, e))?
    };
    let word = if separated { "separated" } else { "dependent" };
    let text = match a.format {
        OutputFormat::Kv => format!("separated={separated}\n"),
        _ => format!("{word}\n"),
    };
    write_to(None, &text, out)
}

fn query_claim(a: &ClaimArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let path = &a.pattern;
    let p = parse_pattern(&read(path)?).map_err(|e| parse_error(path, e))?;
    let x = p.vertex(&a.from).map_err(|e| graph_error(path, e))?;
    let z = p.vertex(&a.to).map_err(|e| graph_error(path, e))?;
    let reading = match a.premise {
        PremiseArg::Arrow => PremiseReading::ArrowInto,
        PremiseArg::Directed => PremiseReading::Directed,
    };
    let verdict = match a.rule {
        None => evaluate_auto(&p, x, z, reading),
        Some(r) => {
            let rule = match r {
                RuleArg::Thm2 => ClaimRule::NotACause,
                RuleArg::Thm3 => ClaimRule::Edge,
                RuleArg::Cor1 => ClaimRule::Path,
            };
            evaluate_claim(&p, x, z, rule, reading)
        }
    }
    .map_err(|e| claim_error(path, e))?;
    let text = match a.format {
        OutputFormat::Kv => {
            let line = verdict.render(&p);
            let detail = line.split_once("; ").map_or("", |(_, d)| d);
            let mut s = format!("verdict={}\n", verdict.kind);
            match &verdict.witness {
                Witness::Anchored { anchor, path } => {
                    s.push_str(&format!("anchor={}\npath={}\n", p.name(*anchor), path.display(&p)));
                }
                Witness::SemiDirectedPath(path) => s.push_str(&format!("path={}\n", path.display(&p))),
                _ => {}
            }
            s.push_str(&format!("detail={detail}\n"));
            s
        }
        _ => format!("{}\n", verdict.render(&p)),
    };
    write_to(None, &text, out)
}

fn band(lo: f64, hi: f64) -> Result<CoefficientBand, CliError> {
    let b = CoefficientBand { lo, hi };
    b.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(b)
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    use rand::SeedableRng;
    if a.samples == 0 {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let band = band(a.coef_min, a.coef_max)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    let usage = |e: SemError| CliError::usage(e.to_string());
    let dag = random_sparse_dag_with(a.vars, a.degree, &mut rng).map_err(usage)?;
    if let Some(g) = &a.graph_out {
        let all: Vec<_> = (0..dag.vertex_count()).collect();
        write_to(Some(g), &write_dag(&dag, &all), out)?;
    }
    let sem = LinearSem::random_with(dag, band, &mut rng).map_err(usage)?;
    let data = sample_linear_sem_with(&sem, a.samples, &mut rng).map_err(usage)?;
    let mut buf = Vec::new();
    data.write_csv(&mut buf).map_err(|e| CliError::new(EXIT_IO, e.to_string()))?;
    write_to(a.out.as_ref(), &String::from_utf8(buf).expect("csv is utf-8"), out)
}

fn benchmark(a: &BenchmarkArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = BenchmarkConfig {
        n_vars: a.vars,
        avg_degree: a.degree,
        n_samples: a.samples,
        alpha: a.alpha,
        n_trials: a.trials,
        coeff_band: band(a.coef_min, a.coef_max)?,
        seed: a.seed,
        commission_base: match a.commission {
            CommissionArg::Estimated => CommissionBase::Estimated,
            CommissionArg::Complement => CommissionBase::TrueComplement,
        },
        oracle: if a.exact { EstimateOracle::Exact } else { EstimateOracle::FisherZ },
    };
    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let report = with_jobs(a.jobs, || monte_carlo_benchmark(&cfg))?.map_err(|e| match e {
        BenchError::InvalidConfig(m) => CliError::usage(m),
        BenchError::Sem(s) => CliError::new(EXIT_ORACLE, s.to_string()),
    })?;
    let text = match a.format {
        OutputFormat::Kv => report.to_kv(),
        _ => report.to_table(),
    };
    write_to(None, &text, out)
}

fn counterexample(a: &CounterexampleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(path) = &a.verify {
        let report = parse_report(&read(path)?).map_err(|e| match e {
            ReportError::Verification(m) => CliError::new(EXIT_ORACLE, m),
            ReportError::Graph(GraphError::UnknownVertex(v)) => {
                CliError::new(EXIT_UNKNOWN_VERTEX, format!("{}: unknown vertex `{v}`", path.display()))
            }
            other => CliError::new(EXIT_PARSE, format!("{}: {other}", path.display())),
        })?;
        verify_report(&report).map_err(|e| CliError::new(EXIT_ORACLE, e.to_string()))?;
        return write_to(None, "verified\n", out);
    }
    let (report, _) = with_jobs(a.jobs, || search_counterexample(a.max_vertices, a.max_latents))?.map_err(
        |e| match e {
            SearchError::InvalidBounds(_) => CliError::usage(e.to_string()),
            SearchError::NotFoundWithinBounds { .. } => CliError::new(EXIT_NOT_FOUND, e.to_string()),
        },
    )?;
    write_to(a.out.as_ref(), &report.to_string(), out)
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit status. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Discover(a) => discover(a, out),
        Command::Query(QueryCommand::Dsep(a)) => query_dsep(a, out),
        Command::Query(QueryCommand::Claim(a)) => query_claim(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Benchmark(a) => benchmark(a, out),
        Command::Counterexample(a) => counterexample(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
