//! Command-line front end for the `hdrank` binary.
//!
//! Three subcommands are provided: `one-sample` and `two-sample` run the tests on
//! CSV files (rows are observations, columns are variables), and `simulate` runs
//! a Monte Carlo size or power study. Results go to stdout or to `--output`, and
//! an output file is only created once every computation has succeeded.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::matrix::DataMatrix;
use crate::simlab::{run_study_with_threads, Distribution, MeanSpec, Scenario, SimConfig, StudyTable};
use crate::testkit::{Method, Problem, RankSummary, TauMethod, TestOptions, TestResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "hdrank", version, about = "Rank-based max/sum/combination tests for high-dimensional means")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test H0: every coordinate of X is symmetric about zero.
    OneSample(OneSampleArgs),
    /// Test H0: X and Y have the same distribution.
    TwoSample(TwoSampleArgs),
    /// Estimate empirical size or power by simulation.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct OneSampleArgs {
    /// CSV file with one observation per row
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub test: TestArgs,
}

#[derive(Args, Debug)]
pub struct TwoSampleArgs {
    /// CSV file with the first sample
    #[arg(long)]
    pub x: PathBuf,
    /// CSV file with the second sample
    #[arg(long)]
    pub y: PathBuf,
    #[command(flatten)]
    pub test: TestArgs,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    #[arg(long, value_enum, default_value_t = MethodSelector::All)]
    pub method: MethodSelector,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Significance level in (0, 1)
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    pub alpha: f64,
    /// Bartlett bandwidth for the long-run variance (default: floor(3 p^(1/3)))
    #[arg(long)]
    pub bandwidth: Option<usize>,
    /// Long-run variance estimator used by the sum test
    #[arg(long, value_enum, default_value_t = TauChoice::Score)]
    pub tau_method: TauChoice,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write results here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemChoice,
    /// Size of the (first) sample
    #[arg(long)]
    pub n: usize,
    /// Size of the second sample (two-sample only, default: n)
    #[arg(long)]
    pub m: Option<usize>,
    /// Dimension
    #[arg(long)]
    pub p: usize,
    /// Covariance: identity, ar1(RHO), or the numbered scenarios 1-3
    #[arg(long, default_value = "identity")]
    pub scenario: Scenario,
    /// Marginal distribution: normal or t3
    #[arg(long, default_value = "normal")]
    pub dist: Distribution,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Comma-separated numbers of nonzero mean coordinates; 0 alone gives a size study
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub m_signal: Vec<usize>,
    /// Worker threads (default: available parallelism)
    #[arg(long, env = "HDRANK_THREADS")]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodSelector {
    Max,
    Sum,
    Com,
    All,
}

impl MethodSelector {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodSelector::Max => vec![Method::Max1],
            MethodSelector::Sum => vec![Method::Sum1],
            MethodSelector::Com => vec![Method::Com1],
            MethodSelector::All => Method::ALL.to_vec(),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauChoice {
    /// Bartlett sum of cross-coordinate rank-score correlations
    Score,
    /// Bartlett sum of autocovariances of the standardized squares
    Autocov,
}

impl From<TauChoice> for TauMethod {
    fn from(c: TauChoice) -> Self {
        match c {
            TauChoice::Score => TauMethod::ScoreCorrelation,
            TauChoice::Autocov => TauMethod::Autocovariance,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemChoice {
    OneSample,
    TwoSample,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let a: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(format!("alpha must lie in (0, 1), got {s}"))
    }
}

/// A failure carrying the process exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Validation(_) => EXIT_INPUT,
            Error::Domain(_) => EXIT_PRECONDITION,
            Error::Numerical(_) => EXIT_NUMERICAL,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: &Command) -> CliResult<()> {
    match command {
        Command::OneSample(a) => run_one_sample(a),
        Command::TwoSample(a) => run_two_sample(a),
        Command::Simulate(a) => run_simulate(a),
    }
}

fn test_options(c: &CommonArgs) -> TestOptions {
    TestOptions {
        alpha: c.alpha,
        bandwidth: c.bandwidth,
        tau_method: c.tau_method.into(),
    }
}

/// Rejects requests that cannot run on `p` coordinates before doing any work.
fn check_request(methods: &[Method], p: usize, bandwidth: Option<usize>) -> CliResult<()> {
    for &method in methods {
        if p < method.min_dimension() {
            return Err(CliError {
                code: EXIT_PRECONDITION,
                message: format!("{method} needs at least {} variables, the input has {p}", method.min_dimension()),
            });
        }
    }
    if let Some(b) = bandwidth {
        if methods.iter().any(|m| *m != Method::Max1) && b + 1 >= p {
            return Err(CliError::input(format!("bandwidth {b} must be below p - 1 = {}", p - 1)));
        }
    }
    Ok(())
}

fn run_tests(summary: &RankSummary, test: &TestArgs) -> CliResult<Vec<TestResult>> {
    let opts = test_options(&test.common);
    let methods = test.method.methods();
    check_request(&methods, summary.p(), opts.bandwidth)?;
    let results = if methods.len() == 3 {
        summary.all_tests(&opts)?.to_vec()
    } else {
        vec![summary.run(methods[0], &opts)?]
    };
    for r in &results {
        eprintln!(
            "{} {}: statistic {:.6} p-value {:.6e} {}",
            r.problem,
            r.method,
            r.statistic,
            r.p_value.value(),
            if r.reject { "reject" } else { "retain" }
        );
    }
    Ok(results)
}

pub fn run_one_sample(args: &OneSampleArgs) -> CliResult<()> {
    let x = read_matrix(&args.input)?;
    let results = run_tests(&RankSummary::one_sample(&x), &args.test)?;
    emit(&report(&results, args.test.common.format), args.test.common.output.as_deref())
}

pub fn run_two_sample(args: &TwoSampleArgs) -> CliResult<()> {
    let x = read_matrix(&args.x)?;
    let y = read_matrix(&args.y)?;
    if x.p() != y.p() {
        return Err(CliError::input(format!(
            "{} has {} columns but {} has {}",
            args.x.display(),
            x.p(),
            args.y.display(),
            y.p()
        )));
    }
    let results = run_tests(&RankSummary::two_sample(&x, &y)?, &args.test)?;
    emit(&report(&results, args.test.common.format), args.test.common.output.as_deref())
}

pub fn run_simulate(args: &SimulateArgs) -> CliResult<()> {
    let problem = match args.problem {
        ProblemChoice::OneSample => Problem::OneSample,
        ProblemChoice::TwoSample => Problem::TwoSample,
    };
    if problem == Problem::OneSample && args.m.is_some() {
        return Err(CliError::input("--m only applies to the two-sample problem"));
    }
    if args.threads == Some(0) {
        return Err(CliError::input("--threads must be at least 1"));
    }
    let opts = test_options(&args.common);
    let config = SimConfig {
        problem,
        n: args.n,
        m: args.m.unwrap_or(args.n),
        p: args.p,
        scenario: args.scenario,
        distribution: args.dist,
        mean: MeanSpec::Sparse(args.m_signal.clone()),
        reps: args.reps,
        alpha: opts.alpha,
        master_seed: args.seed,
        bandwidth: opts.bandwidth,
        tau_method: opts.tau_method,
    };
    config.validate().map_err(|e| CliError::input(e.to_string()))?;
    let threads = args
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    log::info!("running {} replications per cell on {threads} threads", config.reps);
    let table = run_study_with_threads(&config, threads)?;
    summarize(&table);
    let text = match args.common.format {
        Format::Json => table.to_json() + "\n",
        Format::Csv => table.to_csv(),
    };
    emit(&text, args.common.output.as_deref())
}

fn summarize(table: &StudyTable) {
    for cell in table.rows.chunks(Method::ALL.len()) {
        let mut line = format!("m_signal={}:", cell[0].m_signal);
        for r in cell {
            let _ = write!(line, " {} {:.3} (se {:.3})", r.method, r.rejection_rate, r.mc_stderr);
        }
        eprintln!("{line}");
    }
}

const REPORT_HEADER: &str = "problem,method,statistic,p_value,reject,alpha,n,m,p,tau_sq,bandwidth,tau_method,p_max,p_sum,clamped,ties_detected,zeros_detected,degenerate_columns";

fn real(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Renders test results as a JSON array or as CSV with 17 significant digits.
pub fn report(results: &[TestResult], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(results).expect("results serialize") + "\n",
        Format::Csv => {
            let mut out = String::from(REPORT_HEADER);
            out.push('\n');
            for r in results {
                let m = &r.meta;
                let fields = [
                    r.problem.to_string(),
                    r.method.to_string(),
                    real(Some(r.statistic)),
                    real(Some(r.p_value.value())),
                    r.reject.to_string(),
                    real(Some(r.alpha)),
                    m.n.to_string(),
                    opt(m.m),
                    m.p.to_string(),
                    real(m.tau_sq),
                    opt(m.bandwidth),
                    opt(m.tau_method),
                    real(m.p_max),
                    real(m.p_sum),
                    opt(m.clamped),
                    m.ties_detected.to_string(),
                    m.zeros_detected.to_string(),
                    m.degenerate_columns.to_string(),
                ];
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            out
        }
    }
}

fn emit(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::input(format!("cannot write to stdout: {e}"))),
    }
}

/// Reads a numeric CSV file. A first line containing any non-numeric field is a header.
pub fn read_matrix(path: &Path) -> CliResult<DataMatrix> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    parse_matrix(file, &path.display().to_string())
}

/// [`read_matrix`] over any reader; `source` names the input in diagnostics.
pub fn parse_matrix<R: std::io::Read>(reader: R, source: &str) -> CliResult<DataMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, record) in rdr.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| CliError::input(format!("{source}: row {line}: {e}")))?;
        if line == 1 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(CliError::input(format!(
                "{source}: row {line} has {} fields, expected {expected} (column {} is {})",
                record.len(),
                record.len().min(expected) + 1,
                if record.len() < expected { "missing" } else { "extra" }
            )));
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, field)| {
                let col = j + 1;
                if field.is_empty() {
                    return Err(CliError::input(format!("{source}: row {line}, column {col}: missing value")));
                }
                match field.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(CliError::input(format!(
                        "{source}: row {line}, column {col}: '{field}' is not a finite number"
                    ))),
                }
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(CliError::input(format!("{source}: need at least 2 data rows, found {}", rows.len())));
    }
    DataMatrix::from_rows(&rows).map_err(|e| CliError::input(format!("{source}: {e}")))
}
