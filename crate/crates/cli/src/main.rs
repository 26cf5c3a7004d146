//! Command-line front end: Jacobi symbols, multiplicative orders, unit
//! group censuses with closed-form verification, the factoring loop, and
//! seeded strategy comparisons. Every command is deterministic given its
//! full flag set.
//!
//! Exit codes: 0 success/verified, 1 domain error, 2 verification
//! mismatch (or factoring failure), 3 resource cap exceeded.

mod config;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use shor_prep::census::{profile_family, run_census, CensusReport, SemiprimeProfile};
use shor_prep::ntcore::{factorize, group_exponent, jacobi, multiplicative_order};
use shor_prep::shor::{
    compare_strategies, factor, AttemptRecord, CompareReport, FactorReport, SelectionStrategy,
    DEFAULT_MAX_ATTEMPTS,
};
use shor_prep::Error;

const EXIT_OK: u8 = 0;
const EXIT_DOMAIN: u8 = 1;
const EXIT_MISMATCH: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "shor-prep",
    version,
    about = "Jacobi-filtered base selection for the classical Shor factoring loop",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Seed for all randomized commands
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for census and sweep (defaults to all cores)
    #[arg(long, global = true, value_parser = clap::value_parser!(usize))]
    workers: Option<usize>,

    /// Attempt budget for factoring runs
    #[arg(long, global = true)]
    max_attempts: Option<u32>,

    /// key=value file supplying defaults for the flags above (flags win)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Jacobi symbol (a/n) for odd n >= 3
    Jacobi { a: u64, n: u64 },
    /// Print the multiplicative order of y modulo n
    Order { y: u64, n: u64 },
    /// Enumerate Z_pq^* and verify every count against its closed form
    Census { p: u64, q: u64 },
    /// Run the census for every prime pair p < q up to the bounds
    Sweep { p_max: u64, q_max: u64 },
    /// Factor an odd semiprime with the chosen base-selection strategy
    Factor {
        n: u64,
        /// Base-selection strategy
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
    },
    /// Seeded Monte Carlo comparison of both strategies
    Compare {
        /// Semiprimes to compare on
        #[arg(required = true)]
        n: Vec<u64>,
        /// Factoring trials per strategy
        #[arg(long)]
        trials: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Uniform,
    Jacobi,
}

impl From<StrategyArg> for SelectionStrategy {
    fn from(arg: StrategyArg) -> Self {
        match arg {
            StrategyArg::Uniform => SelectionStrategy::Uniform,
            StrategyArg::Jacobi => SelectionStrategy::JacobiFiltered,
        }
    }
}

/// Fully resolved run configuration: flag, then config file, then default.
struct Settings {
    format: OutputFormat,
    seed: u64,
    workers: Option<usize>,
    max_attempts: u32,
    trials: u64,
    strategy: SelectionStrategy,
}

enum CliError {
    Lib(Error),
    Config(String),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Lib(err)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(err) => write!(f, "{err}"),
            CliError::Config(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(err) if err.is_resource() => EXIT_RESOURCE,
            _ => EXIT_DOMAIN,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_DOMAIN,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn resolve_settings(cli: &Cli) -> Result<Settings, CliError> {
    let defaults = match &cli.config {
        Some(path) => config::load(path).map_err(CliError::Config)?,
        None => config::ConfigDefaults::default(),
    };
    let format = match cli.format {
        Some(f) => f,
        None => match &defaults.format {
            Some(name) => OutputFormat::from_str(name, true)
                .map_err(|_| CliError::Config(format!("unknown format {name} in config")))?,
            None => OutputFormat::Text,
        },
    };
    let strategy = match &defaults.strategy {
        Some(name) => StrategyArg::from_str(name, true)
            .map_err(|_| CliError::Config(format!("unknown strategy {name} in config")))?
            .into(),
        None => SelectionStrategy::JacobiFiltered,
    };
    Ok(Settings {
        format,
        seed: cli.seed.or(defaults.seed).unwrap_or(0),
        workers: cli.workers.or(defaults.workers),
        max_attempts: cli
            .max_attempts
            .or(defaults.max_attempts)
            .unwrap_or(DEFAULT_MAX_ATTEMPTS),
        trials: defaults.trials.unwrap_or(10_000),
        strategy,
    })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let settings = resolve_settings(&cli)?;
    match cli.command {
        Command::Jacobi { a, n } => cmd_jacobi(a, n, &settings),
        Command::Order { y, n } => cmd_order(y, n, &settings),
        Command::Census { p, q } => cmd_census(p, q, &settings),
        Command::Sweep { p_max, q_max } => cmd_sweep(p_max, q_max, &settings),
        Command::Factor { n, strategy } => {
            let strategy = strategy.map(SelectionStrategy::from).unwrap_or(settings.strategy);
            cmd_factor(n, strategy, &settings)
        }
        Command::Compare { n, trials } => {
            let trials = trials.unwrap_or(settings.trials);
            cmd_compare(&n, trials, &settings)
        }
    }
}

/// Runs f on a dedicated pool when a worker count was requested.
fn with_pool<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match workers {
        Some(count) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(count.max(1))
                .build()
                .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

#[derive(Serialize)]
struct JacobiOutput {
    a: u64,
    n: u64,
    symbol: i8,
}

fn cmd_jacobi(a: u64, n: u64, settings: &Settings) -> Result<u8, CliError> {
    let symbol = jacobi(a, n)?;
    match settings.format {
        OutputFormat::Text => println!("{symbol}"),
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string(&JacobiOutput { a, n, symbol }).expect("serializes")
        ),
        OutputFormat::Csv => {
            println!("a,n,symbol");
            println!("{a},{n},{symbol}");
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OrderOutput {
    y: u64,
    n: u64,
    order: u64,
}

fn cmd_order(y: u64, n: u64, settings: &Settings) -> Result<u8, CliError> {
    if n < 2 {
        return Err(Error::ModulusTooSmall { modulus: n }.into());
    }
    let lambda = group_exponent(&factorize(n)?);
    let bound = if lambda == 1 { Vec::new() } else { factorize(lambda)? };
    let order = multiplicative_order(y, n, &bound)?;
    match settings.format {
        OutputFormat::Text => println!("{order}"),
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string(&OrderOutput { y, n, order }).expect("serializes")
        ),
        OutputFormat::Csv => {
            println!("y,n,order");
            println!("{y},{n},{order}");
        }
    }
    Ok(EXIT_OK)
}

fn render_census_text(report: &CensusReport) -> String {
    let r = report.record();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n = {} = {} * {}   (m1 = {}, x1 = {}, m2 = {}, x2 = {})",
        r.n, r.p, r.q, r.m1, r.x1, r.m2, r.x2
    );
    let _ = writeln!(out, "phi               = {}", r.phi);
    let _ = writeln!(out, "usable uniform    = {}", r.usable_uniform);
    let _ = writeln!(out, "odd order         = {}", r.odd_order);
    let _ = writeln!(out, "minus one         = {}", r.minus_one);
    let _ = writeln!(out, "jacobi -1 units   = {}", r.jacobi_minus_one);
    let _ = writeln!(out, "usable filtered   = {}", r.usable_filtered);
    let _ = writeln!(
        out,
        "failure uniform   = {} (~{:.6}), predicted {}",
        r.failure_prob_uniform,
        r.failure_prob_uniform.to_f64(),
        r.predicted_failure_uniform
    );
    let _ = writeln!(
        out,
        "success filtered  = {} (~{:.6}), predicted {}",
        r.success_prob_filtered,
        r.success_prob_filtered.to_f64(),
        r.predicted_success_filtered
    );
    let _ = write!(
        out,
        "predictions match = {}",
        if report.predictions_match() { "yes" } else { "NO" }
    );
    out
}

fn cmd_census(p: u64, q: u64, settings: &Settings) -> Result<u8, CliError> {
    let profile = SemiprimeProfile::new(p, q)?;
    let report = with_pool(settings.workers, move || run_census(&profile))??;
    match settings.format {
        OutputFormat::Text => println!("{}", render_census_text(&report)),
        OutputFormat::Json => println!("{}", report.record().to_json()),
        OutputFormat::Csv => {
            println!("{}", shor_prep::census::CensusRecord::CSV_HEADER);
            println!("{}", report.record().to_csv_row());
        }
    }
    Ok(if report.predictions_match() { EXIT_OK } else { EXIT_MISMATCH })
}

#[derive(Serialize)]
struct SweepSummary {
    swept: usize,
    violations: usize,
}

fn cmd_sweep(p_max: u64, q_max: u64, settings: &Settings) -> Result<u8, CliError> {
    let profiles = profile_family(p_max, q_max)?;
    let reports: Vec<CensusReport> = with_pool(settings.workers, move || {
        profiles.par_iter().map(run_census).collect::<Result<_, _>>()
    })??;
    let violations = reports.iter().filter(|r| !r.predictions_match()).count();
    match settings.format {
        OutputFormat::Text => {
            for report in &reports {
                let r = report.record();
                println!(
                    "n = {} ({} * {}): failure {}, success {}, {}",
                    r.n,
                    r.p,
                    r.q,
                    r.failure_prob_uniform,
                    r.success_prob_filtered,
                    if report.predictions_match() { "predictions match" } else { "PREDICTION MISMATCH" }
                );
            }
            println!("swept {} profiles, {} violations", reports.len(), violations);
        }
        OutputFormat::Json => {
            for report in &reports {
                println!("{}", report.record().to_json());
            }
            println!(
                "{}",
                serde_json::to_string(&SweepSummary { swept: reports.len(), violations })
                    .expect("serializes")
            );
        }
        OutputFormat::Csv => {
            println!("{}", shor_prep::census::CensusRecord::CSV_HEADER);
            for report in &reports {
                println!("{}", report.record().to_csv_row());
            }
        }
    }
    Ok(if violations == 0 { EXIT_OK } else { EXIT_MISMATCH })
}

fn attempt_text(record: &AttemptRecord) -> String {
    let mut line = format!(
        "attempt {}: y = {}, jacobi = {}, outcome = {}",
        record.attempt, record.y, record.jacobi, record.outcome
    );
    if let Some(order) = record.order {
        let _ = write!(line, ", order = {order}");
    }
    if let Some(factor) = record.factor {
        let _ = write!(line, ", factor = {factor}");
    }
    line
}

fn render_factor_text(report: &FactorReport) -> String {
    let mut out = String::new();
    for record in &report.log {
        let _ = writeln!(out, "{}", attempt_text(record));
    }
    match report.factors {
        Some((a, b)) => {
            let _ = write!(
                out,
                "factors: {a} * {b} = {} (strategy {}, seed {}, attempts {})",
                report.n, report.strategy, report.seed, report.attempts_used
            );
        }
        None => {
            let _ = write!(
                out,
                "no factor within {} attempts (strategy {}, seed {})",
                report.max_attempts, report.strategy, report.seed
            );
        }
    }
    out
}

fn cmd_factor(n: u64, strategy: SelectionStrategy, settings: &Settings) -> Result<u8, CliError> {
    let report = factor(n, strategy, settings.seed, settings.max_attempts)?;
    match settings.format {
        OutputFormat::Text => println!("{}", render_factor_text(&report)),
        OutputFormat::Json => print!("{}", report.to_json_lines()),
        OutputFormat::Csv => {
            println!("attempt,y,jacobi,outcome,order,factor");
            for record in &report.log {
                println!(
                    "{},{},{},{},{},{}",
                    record.attempt,
                    record.y,
                    record.jacobi,
                    record.outcome,
                    record.order.map(|v| v.to_string()).unwrap_or_default(),
                    record.factor.map(|v| v.to_string()).unwrap_or_default(),
                );
            }
        }
    }
    Ok(if report.succeeded() { EXIT_OK } else { EXIT_MISMATCH })
}

fn render_compare_text(report: &CompareReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n = {}: trials = {}, seed = {}, max attempts = {}",
        report.n, report.trials, report.seed, report.max_attempts
    );
    let _ = writeln!(
        out,
        "  {:<9} {:>9} {:>9} {:>10} {:>9} {:>10} {:>10} {:>9}",
        "strategy", "successes", "attempts", "mean", "rate", "odd_order", "minus_one", "exhausted"
    );
    for stats in &report.strategies {
        let _ = writeln!(
            out,
            "  {:<9} {:>9} {:>9} {:>10.6} {:>9.6} {:>10} {:>10} {:>9}",
            stats.strategy.to_string(),
            stats.successes,
            stats.total_attempts,
            stats.mean_attempts.to_f64(),
            stats.per_attempt_success.to_f64(),
            stats.odd_order_attempts,
            stats.minus_one_attempts,
            stats.exhausted_trials
        );
    }
    out.truncate(out.trim_end().len());
    out
}

fn cmd_compare(ns: &[u64], trials: u64, settings: &Settings) -> Result<u8, CliError> {
    let mut csv_header_done = false;
    for &n in ns {
        let report = compare_strategies(n, trials, settings.seed, settings.max_attempts)?;
        match settings.format {
            OutputFormat::Text => println!("{}", render_compare_text(&report)),
            OutputFormat::Json => println!("{}", report.to_json()),
            OutputFormat::Csv => {
                if !csv_header_done {
                    println!(
                        "n,strategy,trials,successes,exhausted_trials,total_attempts,\
                         odd_order_attempts,minus_one_attempts,max_trial_attempts,\
                         mean_attempts,per_attempt_success"
                    );
                    csv_header_done = true;
                }
                for stats in &report.strategies {
                    println!(
                        "{},{},{},{},{},{},{},{},{},{},{}",
                        report.n,
                        stats.strategy,
                        stats.trials,
                        stats.successes,
                        stats.exhausted_trials,
                        stats.total_attempts,
                        stats.odd_order_attempts,
                        stats.minus_one_attempts,
                        stats.max_trial_attempts,
                        stats.mean_attempts,
                        stats.per_attempt_success,
                    );
                }
            }
        }
    }
    Ok(EXIT_OK)
}
