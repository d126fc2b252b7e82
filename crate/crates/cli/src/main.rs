//! `hawkes`: simulate, fit and test exponential Hawkes processes from the shell.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use hawkes_core::experiment::{run_experiment, write_outputs, ExperimentConfig};
use hawkes_core::io::{
    read_events_csv, read_json, sidecar_path, write_events_csv, write_json, IoError,
    SimulationSidecar,
};
use hawkes_core::{
    fit, goodness_of_fit, simulate, EventSequence, ExpHawkesParams, FitOptions, HawkesError,
    Method, RngSeed, StopCriterion,
};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "hawkes",
    version,
    about = "Exponential Hawkes processes with inhibition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate by thinning and write the event times as CSV.
    Simulate(SimulateArgs),
    /// Fit (lambda0, alpha, beta) by maximum likelihood and print the result as JSON.
    Fit(FitArgs),
    /// Time-change Kolmogorov-Smirnov test at the given parameters.
    Gof(GofArgs),
    /// Run the simulation study and write rows.csv and summary.csv.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda0: f64,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<ExpHawkesParams, CliError> {
        ExpHawkesParams::new(self.lambda0, self.alpha, self.beta).map_err(CliError::usage)
    }
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("stop").required(true).args(["n_max", "end_time"])))]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Stop after this many events.
    #[arg(long)]
    n_max: Option<usize>,
    /// Stop at this time.
    #[arg(long)]
    end_time: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// `exact` or `approx`.
    #[arg(long, default_value = "exact")]
    method: Method,
    /// Observation horizon; defaults to the last event time.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Number of extra random starts.
    #[arg(long, default_value_t = 0)]
    multistart: usize,
    #[arg(long, default_value_t = 0)]
    multistart_seed: u64,
    /// Start point as `lambda0,alpha,beta`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    start: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct GofArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Observation horizon; defaults to the last event time.
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// JSON config; the six reference parameter sets are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; all available cores when unset.
    #[arg(long, env = "HAWKES_JOBS")]
    jobs: Option<usize>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Compute(String),
}

impl CliError {
    fn usage(e: impl ToString) -> Self {
        CliError::Usage(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Compute(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Compute(m) => m,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<HawkesError> for CliError {
    fn from(e: HawkesError) -> Self {
        CliError::Compute(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version and 2 for usage errors
            e.exit();
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Fit(args) => cmd_fit(&args),
        Command::Gof(args) => cmd_gof(&args),
        Command::Experiment(args) => cmd_experiment(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(std::io::stdout().lock(), "{text}").map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let params = args.params.params()?;
    let stop = match (args.n_max, args.end_time) {
        (Some(n), _) => StopCriterion::MaxJumps(n),
        (None, Some(t)) => StopCriterion::EndTime(t),
        (None, None) => unreachable!("clap requires one stop flag"),
    };
    stop.validate().map_err(CliError::usage)?;
    let seed = RngSeed(args.seed);
    let events = simulate(&params, stop, seed)?;
    write_events_csv(&args.output, events.times())?;
    let sidecar = SimulationSidecar {
        params,
        seed,
        stop,
        horizon: events.horizon(),
        n_events: events.len(),
    };
    write_json(&sidecar_path(&args.output), &sidecar)?;
    Ok(())
}

/// Reads and validates an events file. Malformed sequences are a computation error.
fn load_events(path: &Path, horizon: Option<f64>) -> Result<(EventSequence, f64), CliError> {
    let times = read_events_csv(path)?;
    let events = match horizon {
        Some(t) => EventSequence::new(times, t)?,
        None => EventSequence::ending_at_last_event(times)?,
    };
    let t = events.horizon();
    Ok((events, t))
}

fn cmd_fit(args: &FitArgs) -> Result<(), CliError> {
    let mut options = FitOptions {
        method: args.method,
        max_iterations: args.max_iter,
        tolerance: args.tol,
        multistart: args.multistart,
        multistart_seed: args.multistart_seed,
        ..FitOptions::default()
    };
    if let Some(start) = &args.start {
        options.start = start
            .as_slice()
            .try_into()
            .map_err(|_| CliError::Usage("--start takes exactly three values".into()))?;
    }
    if args.max_iter == 0 || args.tol.is_nan() || args.tol <= 0.0 {
        return Err(CliError::Usage(
            "--max-iter and --tol must be positive".into(),
        ));
    }
    let (events, t) = load_events(&args.input, args.horizon)?;
    let result = match fit(&events, t, &options) {
        Err(HawkesError::InvalidOptions(m)) => return Err(CliError::Usage(m)),
        other => other?,
    };
    print_json(&result)
}

#[derive(Serialize)]
struct GofOutput {
    statistic: f64,
    p_value: f64,
    n: usize,
}

fn cmd_gof(args: &GofArgs) -> Result<(), CliError> {
    let params = args.params.params()?;
    let (events, _) = load_events(&args.input, args.horizon)?;
    let report = goodness_of_fit(&params, &events)?;
    print_json(&GofOutput {
        statistic: report.ks_statistic,
        p_value: report.p_value,
        n: report.sample_size,
    })
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let config = match &args.config {
        None => ExperimentConfig::default(),
        Some(path) => match read_json::<ExperimentConfig>(path) {
            Ok(config) => config,
            // unreadable file is IO, bad content is usage
            Err(e @ IoError::Io { .. }) => return Err(e.into()),
            Err(e) => return Err(CliError::usage(e)),
        },
    };
    config.validate().map_err(CliError::Usage)?;
    if args.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let rows = run_experiment(&config, args.jobs)?;
    let summary = write_outputs(&args.out, &config, &rows)?;
    let failed: usize = summary.iter().map(|s| s.n_failed).sum();
    eprintln!(
        "wrote {} rows ({failed} failed fits) to {}",
        rows.len(),
        args.out.display()
    );
    Ok(())
}
