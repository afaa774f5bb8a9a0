use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twocell_core::harness::{self, OracleReport};
use twocell_core::{MethodId, ScenarioConfig};

use crate::config::{load_config, ConfigError};
use crate::csv;

/// Pairs sampled by `--oracle-check`, and the grid it uses.
const ORACLE_SAMPLES: usize = 200;
const ORACLE_RESOLUTION: usize = 400;
const ORACLE_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Parser)]
#[command(
    name = "twocell",
    version,
    about = "Two-cell uplink resource allocation sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mean sum rate and feasibility probability versus SNR for each method.
    Sweep(CommonArgs),
    /// Feasibility probability versus SNR for several rate floors.
    Feasibility {
        #[command(flatten)]
        common: CommonArgs,
        /// Rate floors in bits/s/Hz (default: `r_min_values` from the config).
        #[arg(long = "r-min", value_delimiter = ',')]
        r_min: Option<Vec<f64>>,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Scenario file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Comma-separated methods: a (exhaustive), b (Hungarian), d (random).
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<MethodId>>,
    /// Output CSV; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Also compare the closed-form power solver with a grid search on
    /// sampled pairs and report the largest deviation.
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(#[from] twocell_core::Error),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("no rate floors given: pass --r-min or set r_min_values in the config")]
    NoRateFloors,
}

impl CommonArgs {
    fn scenario(&self) -> Result<(ScenarioConfig, Option<Vec<f64>>), CliError> {
        let file = load_config(&self.config)?;
        let mut scenario = file.scenario;
        if let Some(seed) = self.seed {
            scenario.seed = seed;
        }
        if let Some(trials) = self.trials {
            scenario.trials = trials;
        }
        let scenario = twocell_core::scenario::validate_config(scenario)?;
        Ok((scenario, file.r_min_values))
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Output {
            path: path.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Output {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn report_oracle(report: &OracleReport) {
    eprintln!(
        "oracle check: {} pairs ({} feasible), max gap {} bits, {} above {} bits, {} verdict mismatches",
        report.pairs_checked,
        report.feasible_pairs,
        csv::format_sig(report.max_gap),
        report.gap_violations,
        ORACLE_TOLERANCE,
        report.verdict_mismatches,
    );
}

fn run_common(common: &CommonArgs, config: &ScenarioConfig) -> Result<(), CliError> {
    if common.oracle_check {
        let samples = ORACLE_SAMPLES.min(config.trials);
        let report = harness::oracle_check(config, samples, ORACLE_RESOLUTION, ORACLE_TOLERANCE)?;
        report_oracle(&report);
    }
    Ok(())
}

/// Runs the CLI on already-parsed arguments.
fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(common) => {
            let (config, _) = common.scenario()?;
            let methods = common.methods.clone().unwrap_or(MethodId::ALL.to_vec());
            let result = harness::sweep(&config, &methods)?;
            write_output(common.out.as_deref(), &csv::to_csv_string(&result))?;
            run_common(&common, &config)
        }
        Command::Feasibility { common, r_min } => {
            let (config, from_file) = common.scenario()?;
            let r_min_values = r_min.or(from_file).ok_or(CliError::NoRateFloors)?;
            if r_min_values.is_empty() {
                return Err(CliError::NoRateFloors);
            }
            let methods = common
                .methods
                .clone()
                .unwrap_or(vec![MethodId::HungarianClosedForm]);
            let mut curves = Vec::new();
            for method in methods {
                curves.extend(harness::feasibility_curve(&config, &r_min_values, method)?);
            }
            write_output(common.out.as_deref(), &csv::feasibility_csv_string(&curves))?;
            run_common(&common, &config)
        }
    }
}

/// Collapses a multi-line clap error into one line, dropping the usage text.
fn one_line(rendered: &str) -> String {
    rendered
        .lines()
        .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Entry point: returns 0 on success, 2 on bad arguments, 1 on config, run
/// or I/O failures. Diagnostics are a single line on standard error.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) if !err.use_stderr() => {
            // --help and --version
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            eprintln!("{}", one_line(&err.render().to_string()));
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
