//! Command-line front end: `calibrate` fits intensities from calibration
//! files, `discretize` turns raw events into those files.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use intensity_core::calibration::{calibrate, Outcome};
use intensity_core::io::{self, read_calibration_inputs};

pub mod discretize;
pub mod options;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] intensity_core::Error),
}

impl CliError {
    /// 1 usage, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(intensity_core::Error::Numerical(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

const CALIBRATE_HELP: &str = "\
Options are key=value pairs, read from the config file and then from the
command line (later values win). Recognized keys and defaults:
  EPS=1e-5  sigma=0.5  accuracy=1e-3  max_iter=100  lower_lambda=1e-6
  upper_lambda=1e3  beta_bar=1  cv_proportion=0.2  duration=24/T
  model_type=no_reg|reg  method=calibration|cross_validation
  algorithm=feasible  output_file  info_file  arrivals_file  neighbors_file
  alpha_regions_file  time_groups_file  cv_weights_file";

#[derive(Parser, Debug)]
#[command(name = "intensity", version, about = "Spatio-temporal event discretization and intensity calibration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit arrival intensities from calibration files.
    #[command(after_help = CALIBRATE_HELP)]
    Calibrate {
        /// Config file with key=value lines.
        #[arg(short = 'f', long = "config")]
        config: Option<PathBuf>,
        /// Option overrides: --key=value.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0..)]
        overrides: Vec<String>,
    },
    /// Discretize events in space and time and write calibration files.
    Discretize(Box<discretize::DiscretizeArgs>),
}

fn run_calibrate(config: Option<PathBuf>, overrides: &[String], out: &mut dyn Write) -> Result<(), CliError> {
    let (entries, dir) = match &config {
        Some(path) => {
            let text = io::read_text(path)?;
            let dir = path.parent().map(|p| p.to_path_buf());
            (options::parse_config(&text, &path.display().to_string())?, dir)
        }
        None => (Vec::new(), None),
    };
    let opts = options::resolve(&entries, dir.as_deref(), &options::parse_overrides(overrides)?)?;
    let start = Instant::now();
    let bundle = read_calibration_inputs(&opts.paths, opts.model_type, opts.method)?;
    let outcome = calibrate(&bundle, opts.model_type, opts.method, &opts.param, opts.duration, None)?;
    io::write_text(&opts.output_file, &outcome.output_text())?;
    let secs = start.elapsed().as_secs_f64();
    let report = match &outcome {
        Outcome::Intensities(r) => format!(
            "iterations: {}\nobjective: {}\ngap: {}\ntermination: {:?}\n",
            r.iterations, r.f, r.gap, r.termination
        ),
        Outcome::Coefficients(r) => format!(
            "iterations: {}\nobjective: {}\ngap: {}\ntermination: {:?}\n",
            r.iterations, r.f, r.gap, r.termination
        ),
        Outcome::CrossValidated(r) => format!(
            "best weight: {}\nvalidation losses: {:?}\n",
            r.best_weight, r.losses
        ),
    };
    writeln!(out, "{report}time: {secs:.3} s").ok();
    Ok(())
}

/// Run the command line; returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                write!(out, "{text}").ok();
            } else {
                write!(err, "{text}").ok();
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Calibrate { config, overrides } => run_calibrate(config, &overrides, out),
        Command::Discretize(args) => discretize::run(&args).map(|summary| {
            writeln!(out, "{summary}").ok();
        }),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            writeln!(err, "error: {e}").ok();
            e.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}
