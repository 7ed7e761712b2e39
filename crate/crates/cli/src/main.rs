mod commands;
mod config;
mod output;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Outcome;
use config::{parse_point, ConfigFile, ExperimentConfig, Overrides};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

/// Numerical experiments for averaging over quadratic surfaces in F_q^d.
#[derive(Debug, Parser)]
#[command(name = "qavg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON experiment config; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<u64>>,
    #[arg(long)]
    dim: Option<usize>,
    /// Diagonal coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<i64>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orthogonality, Plancherel, inversion and fast-vs-naive transform checks.
    VerifyFourier(CommonArgs),
    /// Point counts, the closed form of (d sigma)^v and its decay.
    VerifySigma(CommonArgs),
    /// Kernel norm bounds by size regime.
    VerifyKernelBounds(CommonArgs),
    /// The averaging battery at the critical exponents.
    VerifyAveraging(CommonArgs),
    /// Fits the growth of the extremizer constants at a point outside the region.
    Sharpness {
        #[command(flatten)]
        common: CommonArgs,
        /// The point (1/p, 1/r), e.g. "1/2,1/3".
        #[arg(long)]
        point: Option<String>,
    },
    /// Prints the conjectured exponent region.
    Region {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        /// Use the general region instead of the hyperbolic one.
        #[arg(long)]
        elliptic: bool,
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Writes a gnuplot script for a report CSV to stdout.
    PlotScript {
        csv: PathBuf,
        #[arg(long, default_value = "empirical constants")]
        title: String,
    },
    /// Writes one derived grid as CSV.
    DumpGrid {
        #[command(flatten)]
        common: CommonArgs,
        /// indicator, sigma, kernel or kernel-hat.
        #[arg(long, default_value = "kernel-hat")]
        what: String,
    },
}

fn resolve(common: CommonArgs, point: Option<String>) -> Result<ExperimentConfig, CliError> {
    let file = match &common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    ExperimentConfig::resolve(
        file,
        Overrides {
            q_list: common.q,
            d: common.dim,
            coeffs: common.coeffs,
            seed: common.seed,
            out: common.out,
            point,
        },
    )
}

/// Writes to stdout, ignoring a reader that has gone away.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn finish(config: &ExperimentConfig, outcome: Outcome) -> Result<bool, CliError> {
    let written = outcome.outputs.commit(&config.output_dir)?;
    let mut text = String::new();
    for line in &outcome.lines {
        text.push_str(&format!("{line}\n"));
    }
    for path in written {
        text.push_str(&format!("wrote {path}\n"));
    }
    text.push_str(if outcome.pass { "PASS\n" } else { "FAIL\n" });
    emit(&text);
    Ok(outcome.pass)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let experiment = |common, point, f: fn(&ExperimentConfig) -> Result<Outcome, CliError>| {
        let config = resolve(common, point)?;
        let outcome = f(&config)?;
        finish(&config, outcome)
    };
    match cli.command {
        Command::VerifyFourier(c) => experiment(c, None, commands::verify_fourier),
        Command::VerifySigma(c) => experiment(c, None, commands::verify_sigma),
        Command::VerifyKernelBounds(c) => experiment(c, None, commands::verify_kernel_bounds),
        Command::VerifyAveraging(c) => experiment(c, None, commands::verify_averaging),
        Command::Sharpness { common, point } => experiment(common, point, commands::sharpness),
        Command::Region { dim, elliptic, point, json } => {
            let point = point.as_deref().map(parse_point).transpose()?;
            emit(&commands::region(dim, !elliptic, point, json)?);
            Ok(true)
        }
        Command::PlotScript { csv, title } => {
            if !csv.exists() {
                return Err(CliError::Usage(format!("csv: {} does not exist", csv.display())));
            }
            emit(&commands::plot_script(&csv.display().to_string(), &title));
            Ok(true)
        }
        Command::DumpGrid { common, what } => {
            let config = resolve(common, None)?;
            let outcome = commands::dump_grid(&config, &what)?;
            finish(&config, outcome)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
