//! `thermolen`: batch front end for isotherm lengths, metric analysis and
//! closed-form verification of virial gases.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod text;

#[derive(Debug, Parser)]
#[command(name = "thermolen", version, about = "Thermodynamic length on the Helmholtz potential metric")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Six significant digits, aligned for reading.
    Human,
    /// JSON whose numbers re-parse to the identical values.
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Closed form when one exists for this gas and interval, else quadrature.
    Auto,
    Closed,
    Quadrature,
    /// Boundary work term plus by-parts correction.
    #[value(name = "theorem-work", alias = "theorem35")]
    TheoremWork,
    /// One integral per expansion coefficient.
    #[value(name = "theorem-sum", alias = "theorem36")]
    TheoremSum,
}

#[derive(Debug, Args)]
pub struct Gas {
    /// TOML description of the equation of state.
    #[arg(long)]
    pub config: PathBuf,
    /// Temperature in K.
    #[arg(long = "T", allow_negative_numbers = true)]
    pub t: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thermodynamic length along an isotherm.
    Length {
        #[command(flatten)]
        gas: Gas,
        #[arg(long, allow_negative_numbers = true)]
        v1: f64,
        #[arg(long, allow_negative_numbers = true)]
        v2: f64,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Metric components, eigen-structure and identity residuals at a state.
    Metric {
        #[command(flatten)]
        gas: Gas,
        #[arg(long, allow_negative_numbers = true)]
        v: f64,
        /// Temperature component of a tangent vector to classify.
        #[arg(long = "dT", allow_negative_numbers = true, requires = "dv")]
        dt: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "dt")]
        dv: Option<f64>,
    },
    /// Compare closed forms and decompositions with quadrature on a grid.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// `T=100,300;v=0.012:0.018,0.012:0.024`; either part may be omitted.
        #[arg(long)]
        grid: Option<String>,
    },
    /// CSV of pressure and cumulative length and work on a uniform volume grid.
    Sweep {
        #[command(flatten)]
        gas: Gas,
        #[arg(long, allow_negative_numbers = true)]
        vmin: f64,
        #[arg(long, allow_negative_numbers = true)]
        vmax: f64,
        #[arg(long)]
        steps: usize,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Isothermal work and Helmholtz potential change between two volumes.
    Work {
        #[command(flatten)]
        gas: Gas,
        #[arg(long, allow_negative_numbers = true)]
        v1: f64,
        #[arg(long, allow_negative_numbers = true)]
        v2: f64,
    },
    /// Causal character of a tangent vector and the null slopes at a state.
    Classify {
        #[command(flatten)]
        gas: Gas,
        #[arg(long, allow_negative_numbers = true)]
        v: f64,
        #[arg(long = "dT", allow_negative_numbers = true)]
        dt: f64,
        #[arg(long, allow_negative_numbers = true)]
        dv: f64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(thermolen::Error),
}

impl From<thermolen::Error> for CliError {
    fn from(e: thermolen::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_STABILITY: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;
pub const EXIT_FLAG: u8 = 5;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use thermolen::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                E::Config(_) | E::UnsupportedOrder { .. } | E::ZeroVector => EXIT_USAGE,
                E::Domain(_) | E::Stability { .. } | E::ClosedFormDomain(_) => EXIT_STABILITY,
                E::Degenerate(_) | E::Signature(_) | E::NullVector { .. } | E::NonConvergence { .. } => EXIT_NUMERICAL,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("thermolen: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
