mod commands;
mod config;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Outcome;

#[derive(Parser, Debug)]
#[command(name = "sisi", version, about = "Discrete-time two-strain SISI epidemic model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Parameters as `b=0.1,alpha=0.2,...`; override the preset and config file.
    #[arg(long, global = true, value_name = "K=V,..")]
    pub params: Option<String>,
    /// Flat `key=value` config file; an echoed report header reads back.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Initial point `x,u,y,v`.
    #[arg(long, global = true, value_name = "X,U,Y,V")]
    pub init: Option<String>,
    /// Start from the parameters of a built-in figure (1-6).
    #[arg(long, global = true, value_name = "N")]
    pub figure: Option<u32>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub max_iter: Option<u64>,
    #[arg(long, global = true)]
    pub tol_step: Option<f64>,
    #[arg(long, global = true)]
    pub tol_fix: Option<f64>,
    /// Levels per parameter axis in a conjecture scan.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the parameters against the admissibility conditions.
    Validate,
    /// Iterate the operator until it settles and compare with the prediction.
    Simulate {
        /// Print every Nth iterate (the last one is always printed).
        #[arg(long, default_value_t = 1)]
        stride: u64,
    },
    /// List the fixed-point catalog with residuals.
    Fixpoints,
    /// Classify each isolated fixed point by its Jacobian spectrum.
    Classify,
    /// Check the conjugacy of the reduced map with the logistic map.
    Conjugacy {
        #[arg(long, default_value_t = 10_000)]
        points: usize,
    },
    /// Grid scan of a conjecture; one JSON line per cell and initial point.
    Scan {
        /// 1: no reinfection (beta2 = 0); 2: full model.
        #[arg(long, default_value_t = 2)]
        which: u8,
        /// Random initial points per parameter cell.
        #[arg(long, default_value_t = 5)]
        points: usize,
    },
    /// Dump all 64 entries of the cubic stochastic tensor.
    TensorDump,
    /// Sample the f/g curves whose crossings are interior fixed points.
    Curves {
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long)]
        x_max: Option<f64>,
    },
    /// Randomised check of a proven regime (or `all`).
    Verify {
        #[arg(long, default_value = "all")]
        regime: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// List the regime ids understood by `verify`.
    Regimes,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::error_code(&err))
        }
    }
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Negative => 1,
            Outcome::NotConverged => 3,
        }
    }
}
