use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod render;

/// Exact computations with two-parameter small quantum groups u_{r,s}(sl_n).
#[derive(Parser, Debug)]
#[command(name = "uqrs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Isomorphism classes of parameter pairs (ζ^x, ζ^y).
    Classify(ClassifyArgs),
    /// Counted PBW dimension against the closed formula.
    Dimension(DimensionArgs),
    /// Dimension distribution of simple Yetter-Drinfeld modules over the Borel part.
    YdDist(YdDistArgs),
    /// Skew-primitive space P_{g,h} of the full algebra.
    Skew(SkewArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// A, B, C, D, F4 or G2.
    #[arg(long)]
    pub family: String,
    #[arg(long = "ell")]
    pub order: u64,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: TableFormat,
    /// n of sl_n for the Drinfeld-double column (type A).
    #[arg(long, default_value_t = 3)]
    pub rank: usize,
    /// Compare the closed-form class count at this odd prime with enumeration.
    #[arg(long)]
    pub prime_check: Option<u64>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Params {
    /// n of sl_n.
    #[arg(long)]
    pub rank: usize,
    #[arg(long = "ell")]
    pub order: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub x: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub y: i64,
}

#[derive(Args, Debug)]
pub struct DimensionArgs {
    #[command(flatten)]
    pub params: Params,
    #[arg(long, default_value = "full")]
    pub scope: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct YdDistArgs {
    #[command(flatten)]
    pub params: Params,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Cache directory; defaults to $UQRS_CACHE or .uqrs-cache.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Diff against the embedded reference list for these parameters.
    #[arg(long)]
    pub compare_paper: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct SkewArgs {
    #[command(flatten)]
    pub params: Params,
    /// Group-like g, e.g. `1`, `w1`, `w1^2*w'2^-1`.
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
    #[arg(long, allow_hyphen_values = true)]
    pub h: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Classify(a) => commands::classify(&a),
        Command::Dimension(a) => commands::dimension(&a),
        Command::YdDist(a) => commands::yd_dist(&a),
        Command::Skew(a) => commands::skew(&a),
    };
    match result {
        Ok(report) => {
            print!("{}", report.text);
            if let Some(msg) = &report.failure {
                eprintln!("error: {msg}");
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
