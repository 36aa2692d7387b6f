use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use unionpower_core::{parse_rational, Rational};

mod commands;
mod table;

use commands::CliError;

/// Exact (α, β)-power indices on graphs with a priori unions.
///
/// Exit codes: 0 success, 1 invalid input or usage, 2 a size bound was
/// exceeded, 3 the Shapley routes disagree.
#[derive(Debug, Parser)]
#[command(name = "unionpower", version)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Closed,
    Potential,
    Dividends,
    Bruteforce,
    All,
}

/// `--alpha` and `--beta` together; values stay symbolic without them.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, value_parser = rational, requires = "beta", allow_hyphen_values = true)]
    pub alpha: Option<Rational>,
    #[arg(long, value_parser = rational, requires = "alpha", allow_hyphen_values = true)]
    pub beta: Option<Rational>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a graph file and summarise it.
    Validate { input: PathBuf },
    /// The power index of every node.
    Index {
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Worths of the characteristic function.
    Game {
        input: PathBuf,
        /// Comma-separated 1-based ids; defaults to each union and the grand coalition.
        #[arg(long)]
        coalition: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Nonzero Harsanyi dividends.
    Dividends {
        input: PathBuf,
        #[arg(long, default_value_t = unionpower_core::game::DEFAULT_MAX_UNION_SIZE)]
        max_union_size: usize,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Shapley value of the game by one route or all four.
    Shapley {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Dense ranking at one parameter point.
    Rank {
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Ranks at α = 1, β = rho.
        #[arg(long, value_parser = rational, conflicts_with_all = ["alpha", "beta"])]
        rho: Option<Rational>,
    },
    /// Rankings over β/α ∈ [0, rho-max].
    Sweep {
        input: PathBuf,
        #[arg(long, value_parser = rational, default_value = "1")]
        rho_max: Rational,
    },
    /// Power index and violating fixtures against every axiom.
    Axioms {
        /// Largest n of the exhaustive two-union universe.
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        /// Extra graph files added to the universe.
        #[arg(long = "graph")]
        graphs: Vec<PathBuf>,
        #[arg(long, default_value_t = unionpower_core::axioms::DEFAULT_SEED)]
        seed: u64,
        /// Writes each witness as a graph file into this directory.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Writes a built-in graph as JSON.
    Demo {
        name: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn rational(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(&cli.command, cli.format) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            ExitCode::from(outcome.code)
        }
        Err(err) => {
            eprintln!("unionpower: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Game(e) if e.is_bound_violation() => 2,
            CliError::Universe(unionpower_core::axioms::AxiomError::UniverseTooLarge { .. }) => 2,
            _ => 1,
        }
    }
}
