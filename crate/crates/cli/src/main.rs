mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use braidforge_core::families::FamilyId;
use braidforge_core::tables::TableId;
use clap::{Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl From<braidforge_core::Error> for CliError {
    fn from(e: braidforge_core::Error) -> Self {
        use braidforge_core::Error as E;
        match e {
            E::Capacity { .. } | E::Numerical(_) => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("bad seed '{s}': {e}"))
}

#[derive(Parser, Debug)]
#[command(
    name = "braidforge",
    version,
    about = "Generalized Yang-Baxter solutions from partition algebras"
)]
pub struct Cli {
    /// Residual tolerance for equation checks.
    #[arg(long, global = true, env = "BRAIDFORGE_TOL", default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, default_value = "0xB41D", value_parser = parse_seed)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Temperley-Lieb deformation parameter.
    #[arg(long = "Q", global = true)]
    pub q: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RepArg {
    Diagram,
    Qubit,
    Tl,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the defining relations on diagrams or in a matrix representation.
    Relations {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = RepArg::Diagram)]
        rep: RepArg,
    },
    /// Rebuild a golden table and check every row.
    Table {
        #[arg(value_parser = |s: &str| s.parse::<TableId>().map_err(|e| e.to_string()))]
        id: TableId,
    },
    /// Numerically solve the general ansatz for a signature.
    Solve {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
    /// Spectral comparison against the GHZ-generating matrix.
    CompareGhz {
        /// Complex unitary points sampled in addition to the table rows.
        #[arg(long, default_value_t = 32)]
        samples: usize,
    },
    /// Apply a gate from a matrix file to a state and classify the result.
    Classify {
        matrix: PathBuf,
        /// Bit string such as `000`, or a path to a state JSON file.
        state: String,
    },
    /// List families, or build and check one point of a family.
    Family {
        #[arg(value_parser = |s: &str| s.parse::<FamilyId>().map_err(|e| e.to_string()))]
        id: Option<FamilyId>,
        /// Free parameter as `name=re` or `name=re,im`; repeatable.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Comma-separated angles in radians for the unitary parameterization.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            conflicts_with = "params"
        )]
        angles: Option<Vec<f64>>,
        /// Enumerate and check every real unitary point.
        #[arg(long, conflicts_with_all = ["params", "angles"])]
        real_unitary: bool,
        /// Also write the built matrix as JSON.
        #[arg(long, value_name = "PATH")]
        write_matrix: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Relations { .. } => "relations",
            Command::Table { .. } => "table",
            Command::Solve { .. } => "solve",
            Command::CompareGhz { .. } => "compare-ghz",
            Command::Classify { .. } => "classify",
            Command::Family { .. } => "family",
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(CliError::Usage(format!(
            "tolerance must be positive, got {}",
            cli.tol
        )));
    }
    let outcome = commands::dispatch(cli)?;
    let text = output::render(&outcome, cli.command.name(), cli.seed, cli.format)
        .map_err(CliError::Failed)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("braidforge: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Failed(_) => 1,
            })
        }
    }
}
