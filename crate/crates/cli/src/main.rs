//! `liqscreen`: tables, figure data, extension runs and the oracle suite.
//!
//! Exit codes: 0 success, 1 failed check or runtime error, 2 usage or
//! configuration error.

// guards like `!(x > 0.0)` are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod extension;
mod figures;
mod output;
mod tables;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use liqscreen_core::portfolio::{centralities, solve_cutoffs};

use crate::config::Config;
pub use crate::error::CliError;
use crate::output::Table;

#[derive(Parser)]
#[command(name = "liqscreen", version, about = "Advance/contingent contract solver")]
struct Cli {
    /// JSON economy configuration; the benchmark when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Overrides the default grid density of the command.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Overrides the grid-agreement tolerance of `verify`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    Table { name: TableName },
    Figure { name: FigureName },
    Extension { name: ExtensionName },
    /// Cutoffs, values and contagion centrality of the configured portfolio.
    Network,
    /// Runs the oracle suite and writes verify.json.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableName {
    Sensitivity,
    Menu,
    Contagion,
    Sweep,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FigureName {
    Payoff,
    Advance,
    Dominance,
    ContagionRegion,
    Hump,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtensionName {
    Dynamic,
    Bids,
    Monitoring,
    Renegotiation,
}

pub struct Run {
    pub cfg: Config,
    pub out: PathBuf,
    pub seed: u64,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
}

fn network(run: &Run) -> Result<PathBuf, CliError> {
    let port = run.cfg.portfolio()?;
    let sol = solve_cutoffs(&port)?;
    let central = centralities(&port, &sol)?;
    let mut table = Table::new(&["node", "cutoff", "value", "centrality"]);
    for (i, c) in central.iter().enumerate() {
        table.push(vec![
            i.into(),
            sol.cutoffs[i].into(),
            sol.per_relationship_value[i].into(),
            (*c).into(),
        ]);
    }
    table.write(&run.out, "network.csv")
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    if let Some(g) = cli.grid {
        if g < 2 {
            return Err(CliError::Config("--grid must be at least 2".into()));
        }
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(CliError::Config("--tol must be positive".into()));
        }
    }
    let run = Run {
        cfg: Config::load(cli.config.as_deref())?,
        out: cli.out,
        seed: cli.seed,
        grid: cli.grid,
        tol: cli.tol,
    };
    let one = |p: Result<PathBuf, CliError>| p.map(|p| vec![p]);
    match cli.command {
        Command::Table { name } => one(match name {
            TableName::Sensitivity => tables::sensitivity(&run),
            TableName::Menu => tables::menu(&run),
            TableName::Contagion => tables::contagion(&run),
            TableName::Sweep => tables::sweep(&run),
        }),
        Command::Figure { name } => match name {
            FigureName::Payoff => one(figures::payoff(&run)),
            FigureName::Advance => one(figures::advance(&run)),
            FigureName::Dominance => one(figures::dominance(&run)),
            FigureName::ContagionRegion => figures::contagion_region(&run),
            FigureName::Hump => one(figures::hump(&run)),
        },
        Command::Extension { name } => one(match name {
            ExtensionName::Dynamic => extension::dynamic(&run),
            ExtensionName::Bids => extension::bids(&run),
            ExtensionName::Monitoring => extension::monitoring(&run),
            ExtensionName::Renegotiation => extension::renegotiation(&run),
        }),
        Command::Network => one(network(&run)),
        Command::Verify => one(verify::verify(&run)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
