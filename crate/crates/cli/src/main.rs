//! `sdgs-rrf`: build the composite index and its reports from files.
//!
//! Exit status: 0 on success, 1 on invalid data or failed checks, 2 on usage
//! errors.

mod commands;
mod emit;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "sdgs-rrf", version)]
#[command(about = "Composite SDG index over recovery-plan common indicators")]
#[command(disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct PanelInput {
    /// Tidy panel CSV with columns indicator,geo,year,value[,imputed]
    #[arg(long, value_name = "CSV")]
    pub panel: PathBuf,
    /// Index configuration (.toml or .json)
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Derive goalposts from a panel or from summary statistics
    Goalposts {
        /// Tidy panel CSV pooled per indicator
        #[arg(long, value_name = "CSV", conflicts_with = "stats", required_unless_present = "stats")]
        panel: Option<PathBuf>,
        /// Summary CSV with columns indicator,n,min,q1,median,q3,max
        #[arg(long, value_name = "CSV")]
        stats: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Impute and normalize a panel onto 0..100
    Normalize {
        #[command(flatten)]
        input: PanelInput,
        /// Goalposts CSV with columns indicator,g1,g2[,g1_trace,g2_trace]
        #[arg(long, value_name = "CSV")]
        goalposts: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Compute the geo x year composite index
    Composite {
        #[command(flatten)]
        input: PanelInput,
        #[arg(long, value_name = "CSV")]
        goalposts: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Also write long-format chart data (plot_data.csv)
        #[arg(long)]
        plot_data: bool,
        /// Replace zero scores with this floor (exploratory)
        #[arg(long, value_name = "SCORE")]
        zero_floor: Option<f64>,
    },
    /// Decompose an index ratio into per-indicator contributions
    Decompose {
        /// Normalized scores CSV as written by `normalize`
        #[arg(long, value_name = "CSV")]
        normalized: PathBuf,
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long)]
        geo: String,
        #[command(flatten)]
        mode: DecomposeMode,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Per-year range and coefficient of variation across geos
    Gap {
        /// Index CSV with columns geo,year,index
        #[arg(long, value_name = "CSV")]
        index: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Coverage, occurrence, goal and finance reports over a mapping catalog
    Report {
        /// Catalog JSON
        #[arg(long, value_name = "JSON")]
        catalog: PathBuf,
        /// Configuration supplying the indicator-to-SDG proxies
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Grouping::Both)]
        group_by: Grouping,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Recompute the published tables from the shipped fixtures and check them
    ReproducePaper {
        #[arg(long, value_name = "DIR", default_value = "data")]
        fixtures: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = true)]
pub struct DecomposeMode {
    /// Temporal mode: base year
    #[arg(long, requires = "to", conflicts_with_all = ["versus", "year"])]
    pub from: Option<i32>,
    /// Temporal mode: comparison year
    #[arg(long, requires = "from")]
    pub to: Option<i32>,
    /// Cross-country mode: base geo
    #[arg(long, requires = "year")]
    pub versus: Option<String>,
    /// Cross-country mode: year compared
    #[arg(long, requires = "versus")]
    pub year: Option<i32>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grouping {
    MissionComponent,
    Administration,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Goalposts {
            panel,
            stats,
            config,
            out,
        } => commands::goalposts(panel.as_deref(), stats.as_deref(), &config, &out),
        Command::Normalize {
            input,
            goalposts,
            out,
        } => commands::normalize(&input, &goalposts, &out),
        Command::Composite {
            input,
            goalposts,
            out,
            plot_data,
            zero_floor,
        } => commands::composite(&input, &goalposts, &out, plot_data, zero_floor),
        Command::Decompose {
            normalized,
            config,
            geo,
            mode,
            out,
        } => commands::decompose(&normalized, &config, &geo, &mode, &out),
        Command::Gap { index, out } => commands::gap(&index, &out),
        Command::Report {
            catalog,
            config,
            group_by,
            out,
        } => commands::report(&catalog, config.as_deref(), group_by, &out),
        Command::ReproducePaper { fixtures, out } => reproduce::run(&fixtures, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
