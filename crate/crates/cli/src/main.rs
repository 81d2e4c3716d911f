//! `hybrid-chsh`: CHSH sweeps, threshold optimization and loss boundaries for
//! amplified two-photon N00N states measured by photon counting and homodyning.

mod commands;
mod config;
mod error;
mod records;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{CommonArgs, Format, GainModeArg, LossArgs};

#[derive(Debug, Parser)]
#[command(name = "hybrid-chsh", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Threshold-optimized CHSH value over a gain grid.
    Sweep(SweepArgs),
    /// Minimal counting efficiency along a transmittance grid.
    Boundary(BoundaryArgs),
    /// Tolerable detector efficiency and transmittance.
    Table1(Table1Args),
    /// CHSH value and correlators at one setting, as JSON.
    Point(PointArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    loss: LossArgs,
    #[arg(long)]
    zeta_lo: Option<f64>,
    #[arg(long)]
    zeta_hi: Option<f64>,
    #[arg(long)]
    zeta_step: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated transmittances in (0, 1].
    #[arg(long, value_delimiter = ',')]
    t_grid: Option<Vec<f64>>,
    /// Comma-separated homodyne efficiencies, one curve each.
    #[arg(long, value_delimiter = ',')]
    eta_x: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    gain_mode: Option<GainModeArg>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    loss: LossArgs,
    #[arg(long, default_value_t = 0.0)]
    zeta: f64,
    #[arg(long, default_value_t = 0)]
    n0: usize,
    #[arg(long)]
    x0: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(a) => commands::sweep(a),
        Command::Boundary(a) => commands::boundary(a),
        Command::Table1(a) => commands::table1(a),
        Command::Point(a) => commands::point(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hybrid-chsh: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
