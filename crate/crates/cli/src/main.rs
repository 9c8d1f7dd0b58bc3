use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use orbits_cli::commands::{execute, Command, Options};
use orbits_cli::config::RunConfig;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Guiding-centre circle of the centre of mass
    Cm,
    /// Turning points, allowed intervals and confinement conditions
    Turning,
    /// Integrate the relative motion (CSV, optional SVG)
    Simulate,
    /// Apsidal angle and commensurability evidence
    Period,
    /// Classification over a parameter grid (CSV)
    Sweep,
}

/// Orbits of two identical charges in a uniform magnetic field.
#[derive(Debug, Parser)]
#[command(name = "orbits", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Write CSV output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot of the orbit (simulate)
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Let unbounded runs continue past the escape radius
    #[arg(long)]
    allow_escape: bool,
    /// Index of the allowed radial interval to use
    #[arg(long)]
    interval: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cmd = match args.command {
        Cmd::Cm => Command::Cm,
        Cmd::Turning => Command::Turning,
        Cmd::Simulate => Command::Simulate,
        Cmd::Period => Command::Period,
        Cmd::Sweep => Command::Sweep,
    };
    let opts = Options {
        out: args.out,
        svg: args.svg,
        allow_escape: args.allow_escape,
        interval: args.interval,
    };
    let result = RunConfig::from_path(&args.config).and_then(|cfg| execute(cmd, &cfg, &opts));
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
