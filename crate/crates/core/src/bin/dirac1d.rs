//! Command-line front end: `dirac1d <command> [--config FILE] [--out DIR] ...`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use dirac1d::config::{parse_config, RunConfig};
use dirac1d::io::{run_command, Command, RunOptions};
use dirac1d::EnergySign;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    SimulateCi,
    SimulateRsi,
    Compare,
    Validate,
    EmitFigures,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::SimulateCi => Command::SimulateCi,
            Cmd::SimulateRsi => Command::SimulateRsi,
            Cmd::Compare => Command::Compare,
            Cmd::Validate => Command::Validate,
            Cmd::EmitFigures => Command::EmitFigures,
        }
    }
}

#[derive(Debug, Parser)]
#[command(version, about = "Free Dirac particle in 1+1D: conventional and time-symmetric readings")]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Scenario file; the default experiment when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the number of grid points.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Energy channel of the time-symmetric pipeline.
    #[arg(long, default_value = "+", value_parser = parse_channel, allow_hyphen_values = true)]
    channel: EnergySign,
    /// Recorded in the manifest; no command is stochastic.
    #[arg(long)]
    seed: Option<u64>,
    /// Treat warnings as invariant breaches.
    #[arg(long)]
    strict: bool,
}

fn parse_channel(s: &str) -> Result<EnergySign, String> {
    match s {
        "+" | "plus" => Ok(EnergySign::Positive),
        "-" | "minus" => Ok(EnergySign::Negative),
        other => Err(format!("`{other}` is not + or -")),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(path) => parse_config(path),
        None => Ok(RunConfig::default()),
    }
    .and_then(|c| match cli.grid_n {
        Some(n) => c.with_grid_n(n),
        None => Ok(c),
    });
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let options = RunOptions { channel: cli.channel, strict: cli.strict, seed: cli.seed };
    match run_command(cli.command.into(), &config, &cli.out, &options) {
        Ok(manifest) => {
            for w in &manifest.warnings {
                log::warn!("{w}");
            }
            println!("{} outputs written to {}", manifest.outputs.len(), cli.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
