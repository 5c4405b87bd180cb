//! Command-line front end for the waveguide reliability toolkit.
//!
//! Exit codes: 0 on success, 1 on configuration or usage errors, 2 when the
//! validation suite reports a failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use config::{Axis, ExperimentConfig, SweepRange};

#[derive(Parser)]
#[command(name = "swan", version, about = "Reliability sweeps for segmented-waveguide pinching-antenna systems")]
struct Cli {
    /// Print the built-in default configuration and exit.
    #[arg(long)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Probability of non-zero rate across a sweep, closed form and Monte Carlo.
    PnrSweep(RunArgs),
    /// Relative PNR gains of both protocols with their asymptotes.
    GainSweep(RunArgs),
    /// Outage probability across a sweep, including enumeration and bounds.
    OpSweep(RunArgs),
    /// Cross-validate the closed forms against independent oracles.
    Validate(RunArgs),
    /// Per-segment placement table for the configured layout.
    PlacementDump(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (key = value lines); defaults apply otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the Monte Carlo trial count.
    #[arg(long)]
    trials: Option<u64>,
    /// Override the sweep axis: M, Dx, or eps0.
    #[arg(long, value_parser = Axis::parse)]
    axis: Option<Axis>,
    /// Override the sweep range as start:stop:step.
    #[arg(long, value_parser = SweepRange::parse)]
    range: Option<SweepRange>,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script next to the CSV (sweep commands only;
    /// requires --out).
    #[arg(long)]
    gnuplot: Option<PathBuf>,
}

impl RunArgs {
    fn load_config(&self) -> Result<ExperimentConfig, String> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(axis) = self.axis {
            cfg.axis = axis;
        }
        if let Some(range) = self.range {
            cfg.range = range;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn emit(&self, text: &str) -> Result<(), String> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_gnuplot(&self, text: &str) -> Result<(), String> {
        let Some(script_path) = &self.gnuplot else {
            return Ok(());
        };
        let Some(csv_path) = &self.out else {
            return Err("--gnuplot needs --out so the script can reference the CSV".into());
        };
        let header: Vec<&str> = text
            .lines()
            .find(|l| !l.starts_with('#'))
            .map(|l| l.split(',').collect())
            .unwrap_or_default();
        let script = commands::gnuplot_script(&csv_path.display().to_string(), &header);
        std::fs::write(script_path, script)
            .map_err(|e| format!("cannot write {}: {e}", script_path.display()))
    }
}

fn run(command: &Command) -> Result<ExitCode, String> {
    match command {
        Command::PnrSweep(args) => {
            let cfg = args.load_config()?;
            let out = commands::pnr_sweep(&cfg)?;
            args.emit(&out)?;
            args.emit_gnuplot(&out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::GainSweep(args) => {
            let cfg = args.load_config()?;
            let out = commands::gain_sweep(&cfg)?;
            args.emit(&out)?;
            args.emit_gnuplot(&out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::OpSweep(args) => {
            let cfg = args.load_config()?;
            let out = commands::op_sweep(&cfg)?;
            args.emit(&out)?;
            args.emit_gnuplot(&out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(args) => {
            let cfg = args.load_config()?;
            let (report, pass) = commands::validate(&cfg)?;
            args.emit(&report)?;
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::PlacementDump(args) => {
            let cfg = args.load_config()?;
            let out = commands::placement_dump(&cfg)?;
            args.emit(&out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if cli.print_defaults {
        print!("{}", ExperimentConfig::default().to_text());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: missing subcommand; try --help");
        return ExitCode::from(1);
    };
    match run(&command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
