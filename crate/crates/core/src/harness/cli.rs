use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use super::{evolve, export_dot, test_checkpoint, EvolveOptions};
use crate::envs::Task;
use crate::error::Result;
use crate::evolution::NetMode;

#[derive(Debug, Parser)]
#[command(
    name = "dynevo",
    version,
    about = "Evolve recurrent networks with a dynamic topology on classic-control tasks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run (or resume) an evolution and write a run directory.
    Evolve(EvolveArgs),
    /// Score a checkpoint's elite on the ten held-out seeds.
    Test(TestArgs),
    /// Render a genome or checkpoint agent as Graphviz DOT.
    ExportDot(ExportDotArgs),
}

fn parse_task(s: &str) -> std::result::Result<String, String> {
    Task::from_name(s)
        .map(|t| t.name().to_string())
        .map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<String, String> {
    NetMode::from_name(s)
        .map(|m| m.name().to_string())
        .map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Task id, e.g. CartPole-v1.
    #[arg(long, value_parser = parse_task)]
    pub task: Option<String>,
    /// dynamic or static [default: dynamic]
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<String>,
    /// Population size (even) [default: 64, 256 for Pendulum-v1]
    #[arg(long)]
    pub pop: Option<usize>,
    /// Generations to reach [default: 300]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub gens: Option<u64>,
    /// Master seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: $DYNEVO_WORKERS or 1]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..1024))]
    pub workers: Option<u64>,
    /// Run directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Checkpoint interval in generations; 0 keeps only the final one.
    #[arg(long)]
    pub checkpoint_every: Option<u64>,
    /// Continue from this checkpoint.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// TOML file with any of the above keys (snake_case); flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Parameter perturbation sigma [default: 0.1]
    #[arg(long)]
    pub perturb_sigma: Option<f64>,
    /// Sigma for parameters created by mutations [default: 1.0]
    #[arg(long)]
    pub init_sigma: Option<f64>,
    /// Record real elapsed seconds in metrics.csv instead of 0.
    #[arg(long)]
    pub wall_clock: bool,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportDotArgs {
    /// Genome file or checkpoint.
    #[arg(long)]
    pub input: PathBuf,
    /// Agent slot when reading a checkpoint [default: elite]
    #[arg(long)]
    pub slot: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

impl EvolveArgs {
    fn into_options(self) -> Result<EvolveOptions> {
        let flags = EvolveOptions {
            task: self.task,
            mode: self.mode,
            pop: self.pop,
            gens: self.gens,
            seed: self.seed,
            workers: self.workers.map(|w| w as usize),
            out: self.out,
            checkpoint_every: self.checkpoint_every,
            resume: self.resume,
            perturb_sigma: self.perturb_sigma,
            init_sigma: self.init_sigma,
            wall_clock: self.wall_clock,
        };
        Ok(match self.config {
            Some(path) => flags.over(EvolveOptions::from_toml_file(&path)?),
            None => flags,
        })
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Evolve(args) => {
            let report = evolve(args.into_options()?)?;
            log::info!(
                "done at generation {}; elite has {} params",
                report.generation,
                report.elite_params.map_or("?".into(), |p| p.to_string())
            );
        }
        Command::Test(args) => {
            let report = test_checkpoint(&args.checkpoint)?;
            print!("{}", report.render());
        }
        Command::ExportDot(args) => export_dot(&args.input, args.slot, &args.out)?,
    }
    Ok(())
}

/// Entry point for the binary: usage errors exit 2, runtime errors exit 1.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
