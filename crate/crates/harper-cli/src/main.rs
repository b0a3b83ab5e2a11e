//! `harper`: simulate and design modulated waveguide arrays from one
//! configuration file per run.

mod commands;
mod config;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::RunContext;
use config::RunConfig;
use harper_core::evolve::Side;

#[derive(Parser)]
#[command(
    name = "harper",
    version,
    about = "Simulation and design of modulated waveguide arrays",
    after_help = "Exit codes: 0 success, 2 config error, 3 numeric/contract failure, \
                  4 optimization failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band structure along the device, with boundary tracks flagged
    Bands(RunArgs),
    /// Inject a boundary supermode and write the output distribution
    Propagate(PropagateArgs),
    /// Two-photon interference curve and visibility report
    Hom(RunArgs),
    /// Optimize the center coupling for the target splitting ratio
    Optimize(RunArgs),
    /// Export the physical waveguide layout and metadata
    Layout(RunArgs),
    /// Overlap fidelity between two distribution files
    Fidelity(FidelityArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: current directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the counting seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Override the integrator step count
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct PropagateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Which boundary supermode to inject
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    side: SideArg,
}

#[derive(Args)]
struct FidelityArgs {
    /// First distribution file
    file_a: PathBuf,
    /// Second distribution file
    file_b: PathBuf,
    /// Output directory (default: current directory)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

fn context(args: &RunArgs) -> Result<RunContext, error::CliError> {
    Ok(RunContext {
        config: RunConfig::load(&args.config)?,
        out_dir: args.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        seed_override: args.seed,
        steps_override: args.steps,
    })
}

fn run(cli: Cli) -> Result<(), error::CliError> {
    match cli.command {
        Command::Bands(args) => commands::cmd_bands(&context(&args)?),
        Command::Propagate(args) => {
            commands::cmd_propagate(&context(&args.run)?, args.side.into())
        }
        Command::Hom(args) => commands::cmd_hom(&context(&args)?),
        Command::Optimize(args) => commands::cmd_optimize(&context(&args)?),
        Command::Layout(args) => commands::cmd_layout(&context(&args)?),
        Command::Fidelity(args) => {
            let out = args.out.unwrap_or_else(|| PathBuf::from("."));
            commands::cmd_fidelity(&out, &args.file_a, &args.file_b)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
