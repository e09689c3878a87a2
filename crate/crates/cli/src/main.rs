//! `nashgap` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 solver failure,
//! 3 a fixture's expected-value check failed.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "nashgap", version, about = "Nash gaps, best responses and imitation-error experiments for tabular Markov games")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a counterexample fixture and compare computed against expected values.
    Fixture(FixtureArgs),
    /// Nash gap of a product policy.
    NashGap(GamePolicyArgs),
    /// Best response of one player against the others' policies.
    BestResponse(BestResponseArgs),
    /// Entropy-regularised equilibrium of a two-player zero-sum game.
    SolveZs(SolveZsArgs),
    /// Recover equilibrium supports of a bimatrix game from the lower-bound oracle.
    SupportRecover(SupportRecoverArgs),
    /// Grid evaluation of the occupancy-error Nash-gap lower bound for a 2x2 game.
    MRho(MRhoArgs),
    /// Run a perturbation experiment described by a TOML config.
    Experiment(ExperimentArgs),
    /// List registered fixtures, response rules and perturbations.
    List,
}

#[derive(Args, Debug)]
struct FixtureArgs {
    /// Fixture name (see `nashgap list`).
    name: String,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    chain_pairs: Option<usize>,
    /// Temperature for fixtures with a regularised expert.
    #[arg(long)]
    tau: Option<f64>,
    /// Write the game to this JSON file.
    #[arg(long)]
    export: Option<std::path::PathBuf>,
    /// Write the expert policy to this JSON file.
    #[arg(long)]
    export_expert: Option<std::path::PathBuf>,
    /// Write the learner policy to this JSON file.
    #[arg(long)]
    export_learner: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct GamePolicyArgs {
    #[arg(long)]
    game: std::path::PathBuf,
    #[arg(long)]
    policy: std::path::PathBuf,
}

#[derive(Args, Debug)]
struct BestResponseArgs {
    #[command(flatten)]
    inputs: GamePolicyArgs,
    /// Responding player, counted from 1.
    #[arg(long)]
    player: usize,
}

#[derive(Args, Debug)]
struct SolveZsArgs {
    #[arg(long)]
    game: std::path::PathBuf,
    #[arg(long)]
    tau: f64,
    /// Policy output file; stdout when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct SupportRecoverArgs {
    #[arg(long)]
    bimatrix: std::path::PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.005)]
    grid_step: f64,
}

#[derive(Args, Debug)]
struct MRhoArgs {
    #[arg(long)]
    bimatrix: std::path::PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    grid_step: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExperimentName {
    BoundValidation,
    TemperatureSweep,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    kind: ExperimentName,
    #[arg(long)]
    config: std::path::PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .target(env_logger::Target::Stderr)
        .init();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
