//! Command-line entry point: parse arguments, load the configuration, run
//! the requested subcommand, and map the outcome onto the exit code
//! contract (0 ok, 2 config, 3 numerical, 4 verification).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conewave_cli::config::load_config;
use conewave_cli::{commands, exit_code_for_failure_kind, CliError};

#[derive(Parser)]
#[command(
    name = "conewave",
    version,
    about = "Exterior weighted-energy laboratory for the reduced gauge/metric wave system"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's `out`, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomized identity suites (default: the config's
    /// `seed`, then 0).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve the configured system and emit the energy/residual series.
    Run(Common),
    /// Algebraic identity gates: stress split, commutators, weight bands.
    CheckIdentities(Common),
    /// Weighted Hardy-inequality sweep with a refinement partner.
    Hardy(Common),
    /// Exterior energy-balance residual with one refinement step.
    Conservation(Common),
    /// Cone-band pointwise decay rates for all observables.
    DecayReport(Common),
    /// Integral-inequality closure verdict on the top-level energy.
    Gronwall(Common),
    /// Energy-boundedness verdict against the configured target factor.
    Bootstrap(Common),
}

fn execute(cmd: &Cmd) -> Result<commands::CommandOutcome, CliError> {
    let (name, common): (_, &Common) = match cmd {
        Cmd::Run(c) => ("run", c),
        Cmd::CheckIdentities(c) => ("check-identities", c),
        Cmd::Hardy(c) => ("hardy", c),
        Cmd::Conservation(c) => ("conservation", c),
        Cmd::DecayReport(c) => ("decay-report", c),
        Cmd::Gronwall(c) => ("gronwall", c),
        Cmd::Bootstrap(c) => ("bootstrap", c),
    };
    let cfg = load_config(&common.config)?;
    let seed = common.seed.or(cfg.seed).unwrap_or(0);
    let out = common
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let outcome = match name {
        "run" => commands::run(&cfg, &out, seed),
        "check-identities" => commands::check_identities(&cfg, &out, seed),
        "hardy" => commands::hardy(&cfg, &out, seed),
        "conservation" => commands::conservation(&cfg, &out, seed),
        "decay-report" => commands::decay_report(&cfg, &out, seed),
        "gronwall" => commands::gronwall(&cfg, &out, seed),
        _ => commands::bootstrap(&cfg, &out, seed),
    }?;
    println!("{name}: {} ({})", outcome.status, out.display());
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.cmd) {
        Ok(outcome) => match outcome.failure {
            None => ExitCode::SUCCESS,
            Some(failure) => {
                eprintln!(
                    "{}",
                    serde_json::json!({ "kind": failure.kind, "message": failure.message })
                );
                ExitCode::from(exit_code_for_failure_kind(failure.kind))
            }
        },
        Err(err) => {
            eprintln!(
                "{}",
                serde_json::json!({ "kind": err.kind(), "message": err.to_string() })
            );
            ExitCode::from(err.exit_code())
        }
    }
}
