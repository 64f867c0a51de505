//! Library surface of the command-line runner: configuration loading,
//! subcommand execution, and artifact emission. The binary in `main.rs` is a
//! thin argument-parsing shell over this crate.

pub mod commands;
pub mod config;
pub mod outputs;

/// Error taxonomy mirrored by the process exit code: configuration problems
/// exit 2, numerical failures (aborted runs, unusable quadratures, IO) exit
/// 3, and verification verdicts that do not hold exit 4.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Verification(_) => "verification",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

pub fn exit_code_for_failure_kind(kind: &str) -> u8 {
    match kind {
        "config" => 2,
        "verification" => 4,
        _ => 3,
    }
}
