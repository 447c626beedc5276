//! Command layer of the `mmmm` tool: flag handling, experiment tables,
//! method comparison and output rendering on top of `mmmm-core`.

pub mod args;
pub mod compare;
pub mod experiment;
pub mod failure;
pub mod format;
pub mod transient;

use mmmm_core::SystemParams;

use crate::args::{Cli, Command, ModelArgs};
use crate::failure::{CmdResult, Failure};

/// Version tag carried by every JSON document.
pub const SCHEMA: &str = "mmmm/1";

/// Largest accepted `m` unless `MMMM_MAX_M` says otherwise.
pub const DEFAULT_MAX_M: usize = 1000;

/// Reads the server-count cap from the environment.
pub fn max_servers() -> CmdResult<usize> {
    match std::env::var("MMMM_MAX_M") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Failure::usage(format!(
                "MMMM_MAX_M = {raw:?} is not a non-negative integer"
            ))
        }),
        Err(_) => Ok(DEFAULT_MAX_M),
    }
}

impl ModelArgs {
    /// Validated parameters; enforces the server-count cap.
    pub fn params(&self) -> CmdResult<SystemParams> {
        let cap = max_servers()?;
        if self.m > cap {
            return Err(Failure::usage(format!(
                "m = {} exceeds the cap of {cap} (set MMMM_MAX_M to raise it)",
                self.m
            )));
        }
        Ok(SystemParams::with_service_rate(
            self.lambda0,
            self.mu,
            self.m,
        )?)
    }
}

/// Runs a parsed command line and returns the text to emit.
pub fn run(cli: &Cli) -> CmdResult<String> {
    match &cli.command {
        Command::Transient(a) => transient::cmd_transient(a),
        Command::Stationary(a) => transient::cmd_stationary(a),
        Command::Experiment(a) => experiment::cmd_experiment(a),
        Command::Compare(a) => compare::cmd_compare(a),
    }
}
