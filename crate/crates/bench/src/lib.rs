//! Experiment harness: identity verification, specialization cross-checks,
//! geometric-versus-transformed equivalence runs and convergence studies.

pub mod backend;
pub mod config;
pub mod convergence;
pub mod equiv;
pub mod error;
pub mod profiles;
pub mod report;
pub mod run;
pub mod verify;

use std::path::PathBuf;

pub use error::{BenchError, Result};

use config::{Command, ExperimentConfig};
use report::Report;

/// Runs `command`, writes its artifacts under `out` and returns the report.
pub fn execute(command: Command, config: &ExperimentConfig, out: &std::path::Path) -> Result<(Report, PathBuf)> {
    std::fs::create_dir_all(out).map_err(|e| BenchError::io(out, e))?;
    match command {
        Command::Verify => {
            let r = verify::cmd_verify(config)?;
            let path = r.write(out)?;
            Ok((r, path))
        }
        Command::Equiv => {
            let r = equiv::cmd_equiv(config)?;
            let path = r.write(out)?;
            Ok((r, path))
        }
        Command::Run => {
            let o = run::cmd_run(config)?;
            let path = o.write(out)?;
            Ok((o.report, path))
        }
        Command::Convergence => {
            let r = convergence::cmd_convergence(config)?;
            let path = r.write(out)?;
            Ok((r, path))
        }
    }
}
