//! Command-line front end: JSON configs in, CSV tables and a JSON report out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod validate;

use std::path::PathBuf;
use std::time::Instant;

pub use commands::{dispatch, Command};
pub use config::{parse_config, RunConfig};
pub use error::{CliError, Result};
pub use report::RunReport;

use report::{Failure, Status, Timestamp};

/// Runs one command and writes its outputs into `out_dir`. Returns the
/// report and the process exit status.
pub fn execute(command: Command, cfg: &RunConfig, out_dir: &PathBuf) -> (RunReport, i32) {
    let mut timestamp = Timestamp::now();
    let start = Instant::now();
    let outcome = dispatch(command, cfg);
    timestamp.elapsed_s = start.elapsed().as_secs_f64();
    let mut report = RunReport {
        command: command.name().into(),
        version: report::VERSION,
        status: Status::Ok,
        failure: None,
        seed: cfg.seed,
        timestamp,
        config: cfg.clone(),
        results: serde_json::Value::Null,
        units: report::unit_notes(),
        files: Vec::new(),
    };
    let (tables, mut code) = match outcome {
        Ok(out) => {
            report.results = out.results;
            let code = match out.failure {
                Some((failed, total)) => {
                    let err = CliError::ChecksFailed { failed, total };
                    report.status = Status::Failed;
                    report.failure = Some(Failure::from(&err));
                    err.exit_code()
                }
                None => 0,
            };
            (out.tables, code)
        }
        Err(e) => {
            report.status = Status::Failed;
            report.failure = Some(Failure::from(&e));
            (Vec::new(), e.exit_code())
        }
    };
    if let Err(e) = output::write_outputs(&mut report, &tables, out_dir) {
        eprintln!("error: {e}");
        code = e.exit_code();
    }
    (report, code)
}
