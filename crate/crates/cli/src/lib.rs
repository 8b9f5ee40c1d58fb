//! Batch front end for `reebcalc`: run named checks over contact fixtures and
//! write JSON reports with exit codes 0 (pass), 1 (fail), 2 (inconclusive)
//! and 3 (input error).

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{report_all, resolve_fixture, run};
pub use config::{Command, RunConfig};
pub use error::{exit, CliError};
pub use report::{exit_code, Outcome, Report, Status};
