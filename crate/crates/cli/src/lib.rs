//! Experiment runner for nonlinear Young integrals: specs, reports, suites and
//! the subcommand implementations behind the `nlyoung` binary.

use std::fmt;

pub mod commands;
pub mod output;
pub mod spec;
pub mod suite;

pub use output::Output;
pub use spec::{run, Check, ExperimentSpec, RunReport};
pub use suite::{suite, SuiteReport};

/// Why a command did not finish cleanly. Each kind has its own exit code.
#[derive(Debug)]
pub enum Failure {
    /// bad input or an inadmissible configuration (exit 2)
    Invalid(String),
    /// anything else that stopped the run (exit 1)
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid input: {m}"),
            Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<nlyoung::Error> for Failure {
    fn from(e: nlyoung::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

/// Outcome of a command that ran to the end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Status {
    pub converged: bool,
    pub passed: bool,
}

impl Status {
    pub const OK: Status = Status { converged: true, passed: true };

    /// 3 on a nonconvergence flag, 1 on a failed tolerance, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if !self.converged {
            3
        } else if !self.passed {
            1
        } else {
            0
        }
    }
}

pub type CmdResult = Result<Status, Failure>;
