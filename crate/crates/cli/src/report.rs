//! Report envelope, error classification and exit codes.

use std::time::{SystemTime, UNIX_EPOCH};

use chaindisc::{Constants, Error};
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SIZE: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed files, invalid parameters.
    Config(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Core(Error::Parse(_)) => "parse",
            CliError::Core(Error::Invalid(_)) => "invalid",
            CliError::Core(Error::Size { .. }) => "size",
            CliError::Core(Error::Bounds { .. }) => "bounds",
            CliError::Core(Error::LengthMismatch { .. }) => "length-mismatch",
            CliError::Core(Error::Domain(_)) => "domain",
            CliError::Core(Error::Budget(_)) => "budget",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Core(Error::Parse(_) | Error::Invalid(_)) => {
                EXIT_CONFIG
            }
            CliError::Core(Error::Budget(_)) => EXIT_BUDGET,
            CliError::Core(_) => EXIT_SIZE,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.message(),
                "exit_code": self.exit_code(),
            }
        })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Canonical JSON report. Field order is fixed by declaration order and
/// `timestamp` is the only field that varies between identical runs.
#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub constants: Constants,
    /// True when every reported quantity is exact rather than a bound or
    /// estimate; absent when the notion does not apply.
    pub exact: Option<bool>,
    pub result: Value,
    pub timestamp: String,
}

impl Report {
    pub fn new(
        command: &str,
        config: Value,
        seed: u64,
        constants: Constants,
        exact: Option<bool>,
        result: Value,
    ) -> Self {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Report {
            schema_version: SCHEMA_VERSION,
            tool: "chaindisc",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            seed,
            constants,
            exact,
            result,
            timestamp: format!("unix:{secs}"),
        }
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports contain only finite data")
}
