//! Run report written as `summary.json`.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything that depends on the wall clock lives here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timestamp {
    pub started_unix_s: f64,
    pub elapsed_s: f64,
}

impl Timestamp {
    pub fn now() -> Self {
        let started = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        Self {
            started_unix_s: started,
            elapsed_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
}

impl From<&CliError> for Failure {
    fn from(e: &CliError) -> Self {
        Self {
            kind: e.kind(),
            exit_code: e.exit_code(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    pub seed: u64,
    pub timestamp: Timestamp,
    pub config: RunConfig,
    pub results: Value,
    pub units: BTreeMap<&'static str, &'static str>,
    /// Files written next to this report, in write order.
    pub files: Vec<String>,
}

/// Scaling notes attached to every report.
pub fn unit_notes() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("j1, j2", "scaled flux densities J_k (independent of D_k)"),
        ("jbar1, jbar2", "physical flux densities Jbar_k = D_k J_k"),
        ("x", "axial position on [0, 1]"),
        ("xi", "stretched layer variable x/mu (left) or (1 - x)/mu (right)"),
        ("phi", "electric potential, phi(0) = phi0 and phi(1) = 0"),
        ("c1, c2", "concentrations of the cation and the anion"),
        ("mu", "singular parameter, mu^2 = 1/lambda"),
        ("rho0", "geometry factor, integral of 1/h over [0, 1]"),
        ("t", "time in the scaled transient model"),
        ("L", "entropy functional sum_k (1/D_k) int h (c_k - c_k0) ln(c_k/c_k0) dx"),
    ])
}

impl RunReport {
    /// Pretty JSON with the `timestamp` field replaced by `null`; identical
    /// runs give identical strings.
    pub fn without_timestamp(&self) -> serde_json::Result<String> {
        let mut v = serde_json::to_value(self)?;
        v["timestamp"] = Value::Null;
        serde_json::to_string_pretty(&v)
    }
}
