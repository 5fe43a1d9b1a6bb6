//! Config-driven experiment harness: scenario pipelines, run directories and
//! parameter sweeps.

mod config;
mod run;
mod scenarios;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{
    CheckParams, ConfigError, ExperimentConfig, ProblemParams, Scenario, Schedule, SweepAxis, MAX_SWEEP_POINTS,
};
pub use run::{
    combined_exit_code, expand_sweep, run_experiment, run_points, run_sweep, summary_csv, RunRecord, SweepPoint,
    SweepRecord, DIAGNOSTICS_FILE, ECHO_FILE, FIELD_FILE, REPORT_FILE, SUMMARY_FILE,
};
pub use scenarios::{
    continuity_gap, execute, random_admissible, test_family, Outcome, CONTINUITY_OFFSET, CONTINUITY_TOL,
    ENTROPY_LEVELS, ENTROPY_ZERO_TOL,
};

use crate::exponents::{classify_regime, ParameterSet, RegimeReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;
pub const EXIT_SOLVER_FAILURE: i32 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

impl HarnessError {
    /// Process exit code; unusable output locations count as configuration errors.
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG_ERROR
    }
}

/// Regime report for `N=3,p=2,theta=0.5,...` style parameters (comma or
/// whitespace separated). `gamma1` defaults to 0 and `m` to 1.
pub fn atlas(params: &str) -> Result<RegimeReport, ConfigError> {
    let (mut dim, mut p, mut theta, mut gamma2) = (None, None, None, None);
    let (mut gamma1, mut m) = (0.0, 1.0);
    for item in params.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line: 0, message: format!("expected key=value, got `{item}`") })?;
        let field = |message: String| ConfigError::Field { line: 0, key: k.to_string(), message };
        let x: f64 = v.parse().map_err(|_| field(format!("expected a number, got `{v}`")))?;
        match k {
            "N" | "dim" => dim = Some(x),
            "p" => p = Some(x),
            "theta" => theta = Some(x),
            "gamma1" => gamma1 = x,
            "gamma2" => gamma2 = Some(x),
            "m" => m = x,
            _ => return Err(field("unknown parameter (use N, p, theta, gamma1, gamma2, m)".into())),
        }
    }
    let need = |v: Option<f64>, k: &str| {
        v.ok_or_else(|| ConfigError::Field { line: 0, key: k.into(), message: "required".into() })
    };
    let ps = ParameterSet::new(need(dim, "N")?, need(p, "p")?, need(theta, "theta")?, gamma1, need(gamma2, "gamma2")?, m)
        .map_err(|e| ConfigError::Field { line: 0, key: "params".into(), message: e.to_string() })?;
    Ok(classify_regime(&ps))
}
