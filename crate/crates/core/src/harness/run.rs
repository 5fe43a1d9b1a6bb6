use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime};

use rayon::prelude::*;

use crate::regularity::Report;

use super::config::{ConfigError, ExperimentConfig, MAX_SWEEP_POINTS};
use super::scenarios::execute;
use super::{HarnessError, EXIT_CHECK_FAILURE, EXIT_PASS, EXIT_SOLVER_FAILURE};

pub const REPORT_FILE: &str = "report.csv";
pub const FIELD_FILE: &str = "field.txt";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const ECHO_FILE: &str = "config.echo";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Everything one run produced.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub dir: PathBuf,
    pub started: SystemTime,
    pub elapsed: Duration,
    /// Diagnostic `key=value` pairs from the pipeline.
    pub summary: Vec<(String, String)>,
    pub report: Report,
    pub artifacts: Vec<PathBuf>,
    /// Solver error that stopped the pipeline.
    pub failure: Option<String>,
    pub exit_code: i32,
}

impl RunRecord {
    pub fn passed(&self) -> bool {
        self.exit_code == EXIT_PASS
    }

    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

/// Create `parent/<stem>-NNNN` with the first unused index.
fn fresh_dir(parent: &Path, stem: &str) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(parent).map_err(io_err(parent))?;
    for i in 0.. {
        let dir = parent.join(format!("{stem}-{i:04}"));
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(io_err(&dir)(e)),
        }
    }
    unreachable!()
}

fn write(dir: &Path, name: &str, body: &str, artifacts: &mut Vec<PathBuf>) -> Result<(), HarnessError> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(io_err(&path))?;
    artifacts.push(path);
    Ok(())
}

/// Run the pipeline into an existing empty directory.
fn run_in(config: &ExperimentConfig, dir: PathBuf) -> Result<RunRecord, HarnessError> {
    let mut artifacts = Vec::new();
    write(&dir, ECHO_FILE, &config.echo(), &mut artifacts)?;
    let started = SystemTime::now();
    let clock = Instant::now();
    let result = execute(config);
    let elapsed = clock.elapsed();
    let (report, summary, field, diagnostics, failure) = match result {
        Ok(o) => (o.report, o.summary, o.field, o.diagnostics, None),
        Err(e) => (Report::default(), Vec::new(), None, e.diagnostics().cloned(), Some(e.to_string())),
    };
    write(&dir, REPORT_FILE, &report.to_csv(), &mut artifacts)?;
    write(&dir, FIELD_FILE, &field.map(|f| f.to_text()).unwrap_or_default(), &mut artifacts)?;
    let diag = diagnostics.map(|d| d.to_csv()).unwrap_or_else(|| "# schema=1\n".to_string());
    write(&dir, DIAGNOSTICS_FILE, &diag, &mut artifacts)?;
    let exit_code = if failure.is_some() {
        EXIT_SOLVER_FAILURE
    } else if report.all_pass() {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILURE
    };
    Ok(RunRecord {
        config: config.clone(),
        dir,
        started,
        elapsed,
        summary,
        report,
        artifacts,
        failure,
        exit_code,
    })
}

/// Run one scenario into a fresh directory under `config.output`.
///
/// Solver failures do not return `Err`: they give a record with exit code 3
/// and whatever diagnostics the solver left behind.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunRecord, HarnessError> {
    config.validate()?;
    if !config.sweep.is_empty() {
        let key = format!("sweep.{}", config.sweep[0].key);
        return Err(ConfigError::Field { line: 0, key, message: "sweep axes need `sweep`, not `run`".into() }.into());
    }
    let dir = fresh_dir(&config.output, config.scenario.name())?;
    run_in(config, dir)
}

/// One point of a sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// Row-major position in the grid (last axis fastest).
    pub index: usize,
    pub assignments: Vec<(String, f64)>,
    pub config: ExperimentConfig,
}

/// Expand the Cartesian product of the axes and validate every point.
pub fn expand_sweep(config: &ExperimentConfig) -> Result<Vec<SweepPoint>, HarnessError> {
    config.validate()?;
    let total = config.sweep_size();
    if total > MAX_SWEEP_POINTS {
        return Err(ConfigError::Field {
            line: 0,
            key: "sweep".into(),
            message: format!("{total} points exceed the limit of {MAX_SWEEP_POINTS}"),
        }
        .into());
    }
    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        let mut rest = index;
        let mut assignments = Vec::with_capacity(config.sweep.len());
        for axis in config.sweep.iter().rev() {
            assignments.push((axis.key.clone(), axis.values[rest % axis.values.len()]));
            rest /= axis.values.len();
        }
        assignments.reverse();
        let mut cfg = config.clone();
        cfg.sweep.clear();
        for (k, v) in &assignments {
            cfg.set_value(k, *v)?;
        }
        cfg.validate().map_err(|e| match e {
            ConfigError::Field { key, message, .. } => ConfigError::Field {
                line: 0,
                key,
                message: format!("sweep point {index} ({}): {message}", describe(&assignments)),
            },
            other => other,
        })?;
        points.push(SweepPoint { index, assignments, config: cfg });
    }
    Ok(points)
}

fn describe(assignments: &[(String, f64)]) -> String {
    assignments.iter().map(|(k, v)| format!("{k}={v:?}")).collect::<Vec<_>>().join(" ")
}

/// Results of a sweep, ordered by point index.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub dir: PathBuf,
    pub points: Vec<SweepPoint>,
    pub records: Vec<RunRecord>,
    pub summary_path: PathBuf,
    pub exit_code: i32,
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, HarnessError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| HarnessError::Pool(e.to_string()))
}

/// Run `points` (in any order) under `dir`, each in `point-NNNN`; results
/// come back sorted by index.
pub fn run_points(points: &[SweepPoint], dir: &Path, workers: Option<usize>) -> Result<Vec<RunRecord>, HarnessError> {
    let pool = pool(workers)?;
    let mut records = pool.install(|| {
        points
            .par_iter()
            .map(|pt| {
                let d = dir.join(format!("point-{:04}", pt.index));
                fs::create_dir_all(&d).map_err(io_err(&d))?;
                let mut cfg = pt.config.clone();
                cfg.output = dir.to_path_buf();
                run_in(&cfg, d).map(|r| (pt.index, r))
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    })?;
    records.sort_by_key(|(i, _)| *i);
    Ok(records.into_iter().map(|(_, r)| r).collect())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `summary.csv`: one row per point with axis values, status and the
/// union of the pipelines' summary keys.
pub fn summary_csv(points: &[SweepPoint], records: &[RunRecord]) -> String {
    let axes: Vec<&str> = points.first().map(|p| p.assignments.iter().map(|(k, _)| k.as_str()).collect()).unwrap_or_default();
    let mut keys: Vec<&str> = Vec::new();
    for r in records {
        for (k, _) in &r.summary {
            if !keys.contains(&k.as_str()) {
                keys.push(k);
            }
        }
    }
    let mut out = String::from("# schema=1\npoint");
    for a in &axes {
        out.push(',');
        out.push_str(a);
    }
    out.push_str(",exit_code,pass,failed_checks,failure");
    for k in &keys {
        out.push(',');
        out.push_str(k);
    }
    out.push('\n');
    for (pt, r) in points.iter().zip(records) {
        out.push_str(&pt.index.to_string());
        for (_, v) in &pt.assignments {
            out.push_str(&format!(",{v:?}"));
        }
        let failed: Vec<&str> = r.report.rows.iter().filter(|row| !row.pass).map(|row| row.check.as_str()).collect();
        out.push_str(&format!(
            ",{},{},{},{}",
            r.exit_code,
            r.passed(),
            csv_field(&failed.join(" ")),
            csv_field(r.failure.as_deref().unwrap_or(""))
        ));
        for k in &keys {
            out.push(',');
            out.push_str(&csv_field(r.summary_value(k).unwrap_or("")));
        }
        out.push('\n');
    }
    out
}

/// Worst exit code over a set of runs: solver failure, then check failure.
pub fn combined_exit_code(records: &[RunRecord]) -> i32 {
    if records.iter().any(|r| r.exit_code == EXIT_SOLVER_FAILURE) {
        EXIT_SOLVER_FAILURE
    } else if records.iter().any(|r| r.exit_code != EXIT_PASS) {
        EXIT_CHECK_FAILURE
    } else {
        EXIT_PASS
    }
}

/// Validate every point, then run them concurrently on `workers` threads
/// (default: available parallelism) into a fresh sweep directory.
pub fn run_sweep(config: &ExperimentConfig, workers: Option<usize>) -> Result<SweepRecord, HarnessError> {
    let points = expand_sweep(config)?;
    let dir = fresh_dir(&config.output, &format!("sweep-{}", config.scenario.name()))?;
    let mut unused = Vec::new();
    write(&dir, ECHO_FILE, &config.echo(), &mut unused)?;
    let records = run_points(&points, &dir, workers)?;
    let summary_path = dir.join(SUMMARY_FILE);
    fs::write(&summary_path, summary_csv(&points, &records)).map_err(io_err(&summary_path))?;
    let exit_code = combined_exit_code(&records);
    Ok(SweepRecord { dir, points, records, summary_path, exit_code })
}
