//! Flat `key = value` experiment configuration.
//!
//! Keys are dotted (`problem.theta`, `mesh.cells`); `#` starts a comment line.
//! Sweep axes are written `sweep.<name> = a:b:step` or `sweep.<name> = v1, v2, ...`,
//! where `<name>` is a full key or any unambiguous suffix of one.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::exponents::{existence_threshold, ParameterSet};
use crate::mesh::{RadialMesh, MIN_CELLS};
use crate::problem::{ProblemSpec, SourceSpec};
use crate::scalar::HModel;
use crate::solver::{ContinuationOptions, ExactRadial, SolverOptions};

/// Largest number of points a sweep may expand to.
pub const MAX_SWEEP_POINTS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    /// `line` is 0 when the key took its default value.
    #[error("{}key `{key}`: {message}", line_prefix(*.line))]
    Field { line: usize, key: String, message: String },
    #[error("missing required key `scenario`")]
    MissingScenario,
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn line_prefix(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!("line {line}: ")
    }
}

impl ConfigError {
    fn field(key: &str, message: impl Into<String>) -> Self {
        ConfigError::Field { line: 0, key: key.to_string(), message: message.into() }
    }

    fn at_line(self, line: usize) -> Self {
        match self {
            ConfigError::Field { key, message, .. } => ConfigError::Field { line, key, message },
            other => other,
        }
    }

    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Field { key, .. } => Some(key),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    ExactRadial,
    Manufactured,
    ExponentAtlas,
    TailFit,
    EntropyCheck,
    HZero,
    Bounded,
    TransformCrosscheck,
    UniquenessProbe,
    ThresholdProbe,
    StrongSingular,
}

impl Scenario {
    pub const ALL: [Scenario; 11] = [
        Scenario::ExactRadial,
        Scenario::Manufactured,
        Scenario::ExponentAtlas,
        Scenario::TailFit,
        Scenario::EntropyCheck,
        Scenario::HZero,
        Scenario::Bounded,
        Scenario::TransformCrosscheck,
        Scenario::UniquenessProbe,
        Scenario::ThresholdProbe,
        Scenario::StrongSingular,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::ExactRadial => "exact-radial",
            Scenario::Manufactured => "manufactured",
            Scenario::ExponentAtlas => "exponent-atlas",
            Scenario::TailFit => "tail-fit",
            Scenario::EntropyCheck => "entropy-check",
            Scenario::HZero => "h-zero",
            Scenario::Bounded => "bounded",
            Scenario::TransformCrosscheck => "transform-crosscheck",
            Scenario::UniquenessProbe => "uniqueness-probe",
            Scenario::ThresholdProbe => "threshold-probe",
            Scenario::StrongSingular => "strong-singular",
        }
    }

    /// Scenarios that run the solver.
    pub fn solves(&self) -> bool {
        *self != Scenario::ExponentAtlas
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .iter()
            .find(|sc| sc.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

/// Continuation levels, either `b^i..b^j` or an explicit list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    Geometric { base: u64, first: u32, last: u32 },
    Explicit(Vec<u64>),
}

impl Schedule {
    pub fn levels(&self) -> Vec<u64> {
        match self {
            Schedule::Geometric { base, first, last } => (*first..=*last).map(|j| base.pow(j)).collect(),
            Schedule::Explicit(v) => v.clone(),
        }
    }

    fn validate(&self) -> Result<(), String> {
        if let Schedule::Geometric { base, first, last } = self {
            if *base < 2 || first > last {
                return Err("geometric schedule needs base >= 2 and first <= last".into());
            }
            if base.checked_pow(*last).is_none() {
                return Err("schedule overflows u64".into());
            }
        }
        let v = self.levels();
        if v.is_empty() || v[0] == 0 || v.windows(2).any(|w| w[1] <= w[0]) {
            return Err("schedule must be a nonempty increasing list of positive levels".into());
        }
        Ok(())
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Geometric { base: 2, first: 4, last: 24 }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Geometric { base, first, last } => write!(f, "{base}^{first}..{base}^{last}"),
            Schedule::Explicit(v) => f.write_str(&join(v.iter().map(|x| x.to_string()))),
        }
    }
}

impl FromStr for Schedule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid schedule `{s}` (expected `b^i..b^j` or a list)");
        if let Some((lo, hi)) = s.split_once("..") {
            let pow = |t: &str| -> Result<(u64, u32), String> {
                let (b, e) = t.trim().split_once('^').ok_or_else(bad)?;
                Ok((b.trim().parse().map_err(|_| bad())?, e.trim().parse().map_err(|_| bad())?))
            };
            let (b1, first) = pow(lo)?;
            let (b2, last) = pow(hi)?;
            if b1 != b2 {
                return Err(bad());
            }
            return Ok(Schedule::Geometric { base: b1, first, last });
        }
        let v = s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Schedule::Explicit(v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemParams {
    pub dim: f64,
    pub p: f64,
    pub theta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub h_scale: f64,
    /// Zero `s̄` of the vanishing variant of `h`.
    pub h_zero: Option<f64>,
    pub amplitude: f64,
    pub singularity: f64,
    /// `ε` of the closed-form radial instance; fixes amplitude and singularity there.
    pub epsilon: f64,
    /// Lebesgue index of the source used for predictions.
    pub m: f64,
    pub r_in: f64,
}

impl Default for ProblemParams {
    fn default() -> Self {
        ProblemParams {
            dim: 3.0,
            p: 2.0,
            theta: 0.5,
            gamma1: 0.0,
            gamma2: 0.5,
            h_scale: 1.0,
            h_zero: None,
            amplitude: 0.375,
            singularity: 2.5,
            epsilon: 0.5,
            m: 1.0,
            r_in: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckParams {
    /// Main tolerance of the scenario.
    pub tolerance: f64,
    /// Relative tolerance on closed-form tail exponents.
    pub tail_tol: f64,
    /// Relative slack on one-sided exponent bounds.
    pub slack: f64,
    /// Relative errors are measured on nodes with `r >= region_min`.
    pub region_min: f64,
    pub order_cells: Vec<usize>,
    pub refine_factor: usize,
    pub trace_level: f64,
    /// Constant `c` in the `c/M` entropy tolerance for nonzero test functions.
    pub entropy_const: f64,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            tolerance: 1e-2,
            tail_tol: 0.05,
            slack: 0.1,
            region_min: 0.1,
            order_cells: vec![64, 128, 256, 512],
            refine_factor: 2,
            trace_level: 1.0,
            entropy_const: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    /// Canonical key, e.g. `problem.theta`.
    pub key: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub problem: ProblemParams,
    pub cells: usize,
    pub grading: f64,
    pub schedule: Schedule,
    pub continuation_tol: f64,
    pub divergence_window: usize,
    pub solver: SolverOptions,
    pub check: CheckParams,
    /// Second schedule of the uniqueness probe.
    pub probe_schedule: Schedule,
    /// Constant initial guess of the uniqueness probe's second start.
    pub probe_init: f64,
    /// Random admissible parameter sets drawn by the exponent atlas.
    pub atlas_samples: usize,
    pub seed: u64,
    pub output: PathBuf,
    pub sweep: Vec<SweepAxis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Real,
    OptReal,
    Int,
    Text,
}

/// Every settable key, in echo order.
const KEYS: &[(&str, Kind)] = &[
    ("problem.dim", Kind::Real),
    ("problem.p", Kind::Real),
    ("problem.theta", Kind::Real),
    ("problem.gamma1", Kind::Real),
    ("problem.gamma2", Kind::Real),
    ("problem.h_scale", Kind::Real),
    ("problem.h_zero", Kind::OptReal),
    ("problem.amplitude", Kind::Real),
    ("problem.singularity", Kind::Real),
    ("problem.epsilon", Kind::Real),
    ("problem.m", Kind::Real),
    ("problem.r_in", Kind::Real),
    ("mesh.cells", Kind::Int),
    ("mesh.grading", Kind::Real),
    ("continuation.schedule", Kind::Text),
    ("continuation.tol", Kind::Real),
    ("continuation.window", Kind::Int),
    ("solver.tol", Kind::Real),
    ("solver.step_tol", Kind::Real),
    ("solver.max_iterations", Kind::Int),
    ("solver.min_damping", Kind::Real),
    ("solver.flux_eps", Kind::Real),
    ("check.tolerance", Kind::Real),
    ("check.tail_tol", Kind::Real),
    ("check.slack", Kind::Real),
    ("check.region_min", Kind::Real),
    ("check.order_cells", Kind::Text),
    ("check.refine_factor", Kind::Int),
    ("check.trace_level", Kind::Real),
    ("check.entropy_const", Kind::Real),
    ("probe.schedule", Kind::Text),
    ("probe.init_value", Kind::Real),
    ("atlas.samples", Kind::Int),
    ("seed", Kind::Int),
    ("output.dir", Kind::Text),
];

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(", ")
}

fn real(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("expected a number, got `{v}`"))
}

fn int<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse::<T>().map_err(|_| format!("expected a nonnegative integer, got `{v}`"))
}

/// Sweep values: `a:b:step` (inclusive) or a comma list.
fn parse_axis(v: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = v.split(':').collect();
    let values = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (real(a.trim())?, real(b.trim())?, real(step.trim())?);
            if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
                return Err(format!("range `{v}` needs a <= b and step > 0"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            if count > MAX_SWEEP_POINTS {
                return Err(format!("range `{v}` has more than {MAX_SWEEP_POINTS} values"));
            }
            (0..count).map(|i| a + i as f64 * step).collect()
        }
        [_] => v.split(',').map(|t| real(t.trim())).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("invalid sweep axis `{v}`")),
    };
    if values.is_empty() {
        return Err("empty sweep axis".into());
    }
    Ok(values)
}

/// Resolve a sweep name against the settable keys by full match or dotted suffix.
fn resolve_axis(name: &str) -> Result<&'static str, String> {
    if let Some((k, kind)) = KEYS.iter().find(|(k, _)| *k == name) {
        return match kind {
            Kind::Text => Err(format!("`{k}` cannot be swept")),
            _ => Ok(k),
        };
    }
    let hits: Vec<&'static str> = KEYS
        .iter()
        .filter(|(k, kind)| *kind != Kind::Text && k.ends_with(&format!(".{name}")))
        .map(|(k, _)| *k)
        .collect();
    match hits.as_slice() {
        [k] => Ok(k),
        [] => Err(format!("no parameter named `{name}`")),
        _ => Err(format!("`{name}` is ambiguous: {}", hits.join(", "))),
    }
}

impl ExperimentConfig {
    /// Defaults for `scenario`; each scenario runs as-is with no further keys.
    pub fn defaults(scenario: Scenario) -> Self {
        let mut c = ExperimentConfig {
            scenario,
            problem: ProblemParams::default(),
            cells: 4096,
            grading: 2.0,
            schedule: Schedule::default(),
            continuation_tol: ContinuationOptions::default().tol,
            divergence_window: ContinuationOptions::default().divergence_window,
            solver: SolverOptions::default(),
            check: CheckParams::default(),
            probe_schedule: Schedule::Geometric { base: 3, first: 3, last: 15 },
            probe_init: 1.0,
            atlas_samples: 100,
            seed: 1,
            output: PathBuf::from("runs"),
            sweep: Vec::new(),
        };
        let p = &mut c.problem;
        match scenario {
            Scenario::ExactRadial | Scenario::TailFit => {}
            Scenario::Manufactured | Scenario::EntropyCheck => {
                p.theta = 0.0;
                p.gamma2 = 0.0;
                p.amplitude = 2.0 * p.dim;
                p.singularity = 0.0;
                c.cells = 512;
                c.grading = 1.0;
                c.check.tolerance = 1e-4;
                c.check.refine_factor = 1;
            }
            Scenario::ExponentAtlas => {}
            Scenario::HZero => {
                p.theta = 3.0;
                p.gamma1 = 0.5;
                p.gamma2 = 0.0;
                p.h_zero = Some(2.0);
                p.amplitude = 10.0;
                c.cells = 1024;
                c.check.tolerance = 1e-8;
            }
            Scenario::Bounded => {
                p.amplitude = 1.0;
                p.singularity = 1.0;
                c.cells = 1024;
            }
            Scenario::TransformCrosscheck => {
                c.check.tolerance = 2.0;
            }
            Scenario::UniquenessProbe => {
                p.theta = 0.25;
                p.gamma1 = 0.5;
                p.amplitude = 1.0;
                p.singularity = 1.0;
                p.m = 2.0;
                c.cells = 1024;
                c.check.tolerance = 1e-8;
            }
            Scenario::ThresholdProbe => {
                p.theta = 1.2 * (1.0 + p.gamma2 / (p.p - 1.0));
                p.amplitude = 100.0 * 0.375;
                c.cells = 1024;
            }
            Scenario::StrongSingular => {
                p.theta = 0.0;
                p.gamma1 = 2.0;
                p.gamma2 = 0.0;
                p.amplitude = 1.0;
                p.singularity = 0.0;
                c.cells = 1024;
                c.grading = 1.0;
                c.check.tolerance = 0.1;
                c.check.refine_factor = 4;
            }
        }
        c
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let p = &mut self.problem;
        match key {
            "problem.dim" => p.dim = real(v)?,
            "problem.p" => p.p = real(v)?,
            "problem.theta" => p.theta = real(v)?,
            "problem.gamma1" => p.gamma1 = real(v)?,
            "problem.gamma2" => p.gamma2 = real(v)?,
            "problem.h_scale" => p.h_scale = real(v)?,
            "problem.h_zero" => p.h_zero = if v == "none" { None } else { Some(real(v)?) },
            "problem.amplitude" => p.amplitude = real(v)?,
            "problem.singularity" => p.singularity = real(v)?,
            "problem.epsilon" => p.epsilon = real(v)?,
            "problem.m" => p.m = real(v)?,
            "problem.r_in" => p.r_in = real(v)?,
            "mesh.cells" => self.cells = int(v)?,
            "mesh.grading" => self.grading = real(v)?,
            "continuation.schedule" => self.schedule = v.parse()?,
            "continuation.tol" => self.continuation_tol = real(v)?,
            "continuation.window" => self.divergence_window = int(v)?,
            "solver.tol" => self.solver.tol = real(v)?,
            "solver.step_tol" => self.solver.step_tol = real(v)?,
            "solver.max_iterations" => self.solver.max_iterations = int(v)?,
            "solver.min_damping" => self.solver.min_damping = real(v)?,
            "solver.flux_eps" => self.solver.flux_eps = real(v)?,
            "check.tolerance" => self.check.tolerance = real(v)?,
            "check.tail_tol" => self.check.tail_tol = real(v)?,
            "check.slack" => self.check.slack = real(v)?,
            "check.region_min" => self.check.region_min = real(v)?,
            "check.order_cells" => {
                self.check.order_cells = v.split(',').map(|t| int(t.trim())).collect::<Result<_, _>>()?
            }
            "check.refine_factor" => self.check.refine_factor = int(v)?,
            "check.trace_level" => self.check.trace_level = real(v)?,
            "check.entropy_const" => self.check.entropy_const = real(v)?,
            "probe.schedule" => self.probe_schedule = v.parse()?,
            "probe.init_value" => self.probe_init = real(v)?,
            "atlas.samples" => self.atlas_samples = int(v)?,
            "seed" => self.seed = int(v)?,
            "output.dir" => self.output = PathBuf::from(v),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Apply one numeric sweep value to `key`.
    pub fn set_value(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        let kind = KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, kind)| *kind)
            .ok_or_else(|| ConfigError::field(key, "unknown key"))?;
        let text = match kind {
            Kind::Int => {
                if value.fract() != 0.0 || value < 0.0 {
                    return Err(ConfigError::field(key, format!("needs an integer, got {value}")));
                }
                format!("{}", value as u64)
            }
            Kind::Real | Kind::OptReal => format!("{value:?}"),
            Kind::Text => return Err(ConfigError::field(key, "cannot be swept")),
        };
        self.set(key, &text).map_err(|m| ConfigError::field(key, m))
    }

    fn value_of(&self, key: &str) -> String {
        let p = &self.problem;
        let r = |x: f64| format!("{x:?}");
        match key {
            "problem.dim" => r(p.dim),
            "problem.p" => r(p.p),
            "problem.theta" => r(p.theta),
            "problem.gamma1" => r(p.gamma1),
            "problem.gamma2" => r(p.gamma2),
            "problem.h_scale" => r(p.h_scale),
            "problem.h_zero" => p.h_zero.map_or_else(|| "none".to_string(), r),
            "problem.amplitude" => r(p.amplitude),
            "problem.singularity" => r(p.singularity),
            "problem.epsilon" => r(p.epsilon),
            "problem.m" => r(p.m),
            "problem.r_in" => r(p.r_in),
            "mesh.cells" => self.cells.to_string(),
            "mesh.grading" => r(self.grading),
            "continuation.schedule" => self.schedule.to_string(),
            "continuation.tol" => r(self.continuation_tol),
            "continuation.window" => self.divergence_window.to_string(),
            "solver.tol" => r(self.solver.tol),
            "solver.step_tol" => r(self.solver.step_tol),
            "solver.max_iterations" => self.solver.max_iterations.to_string(),
            "solver.min_damping" => r(self.solver.min_damping),
            "solver.flux_eps" => r(self.solver.flux_eps),
            "check.tolerance" => r(self.check.tolerance),
            "check.tail_tol" => r(self.check.tail_tol),
            "check.slack" => r(self.check.slack),
            "check.region_min" => r(self.check.region_min),
            "check.order_cells" => join(self.check.order_cells.iter().map(|c| c.to_string())),
            "check.refine_factor" => self.check.refine_factor.to_string(),
            "check.trace_level" => r(self.check.trace_level),
            "check.entropy_const" => r(self.check.entropy_const),
            "probe.schedule" => self.probe_schedule.to_string(),
            "probe.init_value" => r(self.probe_init),
            "atlas.samples" => self.atlas_samples.to_string(),
            "seed" => self.seed.to_string(),
            "output.dir" => self.output.display().to_string(),
            _ => unreachable!("key table and accessor disagree on `{key}`"),
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (k, v) = trimmed
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line, message: format!("expected `key = value`, got `{trimmed}`") })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(ConfigError::Syntax { line, message: "empty key or value".into() });
            }
            if let Some((first, _, _)) = entries.iter().find(|(_, key, _)| key == k) {
                return Err(ConfigError::Field {
                    line,
                    key: k.to_string(),
                    message: format!("duplicate key (first set on line {first})"),
                });
            }
            entries.push((line, k.to_string(), v.to_string()));
        }

        let (line, _, name) = entries.iter().find(|(_, k, _)| k == "scenario").ok_or(ConfigError::MissingScenario)?;
        let scenario: Scenario =
            name.parse().map_err(|m| ConfigError::Field { line: *line, key: "scenario".into(), message: m })?;
        let mut cfg = ExperimentConfig::defaults(scenario);
        let mut lines: Vec<(String, usize)> = Vec::new();
        for (line, key, value) in &entries {
            if key == "scenario" {
                continue;
            }
            let fail = |m: String| ConfigError::Field { line: *line, key: key.clone(), message: m };
            if let Some(name) = key.strip_prefix("sweep.") {
                let canonical = resolve_axis(name).map_err(fail)?;
                if cfg.sweep.iter().any(|a| a.key == canonical) {
                    return Err(fail(format!("axis `{canonical}` given twice")));
                }
                let values = parse_axis(value).map_err(fail)?;
                cfg.sweep.push(SweepAxis { key: canonical.to_string(), values });
                lines.push((format!("sweep.{canonical}"), *line));
            } else {
                cfg.set(key, value).map_err(fail)?;
                lines.push((key.clone(), *line));
            }
        }
        cfg.validate().map_err(|e| {
            let line = e
                .key()
                .and_then(|k| lines.iter().find(|(key, _)| key == k))
                .map_or(0, |(_, l)| *l);
            e.at_line(line)
        })?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    /// Canonical text: every key, full precision. `parse(echo())` returns `self`.
    pub fn echo(&self) -> String {
        let mut out = format!("scenario = {}\n", self.scenario);
        for (k, _) in KEYS {
            let _ = writeln!(out, "{k} = {}", self.value_of(k));
        }
        for axis in &self.sweep {
            let _ = writeln!(out, "sweep.{} = {}", axis.key, join(axis.values.iter().map(|v| format!("{v:?}"))));
        }
        out
    }

    /// Key-level checks that do not need a solve.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.problem;
        let finite = [
            ("problem.dim", p.dim),
            ("problem.p", p.p),
            ("problem.theta", p.theta),
            ("problem.gamma1", p.gamma1),
            ("problem.gamma2", p.gamma2),
            ("problem.h_scale", p.h_scale),
            ("problem.amplitude", p.amplitude),
            ("problem.singularity", p.singularity),
            ("problem.epsilon", p.epsilon),
            ("problem.m", p.m),
            ("problem.r_in", p.r_in),
            ("mesh.grading", self.grading),
        ];
        for (k, v) in finite {
            if !v.is_finite() {
                return Err(ConfigError::field(k, "must be finite"));
            }
        }
        if !(p.p > 1.0) {
            return Err(ConfigError::field("problem.p", "needs p > 1"));
        }
        if !(p.dim > p.p) {
            return Err(ConfigError::field("problem.dim", "needs N > p"));
        }
        for (k, v) in [("problem.theta", p.theta), ("problem.gamma1", p.gamma1), ("problem.gamma2", p.gamma2)] {
            if v < 0.0 {
                return Err(ConfigError::field(k, "must be >= 0"));
            }
        }
        if !(p.m >= 1.0) {
            return Err(ConfigError::field("problem.m", "needs m >= 1"));
        }
        if self.cells < MIN_CELLS {
            return Err(ConfigError::field("mesh.cells", format!("needs at least {MIN_CELLS} cells")));
        }
        if !(self.grading >= 1.0) {
            return Err(ConfigError::field("mesh.grading", "needs grading >= 1"));
        }
        self.schedule.validate().map_err(|m| ConfigError::field("continuation.schedule", m))?;
        self.probe_schedule.validate().map_err(|m| ConfigError::field("probe.schedule", m))?;
        let positive = [
            ("continuation.tol", self.continuation_tol),
            ("solver.tol", self.solver.tol),
            ("solver.step_tol", self.solver.step_tol),
            ("solver.min_damping", self.solver.min_damping),
            ("check.tolerance", self.check.tolerance),
            ("check.tail_tol", self.check.tail_tol),
            ("check.slack", self.check.slack),
            ("check.trace_level", self.check.trace_level),
            ("check.entropy_const", self.check.entropy_const),
        ];
        for (k, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ConfigError::field(k, "must be positive and finite"));
            }
        }
        if !(self.solver.flux_eps >= 0.0) {
            return Err(ConfigError::field("solver.flux_eps", "must be >= 0"));
        }
        if self.solver.max_iterations == 0 {
            return Err(ConfigError::field("solver.max_iterations", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.check.region_min) {
            return Err(ConfigError::field("check.region_min", "must lie in [0, 1)"));
        }
        if self.check.refine_factor == 0 {
            return Err(ConfigError::field("check.refine_factor", "must be positive"));
        }
        if !(self.probe_init >= 0.0) || !self.probe_init.is_finite() {
            return Err(ConfigError::field("probe.init_value", "must be finite and >= 0"));
        }
        if self.output.as_os_str().is_empty() {
            return Err(ConfigError::field("output.dir", "must not be empty"));
        }
        self.validate_scenario()
    }

    fn validate_scenario(&self) -> Result<(), ConfigError> {
        let p = &self.problem;
        match self.scenario {
            Scenario::ExponentAtlas => {
                return ParameterSet::new(p.dim, p.p, p.theta, p.gamma1, p.gamma2, p.m)
                    .map(|_| ())
                    .map_err(|e| ConfigError::field("problem.m", e.to_string()));
            }
            Scenario::ExactRadial | Scenario::TransformCrosscheck => {
                if p.r_in != 0.0 {
                    return Err(ConfigError::field("problem.r_in", "the closed-form instance lives on the ball"));
                }
                self.exact().map_err(|e| ConfigError::field("problem.epsilon", e.to_string()))?;
            }
            Scenario::Manufactured => {
                if p.p != 2.0 || p.theta != 0.0 || p.r_in != 0.0 {
                    return Err(ConfigError::field("problem.p", "manufactured case needs p = 2, theta = 0 on the ball"));
                }
                if self.check.order_cells.len() < 2 || self.check.order_cells.iter().any(|&c| c < MIN_CELLS) {
                    return Err(ConfigError::field("check.order_cells", "needs two or more meshes"));
                }
            }
            Scenario::HZero => {
                if p.h_zero.is_none() {
                    return Err(ConfigError::field("problem.h_zero", "h-zero needs the vanishing variant of h"));
                }
            }
            Scenario::Bounded => {
                if !(p.singularity < p.p) {
                    return Err(ConfigError::field(
                        "problem.singularity",
                        "bounded regime needs sigma < p (f in L^m with m > N/p)",
                    ));
                }
            }
            Scenario::ThresholdProbe => {
                let t = existence_threshold(p.p, p.gamma2).map_err(|e| ConfigError::field("problem.gamma2", e.to_string()))?;
                if !(p.theta > t) {
                    return Err(ConfigError::field("problem.theta", format!("threshold probe needs theta > {t}")));
                }
            }
            Scenario::StrongSingular => {
                if !(p.gamma1 > 1.0) {
                    return Err(ConfigError::field("problem.gamma1", "strong-singular needs gamma1 > 1"));
                }
            }
            Scenario::UniquenessProbe => {
                if p.h_zero.is_some() || !(p.amplitude > 0.0) {
                    return Err(ConfigError::field("problem.amplitude", "uniqueness probe needs f > 0 and h without zero"));
                }
            }
            Scenario::TailFit | Scenario::EntropyCheck => {}
        }
        self.problem_spec()?;
        RadialMesh::build(self.cells, self.grading, self.problem_spec()?.r_in)
            .map_err(|e| ConfigError::field("mesh.cells", e.to_string()))?;
        Ok(())
    }

    pub(crate) fn exact(&self) -> crate::Result<ExactRadial> {
        let p = &self.problem;
        ExactRadial::new(p.dim, p.p, p.theta, p.gamma2, p.epsilon)
    }

    /// The boundary-value problem this config describes.
    pub fn problem_spec(&self) -> Result<ProblemSpec, ConfigError> {
        let p = &self.problem;
        if matches!(self.scenario, Scenario::ExactRadial | Scenario::TransformCrosscheck) {
            return self.exact().map(|e| e.problem_spec()).map_err(|e| ConfigError::field("problem.epsilon", e.to_string()));
        }
        let h = match p.h_zero {
            Some(z) => HModel::with_zero(p.gamma1, p.h_scale, z),
            None => HModel::new(p.gamma1, p.gamma2, p.h_scale),
        }
        .map_err(|e| ConfigError::field("problem.h_scale", e.to_string()))?;
        let source =
            SourceSpec::new(p.amplitude, p.singularity).map_err(|e| ConfigError::field("problem.amplitude", e.to_string()))?;
        let spec = ProblemSpec { dim: p.dim, p: p.p, theta: p.theta, h, source, r_in: p.r_in };
        spec.validate().map_err(|e| ConfigError::field("problem.singularity", e.to_string()))?;
        Ok(spec)
    }

    pub fn continuation_options(&self) -> ContinuationOptions {
        ContinuationOptions {
            newton: self.solver,
            tol: self.continuation_tol,
            divergence_window: self.divergence_window,
            ..ContinuationOptions::default()
        }
    }

    /// Number of points of the sweep grid (1 without axes).
    pub fn sweep_size(&self) -> usize {
        self.sweep.iter().fold(1usize, |n, a| n.saturating_mul(a.values.len()))
    }
}
