use crate::error::{Error, Result};
use crate::mesh::DiscreteField;
use crate::problem::ProblemSpec;
use crate::scalar::trunc;

use super::assemble::{Discretization, Reaction};
use super::newton::{newton, SolverOptions};
use super::{LevelRecord, SolveDiagnostics, ENERGY_LEVELS};

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationOptions {
    pub newton: SolverOptions,
    pub energy_levels: Vec<f64>,
    /// Converged once every `d_k` stays below this for two consecutive levels.
    pub tol: f64,
    pub stop_on_convergence: bool,
    /// Raise the divergence signal when `sup u_n > n` and `sup u_n / n` is
    /// non-decreasing over this many consecutive levels (0 disables).
    pub divergence_window: usize,
    /// For `p > 2` a zero start makes the Jacobian singular; start from `c(1 - r²)` instead.
    pub degenerate_start: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            newton: SolverOptions::default(),
            energy_levels: ENERGY_LEVELS.to_vec(),
            tol: 1e-8,
            stop_on_convergence: false,
            divergence_window: 4,
            degenerate_start: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContinuationOutcome {
    pub field: DiscreteField,
    pub diagnostics: SolveDiagnostics,
    /// Solution at every completed level, in schedule order.
    pub history: Vec<(u64, DiscreteField)>,
}

/// `n = 2^j` for `j = 4..=24`.
pub fn default_schedule() -> Vec<u64> {
    (4..=24).map(|j| 1u64 << j).collect()
}

pub(crate) fn validate_schedule(schedule: &[u64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::invalid("empty continuation schedule"));
    }
    if schedule[0] == 0 {
        return Err(Error::invalid("regularization levels must be >= 1"));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("continuation schedule must be strictly increasing"));
    }
    Ok(())
}

/// `‖∇T_k(a) - ∇T_k(b)‖_{L^p}` with nodal truncation and element gradients.
pub(crate) fn truncated_gradient_distance(a: &DiscreteField, b: &DiscreteField, k: f64, p: f64) -> f64 {
    let r = a.mesh().nodes();
    let vol = a.mesh().element_volumes(a.dim());
    let (ua, ub) = (a.values(), b.values());
    let mut sum = 0.0;
    for e in 0..vol.len() {
        let h = r[e + 1] - r[e];
        let da = (trunc(k, ua[e + 1]) - trunc(k, ua[e])) / h;
        let db = (trunc(k, ub[e + 1]) - trunc(k, ub[e])) / h;
        sum += vol[e] * (da - db).abs().powf(p);
    }
    sum.powf(1.0 / p)
}

/// `true` if each of the last `window` entries is `>=` its predecessor (NaN never is).
fn non_decreasing(values: &[f64], window: usize) -> bool {
    values.len() >= window
        && values[values.len() - window..].iter().all(|v| !v.is_nan())
        && values[values.len() - window..].windows(2).all(|w| w[1] >= w[0])
}

pub(crate) fn run_continuation(
    spec: &ProblemSpec,
    init: DiscreteField,
    schedule: &[u64],
    opts: &ContinuationOptions,
    reaction: Reaction,
    degeneracy: f64,
) -> Result<ContinuationOutcome> {
    spec.validate()?;
    validate_schedule(schedule)?;
    if init.dim() != spec.dim {
        return Err(Error::invalid("initial field dimension differs from the problem"));
    }
    if (init.mesh().r_in() - spec.r_in).abs() > 1e-14 {
        return Err(Error::invalid("mesh inner radius differs from the problem"));
    }
    let mut init = init;
    if spec.p > 2.0 && init.values().iter().all(|&v| v == 0.0) && spec.source.amplitude > 0.0 {
        let c = opts.degenerate_start;
        let mesh = init.mesh().clone();
        init = DiscreteField::from_fn(mesh, spec.dim, |r| c * (1.0 - r * r))?;
    }
    let disc = Discretization::new(spec, &init, reaction, degeneracy, opts.newton.flux_eps);

    let mut diagnostics = SolveDiagnostics {
        energy_levels: opts.energy_levels.clone(),
        ..Default::default()
    };
    let mut history: Vec<(u64, DiscreteField)> = Vec::with_capacity(schedule.len());
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); opts.energy_levels.len()];
    let mut growth: Vec<f64> = Vec::with_capacity(schedule.len());
    let mut below = 0usize;
    let mut field = init;

    for &level in schedule {
        let (next, mut record): (DiscreteField, LevelRecord) =
            match newton(&disc, spec, level, field.clone(), &opts.newton) {
                Ok(v) => v,
                Err(Error::NonConvergence { level, reason, diagnostics: inner }) => {
                    diagnostics.levels.extend(inner.levels);
                    return Err(Error::NonConvergence { level, reason, diagnostics: Box::new(diagnostics) });
                }
                Err(e) => return Err(e),
            };
        if let Some((_, prev)) = history.last() {
            record.energy_diffs = opts
                .energy_levels
                .iter()
                .map(|&k| truncated_gradient_distance(&next, prev, k, spec.p))
                .collect();
            for (s, d) in series.iter_mut().zip(&record.energy_diffs) {
                s.push(*d);
            }
            if record.energy_diffs.iter().all(|&d| d < opts.tol) {
                below += 1;
            } else {
                below = 0;
            }
        }
        growth.push(if record.operator_cap_active { record.sup_u / level as f64 } else { f64::NAN });
        diagnostics.levels.push(record);
        history.push((level, next.clone()));
        field = next;

        if below >= 2 {
            diagnostics.converged = true;
            if opts.stop_on_convergence {
                break;
            }
        }
        let w = opts.divergence_window;
        if w > 0 {
            diagnostics.energy_nondecreasing |=
                series.iter().any(|s| non_decreasing(s, w) && s.last().is_some_and(|&d| d >= opts.tol));
            // NaN marks levels where the truncation is inactive and breaks the run
            if non_decreasing(&growth, w) {
                diagnostics.divergence = true;
                return Err(Error::Divergence { level, diagnostics: Box::new(diagnostics) });
            }
        }
    }
    Ok(ContinuationOutcome { field, diagnostics, history })
}

/// Solve the regularized problems along `schedule`, each from the previous
/// solution, monitoring truncated-energy differences between levels.
pub fn solve_continuation(
    spec: &ProblemSpec,
    init: DiscreteField,
    schedule: &[u64],
    opts: &ContinuationOptions,
) -> Result<ContinuationOutcome> {
    run_continuation(spec, init, schedule, opts, Reaction::Direct(spec.h), spec.degeneracy())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_shape() {
        let s = default_schedule();
        assert_eq!(s.len(), 21);
        assert_eq!(s[0], 16);
        assert_eq!(*s.last().unwrap(), 1 << 24);
        assert!(validate_schedule(&[4, 4]).is_err());
        assert!(validate_schedule(&[]).is_err());
    }

    #[test]
    fn window_detection() {
        assert!(non_decreasing(&[3.0, 1.0, 1.0, 2.0, 5.0], 4));
        assert!(!non_decreasing(&[1.0, 2.0, 1.5, 3.0], 4));
        assert!(!non_decreasing(&[1.0, 2.0], 4));
        assert!(!non_decreasing(&[1.0, f64::NAN, 2.0, 3.0, 4.0], 5));
    }
}
