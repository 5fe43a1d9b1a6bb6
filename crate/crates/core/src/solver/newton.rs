use crate::error::{Error, Result};
use crate::mesh::DiscreteField;
use crate::problem::ProblemSpec;

use super::assemble::{Discretization, Reaction};
use super::{LevelRecord, NewtonStep, SolveDiagnostics};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop when `‖R‖_∞ <= tol (1 + ‖Q‖_∞)` and the Newton step is below `step_tol`.
    pub tol: f64,
    pub step_tol: f64,
    pub max_iterations: usize,
    pub min_damping: f64,
    /// `δ_p` in `(D² + δ_p²)^{(p-2)/2} D`; unused for `p = 2`.
    pub flux_eps: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-11,
            step_tol: 1e-10,
            max_iterations: 200,
            min_damping: (2.0f64).powi(-30),
            flux_eps: 1e-10,
        }
    }
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn norm_l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Finite-volume residual of the level-`n` problem at `field`, one entry per
/// unknown node.
pub fn assemble_residual(spec: &ProblemSpec, n_reg: u64, field: &DiscreteField) -> Result<Vec<f64>> {
    spec.validate()?;
    if n_reg == 0 {
        return Err(Error::invalid("regularization level must be >= 1"));
    }
    let disc = Discretization::new(spec, field, Reaction::Direct(spec.h), spec.degeneracy(), 0.0);
    let n = n_reg as f64;
    let s = disc.moments(spec, field, n);
    Ok(disc.residual(n, field.values(), &s)?.0)
}

/// Damped Newton for the level-`n` problem starting from `init`.
pub fn solve_regularized(
    spec: &ProblemSpec,
    n_reg: u64,
    init: DiscreteField,
    opts: &SolverOptions,
) -> Result<(DiscreteField, SolveDiagnostics)> {
    spec.validate()?;
    if n_reg == 0 {
        return Err(Error::invalid("regularization level must be >= 1"));
    }
    let disc = Discretization::new(spec, &init, Reaction::Direct(spec.h), spec.degeneracy(), opts.flux_eps);
    let (field, record) = newton(&disc, spec, n_reg, init, opts)?;
    let diagnostics = SolveDiagnostics {
        energy_levels: Vec::new(),
        converged: record.converged,
        levels: vec![record],
        ..Default::default()
    };
    Ok((field, diagnostics))
}

fn non_convergence(level: u64, reason: String, record: LevelRecord) -> Error {
    Error::NonConvergence {
        level,
        reason,
        diagnostics: Box::new(SolveDiagnostics {
            levels: vec![record],
            ..Default::default()
        }),
    }
}

pub(crate) fn newton(
    disc: &Discretization,
    spec: &ProblemSpec,
    level: u64,
    init: DiscreteField,
    opts: &SolverOptions,
) -> Result<(DiscreteField, LevelRecord)> {
    let n = level as f64;
    let s = disc.moments(spec, &init, n);
    let mut field = init;
    let first = disc.first();
    let last = disc.last();
    {
        let u = field.values_mut();
        for v in u.iter_mut() {
            *v = v.max(0.0);
        }
        let end = u.len() - 1;
        u[end] = 0.0;
        if first == 1 {
            u[0] = 0.0;
        }
    }
    let mut u = field.values().to_vec();
    let (mut res, mut q) = disc.residual(n, &u, &s)?;
    let mut norm2 = norm_l2(&res);
    let mut record = LevelRecord {
        level,
        steps: vec![NewtonStep { residual_norm: norm2, damping: 0.0 }],
        residual_inf: norm_inf(&res),
        source_inf: norm_inf(&q),
        converged: false,
        energy_diffs: Vec::new(),
        sup_u: 0.0,
        operator_cap_active: false,
    };

    let mut converged = false;
    for _ in 0..opts.max_iterations {
        let res_ok = norm_inf(&res) <= opts.tol * (1.0 + norm_inf(&q));
        let jac = disc.jacobian(n, &u, &s);
        let rhs: Vec<f64> = res.iter().map(|x| -x).collect();
        let delta = match jac.solve(&rhs) {
            Ok(d) => d,
            Err(e) => {
                if res_ok {
                    converged = true;
                    break;
                }
                return Err(e);
            }
        };
        let sup = u.iter().fold(0.0f64, |m, x| m.max(*x));
        let small_step = norm_inf(&delta) <= opts.step_tol * (1.0 + sup);

        // fraction to the boundary of the nonnegative cone
        let mut t_max = f64::INFINITY;
        for (k, d) in delta.iter().enumerate() {
            if *d < 0.0 {
                t_max = t_max.min(u[first + k] / -d);
            }
        }
        let mut t = if t_max >= 1.0 {
            1.0
        } else if 0.995 * t_max >= opts.min_damping * 1024.0 {
            0.995 * t_max
        } else {
            1.0
        };

        let mut accepted = None;
        while t >= opts.min_damping {
            let mut trial = u.clone();
            for (k, d) in delta.iter().enumerate() {
                trial[first + k] = (u[first + k] + t * d).max(0.0);
            }
            let (rt, qt) = disc.residual(n, &trial, &s)?;
            let nt = norm_l2(&rt);
            // inside the tolerance band round-off can mask descent; keep the step if it stays there
            let in_band = res_ok && norm_inf(&rt) <= opts.tol * (1.0 + norm_inf(&qt));
            if nt <= (1.0 - 1e-4 * t) * norm2 || (small_step && nt <= norm2) || in_band {
                accepted = Some((trial, rt, qt, nt));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, rt, qt, nt)) => {
                u = trial;
                res = rt;
                q = qt;
                norm2 = nt;
                record.steps.push(NewtonStep { residual_norm: nt, damping: t });
                if small_step && norm_inf(&res) <= opts.tol * (1.0 + norm_inf(&q)) {
                    converged = true;
                    break;
                }
            }
            None => {
                if res_ok {
                    // stagnation at round-off level
                    converged = true;
                    break;
                }
                record.residual_inf = norm_inf(&res);
                record.source_inf = norm_inf(&q);
                return Err(non_convergence(
                    level,
                    format!("line search failed with residual {:e}", norm_inf(&res)),
                    record,
                ));
            }
        }
    }
    record.residual_inf = norm_inf(&res);
    record.source_inf = norm_inf(&q);
    record.sup_u = u.iter().fold(0.0f64, |m, x| m.max(*x));
    record.operator_cap_active = u[..=last].windows(2).any(|w| 0.5 * (w[0] + w[1]) > n);
    if !converged {
        return Err(non_convergence(
            level,
            format!("no convergence after {} iterations", opts.max_iterations),
            record,
        ));
    }
    record.converged = true;
    field.values_mut().copy_from_slice(&u);
    Ok((field, record))
}
