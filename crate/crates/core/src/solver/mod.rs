//! Radial finite-volume discretization of the regularized problems and the
//! continuation in the truncation level that approximates the singular one.

mod assemble;
mod continuation;
mod exact;
mod newton;
mod transform;

use std::fmt::Write as _;

pub use continuation::{default_schedule, solve_continuation, ContinuationOptions, ContinuationOutcome};
pub use exact::{manufactured_solution, ExactRadial, Manufactured};
pub use newton::{assemble_residual, solve_regularized, SolverOptions};
pub use transform::{transform_solve, TransformOutcome};


/// Truncation levels `k` at which continuation monitors `‖∇T_k(u_n) - ∇T_k(u_prev)‖_p`.
pub const ENERGY_LEVELS: [f64; 3] = [1.0, 10.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonStep {
    /// `‖R‖₂` after the step (the first entry is the initial residual).
    pub residual_norm: f64,
    /// Accepted step length; 0 for the initial entry.
    pub damping: f64,
}

/// Trace of one regularized solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub level: u64,
    pub steps: Vec<NewtonStep>,
    /// Final `‖R‖_∞`.
    pub residual_inf: f64,
    /// `‖Q‖_∞` of the source term at the final iterate.
    pub source_inf: f64,
    pub converged: bool,
    /// `d_k(n)` for each monitored `k`; empty at the first level.
    pub energy_diffs: Vec<f64>,
    pub sup_u: f64,
    /// Whether the operator truncation `T_n(ū)` bound anywhere.
    pub operator_cap_active: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveDiagnostics {
    pub energy_levels: Vec<f64>,
    pub levels: Vec<LevelRecord>,
    /// Continuation declared converged (or the single solve converged).
    pub converged: bool,
    /// Blow-up signal: the operator truncation stayed active with `sup u_n / n`
    /// non-decreasing over the detection window.
    pub divergence: bool,
    /// Some `d_k` was non-decreasing (and above tolerance) over the detection window.
    pub energy_nondecreasing: bool,
}

impl SolveDiagnostics {
    pub fn last(&self) -> Option<&LevelRecord> {
        self.levels.last()
    }

    pub fn newton_iterations(&self) -> usize {
        self.levels.iter().map(|l| l.steps.len().saturating_sub(1)).sum()
    }

    /// `diagnostics.csv` body: one row per Newton step, then one summary row
    /// per level with the energy differences.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# schema=1\n");
        let mut header = String::from("level,step,residual_l2,damping,residual_inf,sup_u,converged");
        for k in &self.energy_levels {
            let _ = write!(header, ",d_k{k}");
        }
        out.push_str(&header);
        out.push('\n');
        for lvl in &self.levels {
            for (i, s) in lvl.steps.iter().enumerate() {
                let _ = writeln!(out, "{},{},{:?},{:?},,,", lvl.level, i, s.residual_norm, s.damping);
            }
            let _ = write!(
                out,
                "{},final,,,{:?},{:?},{}",
                lvl.level, lvl.residual_inf, lvl.sup_u, lvl.converged
            );
            for i in 0..self.energy_levels.len() {
                match lvl.energy_diffs.get(i) {
                    Some(d) => {
                        let _ = write!(out, ",{d:?}");
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}
