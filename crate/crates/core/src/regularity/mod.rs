//! Regularity measurements on discrete fields: distribution functions,
//! Marcinkiewicz tail fits, truncated energies and entropy residuals.

mod checks;
mod entropy;
mod report;

pub use checks::{
    gradient_tail, solution_tail, EXPONENT_SLACK, LOG_DECAY_SPREAD, ZERO_POINT_SLACK,
    aux_check, bound_checks, log_decay_check, strong_singular_trace, AuxReport, BoundReport, LogDecayReport,
};
pub use entropy::{entropy_residual, EntropyResidual, TestFunction};
pub use report::{CheckRow, Report};

use crate::error::{Error, Result};
use crate::mesh::{sphere_area, DiscreteField};
use crate::scalar::trunc;

/// Minimum number of samples a tail fit accepts.
pub const MIN_FIT_SAMPLES: usize = 6;

/// `count` log-spaced levels from `lo` to `hi` inclusive.
pub fn log_levels(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

fn check_levels(levels: &[f64]) -> Result<()> {
    if levels.iter().any(|&k| !(k > 0.0) || !k.is_finite()) {
        return Err(Error::invalid("levels must be positive and finite"));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("levels must be strictly increasing"));
    }
    Ok(())
}

/// `ω ∫_a^b r^{N-1} dr` without recomputing the sphere factor.
fn shell(omega: f64, dim: f64, a: f64, b: f64) -> f64 {
    omega * (b.powf(dim) - a.powf(dim)) / dim
}

/// Sub-interval of `[a, b]` where the linear interpolant of `(ua, ub)` is `>= k`.
fn superlevel_interval(a: f64, b: f64, ua: f64, ub: f64, k: f64) -> Option<(f64, f64)> {
    match (ua >= k, ub >= k) {
        (true, true) => Some((a, b)),
        (false, false) => None,
        _ => {
            let c = a + (k - ua) / (ub - ua) * (b - a);
            if ua >= k {
                Some((a, c))
            } else {
                Some((c, b))
            }
        }
    }
}

/// `|{u >= k}|` for the piecewise-linear interpolant, with exact crossings.
pub fn distribution_function(field: &DiscreteField, levels: &[f64]) -> Result<Vec<f64>> {
    check_levels(levels)?;
    let r = field.mesh().nodes();
    let u = field.values();
    let dim = field.dim();
    let omega = sphere_area(dim);
    Ok(levels
        .iter()
        .map(|&k| {
            (0..r.len() - 1)
                .filter_map(|e| superlevel_interval(r[e], r[e + 1], u[e], u[e + 1], k))
                .map(|(a, b)| shell(omega, dim, a, b))
                .sum()
        })
        .collect())
}

/// `|{|∇u| >= λ}|` with the cell-wise difference quotient as gradient.
pub fn gradient_distribution(field: &DiscreteField, levels: &[f64]) -> Result<Vec<f64>> {
    check_levels(levels)?;
    let grads = field.gradients();
    let vols = field.mesh().element_volumes(field.dim());
    Ok(levels
        .iter()
        .map(|&l| grads.iter().zip(&vols).filter(|(d, _)| d.abs() >= l).map(|(_, v)| v).sum())
        .collect())
}

/// Which `(level, measure)` samples enter a tail fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowPolicy {
    /// Drop the smallest decade of levels and every sample whose measure is
    /// below `resolution_floor`.
    Default { resolution_floor: f64 },
    Explicit { k_min: f64, k_max: f64 },
    All,
}

impl WindowPolicy {
    /// Default policy with the floor set to the volume of the ten innermost cells.
    pub fn for_field(field: &DiscreteField) -> Self {
        let vols = field.mesh().element_volumes(field.dim());
        let floor = vols.iter().take(10).sum();
        WindowPolicy::Default { resolution_floor: floor }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    /// Decay rate `s` in `|{u > k}| ~ c k^{-s}` (reported positive).
    pub exponent: f64,
    /// Intercept of the log-log fit, `ln c`.
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Least-squares slope of `ln(measure)` against `ln(level)` on the window.
pub fn fit_tail_exponent(samples: &[(f64, f64)], policy: &WindowPolicy) -> Result<TailFit> {
    let k_first = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let keep = |&&(k, m): &&(f64, f64)| -> bool {
        if !(k > 0.0 && m > 0.0) || !k.is_finite() || !m.is_finite() {
            return false;
        }
        match *policy {
            WindowPolicy::Default { resolution_floor } => k >= 10.0 * k_first && m >= resolution_floor,
            WindowPolicy::Explicit { k_min, k_max } => k >= k_min && k <= k_max,
            WindowPolicy::All => true,
        }
    };
    let used: Vec<(f64, f64)> = samples.iter().filter(keep).map(|&(k, m)| (k.ln(), m.ln())).collect();
    if used.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{} usable samples in the fit window, need {MIN_FIT_SAMPLES}",
            used.len()
        )));
    }
    let n = used.len() as f64;
    let mx = used.iter().map(|s| s.0).sum::<f64>() / n;
    let my = used.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = used.iter().map(|s| (s.0 - mx).powi(2)).sum();
    let sxy: f64 = used.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let syy: f64 = used.iter().map(|s| (s.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all fit levels coincide".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    let lo = used.iter().map(|s| s.0).fold(f64::INFINITY, f64::min).exp();
    let hi = used.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max).exp();
    Ok(TailFit {
        exponent: -slope,
        intercept: my - slope * mx,
        r_squared,
        window: (lo, hi),
        samples: used.len(),
    })
}

/// `ω ∫ r^{N-1} |∇T_k(u)|^p dr`, counting on each cell only the exact part
/// where the interpolant lies in `(-k, k)`.
pub fn truncated_energy(field: &DiscreteField, k: f64, p: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::invalid("truncation level must be positive"));
    }
    if !(p > 1.0) {
        return Err(Error::invalid("p must exceed 1"));
    }
    let r = field.mesh().nodes();
    let u = field.values();
    let dim = field.dim();
    let omega = sphere_area(dim);
    let mut total = 0.0;
    for e in 0..r.len() - 1 {
        let (a, b) = (r[e], r[e + 1]);
        let d = (u[e + 1] - u[e]) / (b - a);
        if d == 0.0 {
            continue;
        }
        // the interpolant is in (-k, k) between these radii
        let t = |s: f64| a + (s - u[e]) / (u[e + 1] - u[e]) * (b - a);
        let (lo, hi) = {
            let x = t(trunc(k, u[e]));
            let y = t(trunc(k, u[e + 1]));
            (x.min(y).clamp(a, b), x.max(y).clamp(a, b))
        };
        if hi > lo {
            total += shell(omega, dim, lo, hi) * d.abs().powf(p);
        }
    }
    Ok(total)
}
