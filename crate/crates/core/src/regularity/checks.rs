use crate::error::{Error, Result};
use crate::mesh::DiscreteField;
use crate::problem::ProblemSpec;
use crate::scalar::trunc;

use super::{
    distribution_function, fit_tail_exponent, gradient_distribution, log_levels, truncated_energy, TailFit,
    WindowPolicy,
};

/// Relative slack on one-sided exponent checks.
pub const EXPONENT_SLACK: f64 = 0.1;

/// Tail fit of `|{u >= k}|` over `k ∈ [1, sup u]` with the default window.
pub fn solution_tail(field: &DiscreteField) -> Result<TailFit> {
    let sup = field.max();
    if !(sup > 10.0) {
        return Err(Error::InsufficientData(format!("sup u = {sup} leaves no tail to fit")));
    }
    let levels = log_levels(1.0, sup, 40);
    let m = distribution_function(field, &levels)?;
    let pairs: Vec<_> = levels.into_iter().zip(m).collect();
    fit_tail_exponent(&pairs, &WindowPolicy::for_field(field))
}

/// Tail fit of `|{|∇u| >= λ}|` between the smallest and largest nonzero cell slope.
pub fn gradient_tail(field: &DiscreteField) -> Result<TailFit> {
    let slopes: Vec<f64> = field.gradients().iter().map(|d| d.abs()).filter(|d| *d > 0.0).collect();
    let dmax = slopes.iter().copied().fold(0.0f64, f64::max);
    let dmin = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    if !(dmax > dmin) {
        return Err(Error::InsufficientData("field has no gradient range".into()));
    }
    let levels = log_levels(dmin.max(dmax * 1e-12), dmax, 40);
    let m = gradient_distribution(field, &levels)?;
    let pairs: Vec<_> = levels.into_iter().zip(m).collect();
    fit_tail_exponent(&pairs, &WindowPolicy::for_field(field))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxReport {
    /// Growth exponent of `k ↦ ∫|∇T_k u|^p`.
    pub eta: f64,
    pub solution_bound: f64,
    pub gradient_bound: f64,
    pub solution_fit: TailFit,
    pub gradient_fit: TailFit,
    pub pass: bool,
}

/// Fit `η` from truncated-energy growth, then test the tails against
/// `N(p-η)/(N-p)` and `N(p-η)/(N-η)` with 10% slack.
pub fn aux_check(field: &DiscreteField, p: f64) -> Result<AuxReport> {
    let dim = field.dim();
    let sup = field.max();
    if !(sup > 20.0) {
        return Err(Error::NotApplicable(format!(
            "sup u = {sup}: truncated energy saturates, no growth exponent"
        )));
    }
    let levels = log_levels(1.0, (0.5 * sup).min(1e3), 12);
    let pairs: Vec<(f64, f64)> = levels
        .iter()
        .map(|&k| Ok((k, truncated_energy(field, k, p)?)))
        .collect::<Result<_>>()?;
    let eta = -fit_tail_exponent(&pairs, &WindowPolicy::All)?.exponent;
    if !(eta < p) {
        return Err(Error::NotApplicable(format!("fitted eta = {eta} is not below p")));
    }
    let solution_bound = dim * (p - eta) / (dim - p);
    let gradient_bound = dim * (p - eta) / (dim - eta);
    let solution_fit = solution_tail(field)?;
    let gradient_fit = gradient_tail(field)?;
    let pass = solution_fit.exponent >= solution_bound * (1.0 - EXPONENT_SLACK)
        && gradient_fit.exponent >= gradient_bound * (1.0 - EXPONENT_SLACK);
    Ok(AuxReport { eta, solution_bound, gradient_bound, solution_fit, gradient_fit, pass })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub sup_u: f64,
    /// `s̄` for the vanishing variant of `h`; `None` in the `m > N/p` regime.
    pub bound: Option<f64>,
    pub pass: bool,
}

/// Absolute slack on the `u <= s̄` check.
pub const ZERO_POINT_SLACK: f64 = 1e-8;

/// `sup u <= s̄` for the vanishing variant of `h`, or a finite `sup u` when
/// the source lies in `L^m` with `m > N/p`.
pub fn bound_checks(field: &DiscreteField, spec: &ProblemSpec) -> Result<BoundReport> {
    let sup_u = field.max();
    if spec.source.amplitude == 0.0 {
        return Ok(BoundReport { sup_u, bound: None, pass: sup_u == 0.0 });
    }
    if let Some(zero) = spec.h.zero_point {
        return Ok(BoundReport { sup_u, bound: Some(zero), pass: sup_u <= zero + ZERO_POINT_SLACK });
    }
    if spec.source.singularity < spec.p {
        return Ok(BoundReport { sup_u, bound: None, pass: sup_u.is_finite() });
    }
    Err(Error::NotApplicable(format!(
        "h has no zero and f = A r^-{} is not in L^m for any m > N/p",
        spec.source.singularity
    )))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogDecayReport {
    /// `N(p-1)/(N-p)`.
    pub power: f64,
    /// `(n, c_n)` with `c_n = max_k |{u_n >= k}| ln(1+k)^power`.
    pub constants: Vec<(u64, f64)>,
    /// `(max - min)/max` of `c_n` over the last three levels.
    pub spread: f64,
    pub pass: bool,
}

/// Relative spread allowed for the fitted constant over the last three levels.
pub const LOG_DECAY_SPREAD: f64 = 0.1;

/// Fit the smallest `c` with `|{u_n >= k}| <= c / ln(1+k)^{N(p-1)/(N-p)}` at
/// each level and check that it stays bounded along the continuation.
pub fn log_decay_check(history: &[(u64, DiscreteField)], spec: &ProblemSpec, levels: &[f64]) -> Result<LogDecayReport> {
    if history.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} continuation levels, need at least 3",
            history.len()
        )));
    }
    let power = spec.dim * (spec.p - 1.0) / (spec.dim - spec.p);
    let constants: Vec<(u64, f64)> = history
        .iter()
        .map(|(n, f)| {
            let m = distribution_function(f, levels)?;
            let c = levels
                .iter()
                .zip(m)
                .map(|(&k, m)| m * k.ln_1p().powf(power))
                .fold(0.0, f64::max);
            Ok((*n, c))
        })
        .collect::<Result<_>>()?;
    let tail = &constants[constants.len() - 3..];
    let hi = tail.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let spread = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    let pass = hi.is_finite() && spread <= LOG_DECAY_SPREAD;
    Ok(LogDecayReport { power, constants, spread, pass })
}

/// `ω ∫ r^{N-1} |∇ T_k(u)^q|^p dr` with `q = (γ₁ - 1 + p)/p`.
pub fn strong_singular_trace(field: &DiscreteField, spec: &ProblemSpec, k: f64) -> Result<f64> {
    let g1 = spec.h.gamma1;
    if !(g1 > 1.0) {
        return Err(Error::NotApplicable(format!("gamma1 = {g1} <= 1")));
    }
    if !(k > 0.0) {
        return Err(Error::invalid("truncation level must be positive"));
    }
    let p = spec.p;
    let q = (g1 - 1.0 + p) / p;
    let r = field.mesh().nodes();
    let v: Vec<f64> = field.values().iter().map(|&u| trunc(k, u.max(0.0)).powf(q)).collect();
    let vols = field.mesh().element_volumes(field.dim());
    Ok((0..vols.len())
        .map(|e| vols[e] * ((v[e + 1] - v[e]) / (r[e + 1] - r[e])).abs().powf(p))
        .sum())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::RadialMesh;
    use crate::problem::SourceSpec;
    use crate::scalar::HModel;

    #[test]
    fn p_harmonic_field_meets_bounds_nearly_sharply() {
        // u = 1/r - 1 in R³: |{u >= k}| ~ k^-3, |{|∇u| >= λ}| ~ λ^-3/2, η = 1
        let mesh = Arc::new(RadialMesh::build(4096, 3.0, 0.0).unwrap());
        let r1 = mesh.nodes()[1];
        let f = DiscreteField::from_fn(mesh, 3.0, |r| 1.0 / r.max(r1) - 1.0).unwrap();
        let rep = aux_check(&f, 2.0).unwrap();
        assert!((rep.eta - 1.0).abs() < 0.1, "{rep:?}");
        assert!(rep.pass, "{rep:?}");
        assert!((rep.solution_fit.exponent - 3.0).abs() < 0.3, "{rep:?}");
        assert!((rep.gradient_fit.exponent - 1.5).abs() < 0.15, "{rep:?}");
    }

    #[test]
    fn bounded_field_not_applicable() {
        let mesh = Arc::new(RadialMesh::build(64, 1.0, 0.0).unwrap());
        let f = DiscreteField::from_fn(mesh, 3.0, |r| 1.0 - r * r).unwrap();
        assert!(matches!(aux_check(&f, 2.0), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn bound_check_regimes() {
        let mesh = Arc::new(RadialMesh::build(16, 1.0, 0.0).unwrap());
        let f = DiscreteField::from_fn(mesh.clone(), 3.0, |r| 2.0 * (1.0 - r)).unwrap();
        let mut spec = ProblemSpec {
            dim: 3.0,
            p: 2.0,
            theta: 3.0,
            h: HModel::with_zero(0.5, 1.0, 2.0).unwrap(),
            source: SourceSpec::constant(10.0),
            r_in: 0.0,
        };
        let rep = bound_checks(&f, &spec).unwrap();
        assert!(rep.pass && rep.bound == Some(2.0));
        spec.h = HModel::new(0.5, 0.5, 1.0).unwrap();
        spec.source = SourceSpec::new(1.0, 2.5).unwrap();
        assert!(matches!(bound_checks(&f, &spec), Err(Error::NotApplicable(_))));
        spec.source.amplitude = 0.0;
        let zero = DiscreteField::zeros(mesh, 3.0);
        assert!(bound_checks(&zero, &spec).unwrap().pass);
    }

    #[test]
    fn strong_singular_power() {
        let mesh = Arc::new(RadialMesh::build(64, 1.0, 0.0).unwrap());
        let f = DiscreteField::from_fn(mesh, 3.0, |r| 1.0 - r * r).unwrap();
        let mut spec = ProblemSpec {
            dim: 3.0,
            p: 2.0,
            theta: 0.0,
            h: HModel::new(1.0, 0.0, 1.0).unwrap(),
            source: SourceSpec::constant(1.0),
            r_in: 0.0,
        };
        assert!(matches!(strong_singular_trace(&f, &spec, 1.0), Err(Error::NotApplicable(_))));
        // γ₁ → 1⁺ recovers the plain truncated energy
        spec.h.gamma1 = 1.0 + 1e-12;
        let e = strong_singular_trace(&f, &spec, 2.0).unwrap();
        let plain = super::super::truncated_energy(&f, 2.0, 2.0).unwrap();
        assert!((e - plain).abs() < 1e-9 * plain);
    }

    #[test]
    fn log_decay_needs_three_levels() {
        let mesh = Arc::new(RadialMesh::build(16, 1.0, 0.0).unwrap());
        let f = DiscreteField::from_fn(mesh, 3.0, |r| 1.0 - r).unwrap();
        let spec = crate::solver::ExactRadial::reference().problem_spec();
        let hist = vec![(1, f.clone()), (2, f.clone())];
        assert!(matches!(log_decay_check(&hist, &spec, &[0.5]), Err(Error::InsufficientData(_))));
        let hist = vec![(1, f.clone()), (2, f.clone()), (3, f)];
        let rep = log_decay_check(&hist, &spec, &[0.1, 0.5, 2.0]).unwrap();
        assert!(rep.pass && rep.spread == 0.0);
    }
}
