//! Closed-form thresholds and regularity exponents, and a classifier that
//! assembles them into a [`RegimeReport`] for one parameter set.
//!
//! Notation: `N` dimension, `p` operator growth, `θ` degeneracy of the
//! coefficient `(1+s)^{-θ(p-1)}`, `γ₁`/`γ₂` singular/decay rates of `h`, and
//! `m` the Lebesgue index of the source.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Relative slack used for every regime boundary comparison.
pub const REGIME_TOL: f64 = 1e-12;

fn tol_of(a: f64, b: f64) -> f64 {
    REGIME_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `a <= b` up to [`REGIME_TOL`]; boundary points count as inside.
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + tol_of(a, b)
}

/// `a < b` with boundary points excluded.
pub fn approx_lt(a: f64, b: f64) -> bool {
    a < b - tol_of(a, b)
}

pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= tol_of(a, b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSet {
    /// Spatial dimension; real values are admitted for threshold sweeps.
    pub dim: f64,
    pub p: f64,
    pub theta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub m: f64,
}

impl ParameterSet {
    pub fn new(dim: f64, p: f64, theta: f64, gamma1: f64, gamma2: f64, m: f64) -> Result<Self> {
        let params = ParameterSet { dim, p, theta, gamma1, gamma2, m };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.dim, self.p, self.theta, self.gamma1, self.gamma2, self.m];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("parameters must be finite"));
        }
        check_dim_p(self.dim, self.p)?;
        if self.theta < 0.0 || self.gamma1 < 0.0 || self.gamma2 < 0.0 {
            return Err(Error::invalid("theta, gamma1, gamma2 must be >= 0"));
        }
        if self.m < 1.0 {
            return Err(Error::invalid(format!("m must be >= 1, got {}", self.m)));
        }
        Ok(())
    }

    pub fn sobolev_conjugate(&self) -> f64 {
        sobolev_conjugate(self.dim, self.p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) {
        return Err(Error::invalid(format!("p must exceed 1, got {p}")));
    }
    Ok(())
}

fn check_dim_p(dim: f64, p: f64) -> Result<()> {
    check_p(p)?;
    if !(p < dim) {
        return Err(Error::invalid(format!("need 1 < p < N, got p = {p}, N = {dim}")));
    }
    Ok(())
}

/// `p* = Np/(N-p)`.
pub fn sobolev_conjugate(dim: f64, p: f64) -> f64 {
    dim * p / (dim - p)
}

/// Largest admissible degeneracy `1 + γ₂/(p-1)`.
pub fn existence_threshold(p: f64, gamma2: f64) -> Result<f64> {
    check_p(p)?;
    if !(gamma2 >= 0.0) {
        return Err(Error::invalid("gamma2 must be >= 0"));
    }
    Ok(1.0 + gamma2 / (p - 1.0))
}

/// Lower end `max(0, (γ₂-1)/(p-1))` of the Marcinkiewicz range; at or
/// below it (for `γ₂ >= 1`) solutions have finite energy.
pub fn finite_energy_theta(p: f64, gamma2: f64) -> f64 {
    ((gamma2 - 1.0) / (p - 1.0)).max(0.0)
}

/// Degeneracy below which `|∇u| ∈ M^r` with `r > 1`.
pub fn gradient_integrable_theta(dim: f64, p: f64, gamma2: f64) -> f64 {
    dim / (dim - 1.0) + (gamma2 - 1.0) / (p - 1.0)
}

/// Degeneracy below which `r > p - 1`, i.e. the flux is locally integrable
/// for merely integrable data.
pub fn flux_integrable_theta(dim: f64, p: f64, gamma2: f64) -> f64 {
    1.0 / (dim - p + 1.0) + gamma2 / (p - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarcinkiewiczExponents {
    /// `u ∈ M^t`.
    pub t: f64,
    /// `|∇u| ∈ M^r`.
    pub r: f64,
}

/// Marcinkiewicz indices for `L¹` data on
/// `max(0,(γ₂-1)/(p-1)) <= θ < 1 + γ₂/(p-1)`.
pub fn marcinkiewicz_exponents(
    dim: f64,
    p: f64,
    theta: f64,
    gamma2: f64,
) -> Result<MarcinkiewiczExponents> {
    check_dim_p(dim, p)?;
    let upper = existence_threshold(p, gamma2)?;
    let lower = finite_energy_theta(p, gamma2);
    if !approx_lt(theta, upper) {
        return Err(Error::Regime(format!(
            "theta = {theta} is not below the existence threshold {upper}; no Marcinkiewicz index"
        )));
    }
    if !approx_le(lower, theta) {
        return Err(Error::Regime(format!(
            "theta = {theta} < {lower}: finite-energy regime (gamma2 >= 1), use the energy estimate"
        )));
    }
    let mass = (p - 1.0) * (1.0 - theta) + gamma2;
    Ok(MarcinkiewiczExponents {
        t: dim * mass / (dim - p),
        r: dim * mass / (dim - theta * (p - 1.0) - 1.0 + gamma2),
    })
}

/// `Nm((p-1)(1-θ)+γ₂)/(N-mp)`: integrability power of `u` for `L^m` data.
pub fn lebesgue_solution_exponent(dim: f64, p: f64, theta: f64, gamma2: f64, m: f64) -> f64 {
    dim * m * ((p - 1.0) * (1.0 - theta) + gamma2) / (dim - m * p)
}

/// `Nm((p-1)(1-θ)+γ₂)/(N-m(θ(p-1)+1-γ₂))`: integrability power of `|∇u|`.
pub fn lebesgue_gradient_exponent(dim: f64, p: f64, theta: f64, gamma2: f64, m: f64) -> f64 {
    dim * m * ((p - 1.0) * (1.0 - theta) + gamma2)
        / (dim - m * (theta * (p - 1.0) + 1.0 - gamma2))
}

/// `max(p*/(p* - θ(p-1) - 1 + γ₂), 1)`: data index giving finite energy.
pub fn finite_energy_min_m(dim: f64, p: f64, theta: f64, gamma2: f64) -> f64 {
    let ps = sobolev_conjugate(dim, p);
    (ps / (ps - theta * (p - 1.0) - 1.0 + gamma2)).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LebesgueRegularity {
    pub sol_exp: Option<f64>,
    pub grad_exp: Option<f64>,
    pub finite_energy: bool,
    pub bounded: bool,
    pub every_lq: bool,
}

pub fn lebesgue_regularity(
    dim: f64,
    p: f64,
    theta: f64,
    gamma2: f64,
    m: f64,
) -> Result<LebesgueRegularity> {
    check_dim_p(dim, p)?;
    if !(m >= 1.0) {
        return Err(Error::invalid(format!("m must be >= 1, got {m}")));
    }
    let upper = existence_threshold(p, gamma2)?;
    if !approx_le(theta, upper) {
        return Err(Error::Regime(format!(
            "theta = {theta} exceeds the existence threshold {upper}"
        )));
    }
    let critical = approx_eq(theta, upper);
    let n_over_p = dim / p;
    let mut out = LebesgueRegularity {
        finite_energy: approx_le(finite_energy_min_m(dim, p, theta, gamma2), m),
        bounded: approx_lt(n_over_p, m),
        every_lq: critical && approx_le(n_over_p, m),
        ..Default::default()
    };
    if !critical && m > 1.0 && approx_lt(m, n_over_p) {
        out.sol_exp = Some(lebesgue_solution_exponent(dim, p, theta, gamma2, m));
        if !out.finite_energy {
            out.grad_exp = Some(lebesgue_gradient_exponent(dim, p, theta, gamma2, m));
        }
    }
    Ok(out)
}

/// Data index above which entropy solutions are unique.
pub fn uniqueness_min_m(dim: f64, p: f64, theta: f64, gamma2: f64) -> Result<f64> {
    check_dim_p(dim, p)?;
    let upper = existence_threshold(p, gamma2)?;
    if !approx_le(theta, upper) {
        return Err(Error::Regime(format!(
            "theta = {theta} exceeds the existence threshold {upper}"
        )));
    }
    let denom = (dim - p) * (gamma2 - theta * (p - 1.0)) + dim * (p - 1.0);
    assert!(denom > 0.0, "uniqueness denominator must be positive under the existence condition");
    Ok((dim * (p - 1.0) / denom).max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinIntegrability {
    pub m: f64,
    /// `true` when the bound is strict (`m > value`).
    pub strict: bool,
}

/// Data index above which entropy solutions are distributional solutions.
pub fn distributional_min_m(dim: f64, p: f64, theta: f64, gamma2: f64) -> Result<MinIntegrability> {
    check_dim_p(dim, p)?;
    let upper = existence_threshold(p, gamma2)?;
    if !approx_le(theta, upper) {
        return Err(Error::Regime(format!(
            "theta = {theta} exceeds the existence threshold {upper}"
        )));
    }
    let denom = (dim * (1.0 - theta) + 1.0 + theta * (p - 1.0)) * (p - 1.0)
        + gamma2 * (dim - p + 1.0);
    Ok(MinIntegrability {
        m: (dim * (p - 1.0) / denom).max(1.0),
        strict: approx_eq(theta, flux_integrable_theta(dim, p, gamma2)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialExponents {
    /// Power in `u = r^α - 1`.
    pub alpha: f64,
    /// `N/|α|`; `None` in the bounded case `α >= 0`.
    pub sol_tail: Option<f64>,
    /// `N/(1-α)`; `None` in the bounded case.
    pub grad_tail: Option<f64>,
    /// `u ∈ W^{1,1}_0`.
    pub w11_ok: bool,
    /// Sources `C |x|^{-(N-ε)}` lie in `L^m` for all `m` below this.
    pub f_sup_m: f64,
}

/// Exponents of the explicit radial solution for `p = 2` with source
/// `C |x|^{-(N-ε)} (1+u)^{-γ₂}`.
pub fn radial_exponents(dim: f64, theta: f64, gamma2: f64, epsilon: f64) -> Result<RadialExponents> {
    if !(dim >= 3.0) {
        return Err(Error::invalid(format!("radial example needs N >= 3, got {dim}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let denom = 1.0 - theta + gamma2;
    if denom.abs() < REGIME_TOL {
        return Err(Error::Critical(
            "theta = 1 + gamma2: the radial solution loses every Marcinkiewicz index".into(),
        ));
    }
    let alpha = (2.0 + epsilon - dim) / denom;
    let (sol_tail, grad_tail) = if alpha < 0.0 {
        (Some(dim / alpha.abs()), Some(dim / (1.0 - alpha)))
    } else {
        (None, None)
    };
    Ok(RadialExponents {
        alpha,
        sol_tail,
        grad_tail,
        w11_ok: theta < (1.0 + epsilon) / (dim - 1.0) + gamma2,
        f_sup_m: dim / (dim - epsilon),
    })
}

/// Singularity strength `γ` of `f/u^γ` below which the model problem keeps
/// finite energy: `2 + 1/(p-1)`.
pub fn finite_energy_gamma_threshold(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(2.0 + 1.0 / (p - 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub params: ParameterSet,
    pub theta_max: f64,
    pub existence_ok: bool,
    pub marc_t: Option<f64>,
    pub marc_r: Option<f64>,
    pub sol_lebesgue_exp: Option<f64>,
    pub grad_lebesgue_exp: Option<f64>,
    pub finite_energy: bool,
    pub bounded: bool,
    pub every_lq: bool,
    pub uniqueness_min_m: Option<f64>,
    pub distributional_min_m: Option<f64>,
    pub distributional_strict: bool,
    pub notes: Vec<String>,
}

impl RegimeReport {
    /// Ordered `(key, value)` pairs; absent values are empty strings.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        let ps = &self.params;
        vec![
            ("N", format!("{:?}", ps.dim)),
            ("p", format!("{:?}", ps.p)),
            ("theta", format!("{:?}", ps.theta)),
            ("gamma1", format!("{:?}", ps.gamma1)),
            ("gamma2", format!("{:?}", ps.gamma2)),
            ("m", format!("{:?}", ps.m)),
            ("theta_max", format!("{:?}", self.theta_max)),
            ("existence_ok", self.existence_ok.to_string()),
            ("marc_t", opt(self.marc_t)),
            ("marc_r", opt(self.marc_r)),
            ("sol_lebesgue_exp", opt(self.sol_lebesgue_exp)),
            ("grad_lebesgue_exp", opt(self.grad_lebesgue_exp)),
            ("finite_energy", self.finite_energy.to_string()),
            ("bounded", self.bounded.to_string()),
            ("every_lq", self.every_lq.to_string()),
            ("uniqueness_min_m", opt(self.uniqueness_min_m)),
            ("distributional_min_m", opt(self.distributional_min_m)),
            ("distributional_strict", self.distributional_strict.to_string()),
            ("notes", self.notes.join("; ")),
        ]
    }

    /// One `key=value` per line.
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

/// Evaluate every estimate that applies to `params`. Estimates whose
/// hypotheses fail leave their fields empty and add a note.
pub fn classify_regime(params: &ParameterSet) -> RegimeReport {
    let ParameterSet { dim, p, theta, gamma1, gamma2, m } = *params;
    let mut notes = Vec::new();
    let theta_max = 1.0 + gamma2 / (p - 1.0);
    let existence_ok = approx_le(theta, theta_max);
    let mut report = RegimeReport {
        params: *params,
        theta_max,
        existence_ok,
        marc_t: None,
        marc_r: None,
        sol_lebesgue_exp: None,
        grad_lebesgue_exp: None,
        finite_energy: false,
        bounded: false,
        every_lq: false,
        uniqueness_min_m: None,
        distributional_min_m: None,
        distributional_strict: false,
        notes: Vec::new(),
    };
    if let Err(e) = params.validate() {
        notes.push(format!("invalid parameters: {e}"));
        report.notes = notes;
        return report;
    }
    if !existence_ok {
        notes.push(format!(
            "theta above existence threshold {theta_max}: no prediction (nonexistence expected for large data)"
        ));
        report.notes = notes;
        return report;
    }
    notes.push("existence: entropy solution for theta <= 1 + gamma2/(p-1)".into());
    let strongly_singular = gamma1 > 1.0;
    if strongly_singular {
        notes.push(
            "gamma1 > 1: only local energy bounds; no Marcinkiewicz or Lebesgue prediction".into(),
        );
    }

    let lower = finite_energy_theta(p, gamma2);
    if !strongly_singular {
        if gamma2 >= 1.0 && approx_le(theta, lower) {
            report.finite_energy = true;
            notes.push("energy estimate (L1 data): u has finite energy".into());
        }
        if approx_eq(m, 1.0) {
            match marcinkiewicz_exponents(dim, p, theta, gamma2) {
                Ok(mx) => {
                    report.marc_t = Some(mx.t);
                    report.marc_r = Some(mx.r);
                    notes.push("marcinkiewicz estimate (L1 data): u in M^t, |grad u| in M^r".into());
                    if gamma2 >= 1.0 && approx_eq(theta, lower) {
                        notes.push(
                            "overlap: theta at the finite-energy endpoint, both estimates reported"
                                .into(),
                        );
                    }
                }
                Err(_) => {
                    if approx_eq(theta, theta_max) {
                        notes.push(
                            "critical theta with L1 data: no Marcinkiewicz regularity predicted"
                                .into(),
                        );
                    }
                }
            }
        }
        match lebesgue_regularity(dim, p, theta, gamma2, m) {
            Ok(lr) => {
                report.sol_lebesgue_exp = lr.sol_exp;
                report.grad_lebesgue_exp = lr.grad_exp;
                report.finite_energy |= lr.finite_energy;
                report.bounded = lr.bounded;
                report.every_lq = lr.every_lq;
                if lr.sol_exp.is_some() {
                    notes.push("lebesgue estimate (L^m data, 1 < m < N/p)".into());
                }
                if lr.finite_energy {
                    notes.push(format!(
                        "finite energy for m >= {:?}",
                        finite_energy_min_m(dim, p, theta, gamma2)
                    ));
                }
                if lr.bounded {
                    notes.push("boundedness estimate: m > N/p gives u in L^inf".into());
                }
                if lr.every_lq {
                    notes.push("critical theta with m >= N/p: u in W^{1,p}_0 and every L^q".into());
                }
            }
            Err(e) => notes.push(format!("lebesgue estimate unavailable: {e}")),
        }
    }

    match uniqueness_min_m(dim, p, theta, gamma2) {
        Ok(v) => {
            report.uniqueness_min_m = Some(v);
            notes.push(format!(
                "uniqueness (decreasing h, f > 0, split operator) for m >= {v:?}"
            ));
        }
        Err(e) => notes.push(format!("uniqueness condition unavailable: {e}")),
    }
    match distributional_min_m(dim, p, theta, gamma2) {
        Ok(d) => {
            report.distributional_min_m = Some(d.m);
            report.distributional_strict = d.strict;
            let rel = if d.strict { ">" } else { ">=" };
            notes.push(format!("distributional solution for m {rel} {:?}", d.m));
        }
        Err(e) => notes.push(format!("distributional condition unavailable: {e}")),
    }
    report.notes = notes;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn existence_threshold_values() {
        assert_eq!(existence_threshold(2.0, 0.0).unwrap(), 1.0);
        assert_eq!(existence_threshold(2.0, 1.0).unwrap(), 2.0);
        assert_eq!(existence_threshold(1.5, 1.0).unwrap(), 3.0);
        assert!(existence_threshold(1.0, 1.0).is_err());
    }

    #[test]
    fn marcinkiewicz_values() {
        let e = marcinkiewicz_exponents(3.0, 2.0, 0.0, 0.0).unwrap();
        assert!(close(e.t, 3.0) && close(e.r, 1.5));
        let e = marcinkiewicz_exponents(3.0, 2.0, 0.5, 0.5).unwrap();
        assert!(close(e.t, 3.0) && close(e.r, 1.5));
        let e = marcinkiewicz_exponents(4.0, 2.0, 0.5, 0.0).unwrap();
        assert!(close(e.t, 1.0) && close(e.r, 0.8));
        // below the lower end with gamma2 >= 1: finite energy regime
        assert!(matches!(
            marcinkiewicz_exponents(3.0, 2.0, 0.5, 2.0),
            Err(Error::Regime(_))
        ));
        assert!(matches!(
            marcinkiewicz_exponents(3.0, 2.0, 1.5, 0.5),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn lebesgue_values() {
        let lr = lebesgue_regularity(3.0, 2.0, 0.0, 0.0, 6.0 / 5.0).unwrap();
        assert!(lr.finite_energy);
        let lr = lebesgue_regularity(3.0, 2.0, 0.5, 0.5, 1.0 + 1e-9).unwrap();
        assert!((lr.sol_exp.unwrap() - 3.0).abs() < 1e-7);
        assert!((lr.grad_exp.unwrap() - 1.5).abs() < 1e-7);
        let lr = lebesgue_regularity(3.0, 2.0, 1.5, 0.5, 1.5).unwrap();
        assert!(lr.every_lq && lr.finite_energy && !lr.bounded);
        let lr = lebesgue_regularity(3.0, 2.0, 1.5, 0.5, 2.0).unwrap();
        assert!(lr.bounded);
        assert!(matches!(
            lebesgue_regularity(3.0, 2.0, 1.6, 0.5, 2.0),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn uniqueness_values() {
        assert!(close(uniqueness_min_m(3.0, 2.0, 1.0, 0.0).unwrap(), 1.5));
        assert_eq!(uniqueness_min_m(3.0, 2.0, 0.25, 0.5).unwrap(), 1.0);
        assert!(close(uniqueness_min_m(3.0, 2.0, 1.5, 0.5).unwrap(), 1.5));
    }

    #[test]
    fn distributional_values() {
        let d = distributional_min_m(3.0, 2.0, 0.0, 0.0).unwrap();
        assert_eq!((d.m, d.strict), (1.0, false));
        let d = distributional_min_m(3.0, 2.0, 0.5, 0.0).unwrap();
        assert_eq!((d.m, d.strict), (1.0, true));
        let d = distributional_min_m(3.0, 2.0, 1.0, 0.0).unwrap();
        assert!(close(d.m, 1.5) && !d.strict);
    }

    #[test]
    fn radial_values() {
        let r = radial_exponents(3.0, 0.5, 0.5, 0.5).unwrap();
        assert!(close(r.alpha, -0.5));
        assert!(r.w11_ok);
        assert!(close(r.sol_tail.unwrap(), 6.0));
        assert!(close(r.grad_tail.unwrap(), 2.0));
        assert!(close(r.f_sup_m, 3.0 / 2.5));
        assert!(matches!(radial_exponents(3.0, 1.5, 0.5, 0.5), Err(Error::Critical(_))));
        let bounded = radial_exponents(3.0, 0.5, 0.5, 1.5).unwrap();
        assert!(bounded.alpha > 0.0 && bounded.sol_tail.is_none());
    }

    #[test]
    fn gamma_threshold_values() {
        assert_eq!(finite_energy_gamma_threshold(2.0).unwrap(), 3.0);
        assert_eq!(finite_energy_gamma_threshold(1.5).unwrap(), 4.0);
        assert!((finite_energy_gamma_threshold(1e9).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn classify_examples() {
        let r = classify_regime(&ParameterSet::new(3.0, 2.0, 0.0, 0.5, 0.0, 1.0).unwrap());
        assert!(r.existence_ok);
        assert!(close(r.marc_t.unwrap(), 3.0) && close(r.marc_r.unwrap(), 1.5));
        assert_eq!(r.uniqueness_min_m, Some(1.0));
        assert!(!r.finite_energy && !r.bounded);

        let r = classify_regime(&ParameterSet::new(3.0, 2.0, 2.0, 0.5, 0.0, 1.0).unwrap());
        assert!(!r.existence_ok && r.marc_t.is_none() && r.uniqueness_min_m.is_none());

        let r = classify_regime(&ParameterSet::new(3.0, 2.0, 1.5, 0.5, 0.5, 2.0).unwrap());
        assert!(r.bounded && r.finite_energy && r.marc_t.is_none());

        let r = classify_regime(&ParameterSet::new(3.0, 2.0, 0.5, 2.0, 0.5, 1.0).unwrap());
        assert!(r.marc_t.is_none() && r.uniqueness_min_m.is_some());
    }

    #[test]
    fn overlap_reports_both() {
        // gamma2 = 2, p = 2: lower end theta = 1
        let r = classify_regime(&ParameterSet::new(3.0, 2.0, 1.0, 0.0, 2.0, 1.0).unwrap());
        assert!(r.finite_energy && r.marc_t.is_some());
        assert!(r.notes.iter().any(|n| n.starts_with("overlap")));
    }

    #[test]
    fn record_is_key_value_lines() {
        let r = classify_regime(&ParameterSet::new(3.0, 2.0, 0.0, 0.5, 0.0, 1.0).unwrap());
        let rec = r.to_record();
        assert!(rec.lines().all(|l| l.contains('=')));
        assert!(rec.contains("marc_t=3.0\n"));
    }

    fn admissible() -> impl Strategy<Value = (f64, f64, f64, f64)> {
        (2.0f64..8.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..3.0).prop_map(|(dim, pf, tf, g2)| {
            let p = 1.0 + 1e-3 + pf * (dim - 1.0 - 2e-3);
            let lo = finite_energy_theta(p, g2);
            let hi = 1.0 + g2 / (p - 1.0);
            (dim, p, lo + tf * (hi - lo) * 0.999, g2)
        })
    }

    proptest! {
        #[test]
        fn lebesgue_exponents_continuous_at_m_one((dim, p, theta, g2) in admissible()) {
            let mx = marcinkiewicz_exponents(dim, p, theta, g2).unwrap();
            let m = 1.0 + 1e-11;
            let s = lebesgue_solution_exponent(dim, p, theta, g2, m);
            let g = lebesgue_gradient_exponent(dim, p, theta, g2, m);
            prop_assert!((s - mx.t).abs() < 1e-6 * mx.t);
            prop_assert!((g - mx.r).abs() < 1e-6 * mx.r);
            prop_assert!(mx.t > 0.0 && mx.r > 0.0);
        }

        #[test]
        fn lebesgue_exponents_vanish_at_threshold(dim in 3.0f64..8.0, p in 1.1f64..2.9, g2 in 0.0f64..2.0, mf in 0.0f64..1.0) {
            let hi = 1.0 + g2 / (p - 1.0);
            let m = 1.0 + mf * (dim / p - 1.0) * 0.9;
            let theta = hi - 1e-9;
            prop_assert!(lebesgue_solution_exponent(dim, p, theta, g2, m) < 1e-6);
            prop_assert!(lebesgue_gradient_exponent(dim, p, theta, g2, m).abs() < 1e-6);
        }

        #[test]
        fn remark_equivalences((dim, p, theta, g2) in admissible()) {
            let mx = marcinkiewicz_exponents(dim, p, theta, g2).unwrap();
            let a = gradient_integrable_theta(dim, p, g2);
            let b = flux_integrable_theta(dim, p, g2);
            if (theta - a).abs() > 1e-9 {
                prop_assert_eq!(mx.r > 1.0, theta < a);
            }
            if (theta - b).abs() > 1e-9 {
                prop_assert_eq!(mx.r > p - 1.0, theta < b);
            }
        }

        #[test]
        fn threshold_ordering(dim in 2.0f64..10.0, pf in 0.001f64..0.999, g2 in 0.0f64..4.0) {
            let p = 1.0 + pf * (dim - 1.0);
            let lo = finite_energy_theta(p, g2);
            let hi = 1.0 + g2 / (p - 1.0);
            let a = gradient_integrable_theta(dim, p, g2);
            let b = flux_integrable_theta(dim, p, g2);
            // the lower end of the gradient chain needs a > 0, i.e. p > 2 - 1/N when gamma2 = 0
            prop_assert!(a < hi);
            prop_assert_eq!(lo < a, a > 0.0);
            prop_assert!(lo < b && b < hi);
        }

        #[test]
        fn uniqueness_improves_on_constant_h(dim in 2.0f64..10.0, theta in 0.0f64..0.999) {
            let ours = uniqueness_min_m(dim, 2.0 + 0.0, theta, 0.0);
            if dim > 2.0 {
                let ours = ours.unwrap();
                let classical = dim * (2.0 - theta) / (2.0 + dim * (1.0 - theta));
                prop_assert!(ours <= classical.max(1.0) + 1e-12);
                prop_assert!((ours - (dim / (dim - theta * (dim - 2.0))).max(1.0)).abs() < 1e-14);
            }
        }

        #[test]
        fn uniqueness_is_one_iff_theta_small(dim in 3.0f64..8.0, p in 1.1f64..2.9, g2 in 0.0f64..2.0, tf in 0.0f64..1.0) {
            let hi = 1.0 + g2 / (p - 1.0);
            let theta = tf * hi;
            let u = uniqueness_min_m(dim, p, theta, g2).unwrap();
            if theta <= g2 / (p - 1.0) {
                prop_assert_eq!(u, 1.0);
            } else {
                prop_assert!(u >= 1.0);
            }
        }
    }
}
