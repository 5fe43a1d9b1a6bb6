//! Scalar building blocks: truncations, the singular nonlinearity `h` and its
//! level-`n` regularization, the change of variable `Φ`, and the weight `H`
//! used in the boundedness argument.

use crate::error::{Error, Result};

/// Below this distance from 1 the power-law primitives switch to their
/// logarithmic limit.
pub const LOG_BRANCH_EPS: f64 = 1e-10;

/// `T_k(s) = max(-k, min(s, k))`.
#[inline]
pub fn trunc(k: f64, s: f64) -> f64 {
    s.clamp(-k, k)
}

/// `G_k(s) = (|s| - k)^+ sign(s)`, so that `T_k + G_k` is the identity.
#[inline]
pub fn remainder(k: f64, s: f64) -> f64 {
    let excess = (s.abs() - k).max(0.0);
    if s < 0.0 {
        -excess
    } else {
        excess
    }
}

/// Plateau cutoff: 1 on `|s| <= k`, linear down to 0 on `k < |s| < 2k`.
#[inline]
pub fn plateau(k: f64, s: f64) -> f64 {
    let a = s.abs();
    if a <= k {
        1.0
    } else if a < 2.0 * k {
        (2.0 * k - a) / k
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationKind {
    T,
    G,
    V,
}

/// Checked entry point for the three cutoff families.
pub fn truncation_family(kind: TruncationKind, k: f64, s: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::invalid(format!("truncation level must be positive, got {k}")));
    }
    Ok(match kind {
        TruncationKind::T => trunc(k, s),
        TruncationKind::G => remainder(k, s),
        TruncationKind::V => plateau(k, s),
    })
}

/// Singular nonlinearity `h`, blowing up like `s^{-γ₁}` at the origin and
/// decaying like `s^{-γ₂}` at infinity.
///
/// The base family is `c_h (1+s)^{γ₁-γ₂} s^{-γ₁}`. With `zero_point = Some(s̄)`
/// it is replaced by `c_h s^{-γ₁} max(0, 1 - s/s̄)`, which vanishes for `s >= s̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HModel {
    pub gamma1: f64,
    pub gamma2: f64,
    pub scale: f64,
    pub zero_point: Option<f64>,
}

impl HModel {
    pub fn new(gamma1: f64, gamma2: f64, scale: f64) -> Result<Self> {
        let model = HModel { gamma1, gamma2, scale, zero_point: None };
        model.validate()?;
        Ok(model)
    }

    pub fn with_zero(gamma1: f64, scale: f64, zero_point: f64) -> Result<Self> {
        let model = HModel { gamma1, gamma2: 0.0, scale, zero_point: Some(zero_point) };
        model.validate()?;
        Ok(model)
    }

    /// `h ≡ c`.
    pub fn constant(scale: f64) -> Self {
        HModel { gamma1: 0.0, gamma2: 0.0, scale, zero_point: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma1 >= 0.0) || !(self.gamma2 >= 0.0) {
            return Err(Error::invalid("h exponents gamma1, gamma2 must be >= 0"));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::invalid("h scale must be positive and finite"));
        }
        if let Some(z) = self.zero_point {
            if !(z > 0.0) || !z.is_finite() {
                return Err(Error::invalid("h zero point must be positive and finite"));
            }
        }
        Ok(())
    }

    /// Reporting constant `s₁` of the small-`s` envelope.
    pub fn s1(&self) -> f64 {
        0.5
    }

    /// Reporting constant `s₂` of the large-`s` envelope.
    pub fn s2(&self) -> f64 {
        2.0
    }

    pub fn is_bounded(&self) -> bool {
        self.gamma1 == 0.0
    }

    /// Extended-real evaluation on `s >= 0`; returns `+∞` at the origin when
    /// `γ₁ > 0`. Negative arguments are treated as the origin.
    pub fn eval(&self, s: f64) -> f64 {
        let s = s.max(0.0);
        match self.zero_point {
            Some(zero) => {
                if s >= zero {
                    0.0
                } else if s == 0.0 {
                    if self.gamma1 > 0.0 {
                        f64::INFINITY
                    } else {
                        self.scale
                    }
                } else {
                    self.scale * s.powf(-self.gamma1) * (1.0 - s / zero)
                }
            }
            None => {
                if s == 0.0 {
                    return if self.gamma1 > 0.0 { f64::INFINITY } else { self.scale };
                }
                self.scale * (1.0 + s).powf(self.gamma1 - self.gamma2) * s.powf(-self.gamma1)
            }
        }
    }

    /// `dh/ds` on `s > 0` (and on `s = 0` when `h` is finite there).
    pub fn derivative(&self, s: f64) -> f64 {
        let s = s.max(0.0);
        match self.zero_point {
            Some(zero) => {
                if s >= zero {
                    0.0
                } else if s == 0.0 {
                    if self.gamma1 > 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        -self.scale / zero
                    }
                } else {
                    let pw = s.powf(-self.gamma1);
                    self.scale * (-self.gamma1 * pw / s * (1.0 - s / zero) - pw / zero)
                }
            }
            None => {
                if s == 0.0 {
                    return if self.gamma1 > 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        -self.gamma2 * self.scale
                    };
                }
                let a = self.gamma1 - self.gamma2;
                self.eval(s) * (a / (1.0 + s) - self.gamma1 / s)
            }
        }
    }

    /// Level-`n` regularization `h_n = T_n(h)` on `s >= 0` and
    /// `min(n, h(0))` on `s < 0`.
    pub fn truncated(&self, n: f64, s: f64) -> f64 {
        if s < 0.0 {
            return self.eval(0.0).min(n);
        }
        self.eval(s).min(n)
    }

    /// Derivative of [`HModel::truncated`]; zero wherever the cap is active.
    pub fn truncated_derivative(&self, n: f64, s: f64) -> f64 {
        if s < 0.0 || self.eval(s) >= n {
            return 0.0;
        }
        self.derivative(s)
    }
}

/// Checked version of [`HModel::truncated`] with an integer level.
pub fn h_truncated(model: &HModel, n: u64, s: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("regularization level must be >= 1"));
    }
    Ok(model.truncated(n as f64, s))
}

fn near_one(x: f64) -> bool {
    (x - 1.0).abs() < LOG_BRANCH_EPS
}

/// `∫₀^s (1+t)^{-q} dt` for `s >= 0`.
fn power_primitive(q: f64, s: f64) -> f64 {
    if near_one(q) {
        s.ln_1p()
    } else {
        let a = 1.0 - q;
        (a * s.ln_1p()).exp_m1() / a
    }
}

/// `Φ(u) = ∫₀^u (1+t)^{-θ} dt`.
pub fn phi_forward(theta: f64, u: f64) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(Error::invalid("theta must be >= 0"));
    }
    if !(u >= 0.0) {
        return Err(Error::invalid(format!("phi_forward needs u >= 0, got {u}")));
    }
    Ok(power_primitive(theta, u))
}

/// Supremum of `Φ` over `[0, ∞)`: finite only for `θ > 1`.
pub fn phi_range_limit(theta: f64) -> f64 {
    if theta > 1.0 && !near_one(theta) {
        1.0 / (theta - 1.0)
    } else {
        f64::INFINITY
    }
}

/// Exact inverse of [`phi_forward`].
pub fn phi_inverse(theta: f64, v: f64) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(Error::invalid("theta must be >= 0"));
    }
    if !(v >= 0.0) {
        return Err(Error::invalid(format!("phi_inverse needs v >= 0, got {v}")));
    }
    if v >= phi_range_limit(theta) {
        return Err(Error::invalid(format!(
            "v = {v} outside the range of phi for theta = {theta}"
        )));
    }
    Ok(phi_inverse_saturating(theta, v))
}

/// Inverse of `Φ` that returns `+∞` past the top of the range and treats
/// negative arguments as 0. Used inside Newton iterations.
pub(crate) fn phi_inverse_saturating(theta: f64, v: f64) -> f64 {
    let v = v.max(0.0);
    if near_one(theta) {
        return v.exp_m1();
    }
    let a = 1.0 - theta;
    let inner = a * v;
    if inner <= -1.0 {
        return f64::INFINITY;
    }
    (inner.ln_1p() / a).exp_m1()
}

/// `dΦ⁻¹/dv = (1 + Φ⁻¹(v))^θ`.
pub(crate) fn phi_inverse_derivative(theta: f64, u: f64) -> f64 {
    (1.0 + u.max(0.0)).powf(theta)
}

/// Weight exponent `q = θ - γ₂/(p-1)` of the boundedness primitive.
pub fn boundedness_exponent(theta: f64, gamma2: f64, p: f64) -> f64 {
    theta - gamma2 / (p - 1.0)
}

/// `H(s) = ∫₀^s (1+|t|)^{-(θ - γ₂/(p-1))} dt`, odd in `s`.
pub fn boundedness_weight(theta: f64, gamma2: f64, p: f64, s: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::invalid(format!("p must exceed 1, got {p}")));
    }
    let q = boundedness_exponent(theta, gamma2, p);
    let value = power_primitive(q, s.abs());
    Ok(if s < 0.0 { -value } else { value })
}

/// `lim_{s→∞} H(s)`; `None` when the primitive diverges.
pub fn boundedness_weight_limit(theta: f64, gamma2: f64, p: f64) -> Result<Option<f64>> {
    if !(p > 1.0) {
        return Err(Error::invalid(format!("p must exceed 1, got {p}")));
    }
    let q = boundedness_exponent(theta, gamma2, p);
    if q <= 1.0 || near_one(q) {
        Ok(None)
    } else {
        Ok(Some(1.0 / (q - 1.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn truncation_values() {
        assert_eq!(truncation_family(TruncationKind::T, 1.0, 2.0).unwrap(), 1.0);
        assert_eq!(truncation_family(TruncationKind::G, 1.0, 2.0).unwrap(), 1.0);
        assert_eq!(truncation_family(TruncationKind::T, 5.0, 3.0).unwrap(), 3.0);
        assert_eq!(truncation_family(TruncationKind::V, 1.0, 1.5).unwrap(), 0.5);
        assert_eq!(remainder(1.0, -3.0), -2.0);
        assert!(truncation_family(TruncationKind::T, 0.0, 1.0).is_err());
        assert!(truncation_family(TruncationKind::V, -1.0, 1.0).is_err());
    }

    #[test]
    fn h_family_values() {
        let pure = HModel::new(0.7, 0.7, 1.0).unwrap();
        for s in [0.01, 0.3, 2.0, 50.0] {
            assert!((pure.eval(s) - s.powf(-0.7)).abs() < 1e-12 * s.powf(-0.7));
        }
        let h = HModel::new(1.0, 0.5, 1.0).unwrap();
        assert!((h.eval(1.0) - 2f64.sqrt()).abs() < 1e-15);
        let z = HModel::with_zero(0.0, 1.0, 2.0).unwrap();
        assert_eq!(z.eval(3.0), 0.0);
        assert_eq!(z.eval(2.0), 0.0);
        assert!((z.eval(1.0) - 0.5).abs() < 1e-15);
        assert_eq!(HModel::new(0.5, 0.0, 1.0).unwrap().eval(0.0), f64::INFINITY);
        assert_eq!(HModel::constant(3.0).eval(0.0), 3.0);
        assert_eq!(HModel::constant(3.0).eval(1e9), 3.0);
    }

    #[test]
    fn h_truncated_examples() {
        let h = HModel::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(h_truncated(&h, 10, 0.01).unwrap(), 10.0);
        assert_eq!(h_truncated(&h, 10, -1.0).unwrap(), 10.0);
        assert_eq!(h_truncated(&HModel::constant(1.0), 5, 7.0).unwrap(), 1.0);
        assert!(h_truncated(&h, 0, 1.0).is_err());
    }

    #[test]
    fn h_derivative_matches_finite_differences() {
        let models = [
            HModel::new(1.0, 0.5, 1.3).unwrap(),
            HModel::new(0.0, 0.5, 1.0).unwrap(),
            HModel::new(2.0, 0.0, 0.7).unwrap(),
            HModel::with_zero(0.5, 1.0, 2.0).unwrap(),
        ];
        for m in models {
            for s in [0.05, 0.4, 1.1, 1.9, 7.0] {
                let d = 1e-6 * s;
                let fd = (m.eval(s + d) - m.eval(s - d)) / (2.0 * d);
                let an = m.derivative(s);
                assert!((fd - an).abs() <= 1e-6 * (1.0 + an.abs()), "{m:?} s={s}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn envelope_limits() {
        for (g1, g2) in [(0.5, 0.0), (1.0, 0.5), (0.3, 2.0), (0.0, 1.0)] {
            let h = HModel::new(g1, g2, 1.7).unwrap();
            let small = 1e-8f64;
            let big = 1e8f64;
            assert!((small.powf(g1) * h.eval(small) / 1.7 - 1.0).abs() < 1e-4);
            assert!((big.powf(g2) * h.eval(big) / 1.7 - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_forward(0.0, 4.25).unwrap(), 4.25);
        assert!((phi_forward(1.0, std::f64::consts::E - 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((phi_forward(0.5, 3.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(phi_forward(0.5, -1.0).is_err());
        assert!(phi_inverse(0.5, -1.0).is_err());
        assert!(phi_inverse(2.0, 1.0).is_err());
        assert!((phi_inverse(2.0, 0.5).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phi_increasing_and_concave() {
        for theta in [0.3, 1.0, 1.7] {
            let h = 1e-3;
            let mut prev_slope = f64::INFINITY;
            for i in 1..200 {
                let u = i as f64 * 0.05;
                let a = phi_forward(theta, u - h).unwrap();
                let b = phi_forward(theta, u).unwrap();
                let c = phi_forward(theta, u + h).unwrap();
                assert!(c > b && b > a);
                assert!(a + c - 2.0 * b < 0.0);
                let slope = (c - a) / (2.0 * h);
                assert!(slope < prev_slope);
                prev_slope = slope;
            }
        }
    }

    #[test]
    fn boundedness_weight_values() {
        assert!((boundedness_weight(0.0, 0.0, 2.0, 3.5).unwrap() - 3.5).abs() < 1e-15);
        let e1 = std::f64::consts::E - 1.0;
        assert!((boundedness_weight(1.0, 0.0, 2.0, e1).unwrap() - 1.0).abs() < 1e-15);
        assert!(boundedness_weight_limit(1.5, 0.5, 2.0).unwrap().is_none());
        assert_eq!(boundedness_weight_limit(2.0, 0.5, 2.0).unwrap(), Some(2.0));
        assert!(boundedness_weight(0.0, 0.0, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn trunc_plus_remainder_is_identity(s in -1e6f64..1e6, k in 1e-6f64..1e6) {
            let sum = trunc(k, s) + remainder(k, s);
            prop_assert!((sum - s).abs() <= f64::EPSILON * s.abs(), "{} {}", sum, s);
            prop_assert!(trunc(k, s).abs() <= s.abs().min(k));
        }

        #[test]
        fn plateau_in_unit_interval_and_nonincreasing(s in 0.0f64..100.0, ds in 0.0f64..10.0, k in 0.01f64..50.0) {
            let a = plateau(k, s);
            let b = plateau(k, s + ds);
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b <= a + 1e-15);
        }

        #[test]
        fn h_truncation_is_monotone_in_level(s in 1e-6f64..1e3, n in 1u64..10_000) {
            let h = HModel::new(1.0, 0.5, 1.0).unwrap();
            let a = h.truncated(n as f64, s);
            let b = h.truncated((n + 1) as f64, s);
            prop_assert!(a <= b && b <= h.eval(s));
        }

        #[test]
        fn phi_round_trip(theta_idx in 0usize..4, u in 0.0f64..1e6) {
            let theta = [0.0, 0.3, 1.0, 1.7][theta_idx];
            let v = phi_forward(theta, u).unwrap();
            let back = phi_inverse(theta, v).unwrap();
            // v carries only 53 bits; for theta > 1 the inverse amplifies its
            // rounding by v (1+u)^theta / u, which exceeds 1e4 near u = 1e6
            let cond = if u > 0.0 { (v * (1.0 + u).powf(theta) / u).max(1.0) } else { 1.0 };
            let tol = (1e-12f64).max(4.0 * f64::EPSILON * cond);
            prop_assert!((back - u).abs() <= tol * u, "{} {} {}", theta, u, back);
        }
    }
}
