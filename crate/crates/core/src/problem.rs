//! Boundary-value problem data for the radial model operator
//! `-div((1+u)^{-θ(p-1)} |∇u|^{p-2}∇u) = h(u) f`.

use crate::error::{Error, Result};
use crate::exponents::ParameterSet;
use crate::scalar::HModel;

/// Coercivity floor of the model operator.
pub const COERCIVITY: f64 = 1.0;

/// Power-law source `f(x) = A |x|^{-σ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub amplitude: f64,
    pub singularity: f64,
}

impl SourceSpec {
    pub fn new(amplitude: f64, singularity: f64) -> Result<Self> {
        let s = SourceSpec { amplitude, singularity };
        s.validate()?;
        Ok(s)
    }

    pub fn constant(amplitude: f64) -> Self {
        SourceSpec { amplitude, singularity: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::invalid("source amplitude must be finite and >= 0"));
        }
        if !(self.singularity >= 0.0) || !self.singularity.is_finite() {
            return Err(Error::invalid("source singularity must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn value(&self, r: f64) -> f64 {
        if self.singularity == 0.0 {
            self.amplitude
        } else {
            self.amplitude * r.powf(-self.singularity)
        }
    }

    /// `f ∈ L^m` of the unit ball in dimension `N`: `σ m < N`.
    pub fn in_lebesgue(&self, dim: f64, m: f64) -> bool {
        self.amplitude == 0.0 || self.singularity * m < dim
    }

    /// Supremum of admissible Lebesgue indices, `N/σ`.
    pub fn lebesgue_sup(&self, dim: f64) -> f64 {
        if self.amplitude == 0.0 || self.singularity == 0.0 {
            f64::INFINITY
        } else {
            dim / self.singularity
        }
    }

    /// Exact `∫_a^b r^{N-1} min(f(r), cap) dr` (without the sphere factor).
    pub fn capped_moment(&self, dim: f64, a: f64, b: f64, cap: f64) -> f64 {
        if self.amplitude == 0.0 || b <= a {
            return 0.0;
        }
        if self.singularity == 0.0 {
            return self.amplitude.min(cap) * (b.powf(dim) - a.powf(dim)) / dim;
        }
        let sigma = self.singularity;
        // f exceeds cap on r < r_cap
        let r_cap = if cap.is_finite() { (self.amplitude / cap).powf(1.0 / sigma) } else { 0.0 };
        let mid = r_cap.clamp(a, b);
        let capped = if mid > a { cap * (mid.powf(dim) - a.powf(dim)) / dim } else { 0.0 };
        let free = if b > mid {
            let q = dim - sigma;
            if mid == 0.0 && q <= 0.0 {
                f64::INFINITY
            } else if q.abs() < 1e-12 {
                self.amplitude * (b / mid).ln()
            } else {
                self.amplitude * (b.powf(q) - mid.powf(q)) / q
            }
        } else {
            0.0
        };
        capped + free
    }
}

/// One radial boundary-value problem on `r_in < |x| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub dim: f64,
    pub p: f64,
    pub theta: f64,
    pub h: HModel,
    pub source: SourceSpec,
    pub r_in: f64,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p < self.dim) || !self.dim.is_finite() {
            return Err(Error::invalid(format!(
                "need 1 < p < N, got p = {}, N = {}",
                self.p, self.dim
            )));
        }
        if !(self.theta >= 0.0) || !self.theta.is_finite() {
            return Err(Error::invalid("theta must be finite and >= 0"));
        }
        self.h.validate()?;
        self.source.validate()?;
        if !(0.0..1.0).contains(&self.r_in) {
            return Err(Error::invalid("inner radius must lie in [0, 1)"));
        }
        if self.r_in == 0.0 && self.source.amplitude > 0.0 && self.source.singularity >= self.dim {
            return Err(Error::invalid("source is not integrable at the origin (sigma >= N)"));
        }
        Ok(())
    }

    /// Exponent `θ(p-1)` of the coefficient `(1+s)^{-θ(p-1)}`.
    pub fn degeneracy(&self) -> f64 {
        self.theta * (self.p - 1.0)
    }

    /// Operator coefficient `b(s) = α (1+|s|)^{-θ(p-1)}`.
    pub fn coefficient(&self, s: f64) -> f64 {
        COERCIVITY * (1.0 + s.abs()).powf(-self.degeneracy())
    }

    /// Parameter set for exponent predictions, using the best Lebesgue index
    /// of the source strictly inside its admissible range.
    pub fn parameter_set(&self, m: f64) -> Result<ParameterSet> {
        ParameterSet::new(self.dim, self.p, self.theta, self.h.gamma1, self.h.gamma2, m)
    }
}
