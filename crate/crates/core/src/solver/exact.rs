//! Closed-form radial solutions used as oracles.

use crate::error::{Error, Result};
use crate::problem::{ProblemSpec, SourceSpec};
use crate::scalar::HModel;

/// `u(r) = r^α - 1` solving the model problem with `h(s) = (1+s)^{-γ₂}` and
/// `f = C r^{-(N-ε)}` on the unit ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRadial {
    pub dim: f64,
    pub p: f64,
    pub theta: f64,
    pub gamma2: f64,
    pub eps: f64,
}

impl ExactRadial {
    pub fn new(dim: f64, p: f64, theta: f64, gamma2: f64, eps: f64) -> Result<Self> {
        let e = ExactRadial { dim, p, theta, gamma2, eps };
        let denom = (p - 1.0) * (1.0 - theta) + gamma2;
        if denom.abs() < 1e-12 {
            return Err(Error::Critical("(p-1)(1-theta) + gamma2 = 0".into()));
        }
        if !(e.alpha() < 0.0) {
            return Err(Error::invalid(format!("exponent alpha = {} must be negative", e.alpha())));
        }
        if !(e.amplitude() > 0.0) {
            return Err(Error::invalid(format!("source amplitude {} must be positive", e.amplitude())));
        }
        if !(eps > 0.0) {
            return Err(Error::invalid("eps must be positive"));
        }
        Ok(e)
    }

    /// The reference instance `N = 3, p = 2, θ = 1/2, γ₂ = 1/2, ε = 1/2`.
    pub fn reference() -> Self {
        ExactRadial { dim: 3.0, p: 2.0, theta: 0.5, gamma2: 0.5, eps: 0.5 }
    }

    pub fn alpha(&self) -> f64 {
        (self.p - self.dim + self.eps) / ((self.p - 1.0) * (1.0 - self.theta) + self.gamma2)
    }

    /// Source amplitude `C = |α|^{p-1} (N - 1 + (p-1)(α(1-θ) - 1))`.
    pub fn amplitude(&self) -> f64 {
        let a = self.alpha();
        let e = (self.p - 1.0) * (a * (1.0 - self.theta) - 1.0);
        a.abs().powf(self.p - 1.0) * (self.dim - 1.0 + e)
    }

    pub fn singularity(&self) -> f64 {
        self.dim - self.eps
    }

    pub fn eval(&self, r: f64) -> f64 {
        r.powf(self.alpha()) - 1.0
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.alpha() * r.powf(self.alpha() - 1.0)
    }

    pub fn problem_spec(&self) -> ProblemSpec {
        ProblemSpec {
            dim: self.dim,
            p: self.p,
            theta: self.theta,
            h: HModel { gamma1: 0.0, gamma2: self.gamma2, scale: 1.0, zero_point: None },
            source: SourceSpec { amplitude: self.amplitude(), singularity: self.singularity() },
            r_in: 0.0,
        }
    }
}

/// `u = 1 - r²` for the Poisson problem `-Δu = 2N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub dim: f64,
}

pub fn manufactured_solution(dim: f64) -> Manufactured {
    Manufactured { dim }
}

impl Manufactured {
    pub fn eval(&self, r: f64) -> f64 {
        1.0 - r * r
    }

    pub fn derivative(&self, r: f64) -> f64 {
        -2.0 * r
    }

    pub fn problem_spec(&self) -> ProblemSpec {
        ProblemSpec {
            dim: self.dim,
            p: 2.0,
            theta: 0.0,
            h: HModel::constant(1.0),
            source: SourceSpec::constant(2.0 * self.dim),
            r_in: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_constants() {
        let e = ExactRadial::reference();
        assert!((e.alpha() + 0.5).abs() < 1e-15);
        assert!((e.amplitude() - 0.375).abs() < 1e-15);
        assert_eq!(e.singularity(), 2.5);
    }

    /// Finite-difference check of the equation for several parameter sets.
    #[test]
    fn exact_solution_satisfies_equation() {
        for (dim, p, theta, g2, eps) in [(3.0, 2.0, 0.5, 0.5, 0.5), (3.0, 1.5, 0.2, 0.3, 0.4), (4.0, 2.5, 0.1, 0.5, 0.3)] {
            let e = ExactRadial::new(dim, p, theta, g2, eps).unwrap();
            let spec = e.problem_spec();
            let flux = |r: f64| {
                let d = e.derivative(r);
                r.powf(dim - 1.0) * spec.coefficient(e.eval(r))
                    * d.abs().powf(p - 2.0)
                    * d
            };
            for r in [0.05, 0.3, 0.7] {
                let h = 1e-5 * r;
                let lhs = -(flux(r + h) - flux(r - h)) / (2.0 * h) / r.powf(dim - 1.0);
                let rhs = (1.0 + e.eval(r)).powf(-g2) * spec.source.value(r);
                assert!((lhs - rhs).abs() < 1e-6 * rhs, "{dim} {p}: {lhs} vs {rhs}");
            }
        }
    }
}
