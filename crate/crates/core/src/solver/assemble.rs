//! Finite-volume residual and tridiagonal Jacobian of the regularized problem.
//!
//! Unknowns are the nodal values on `[first_unknown, M-1]`; the outer node
//! (and the inner one on an annulus) carries the Dirichlet value 0. Dual cell
//! `i` spans `[r_{i-1/2}, r_{i+1/2}]`, faces sit at element midpoints, and at
//! the origin the left face flux vanishes.

use crate::error::{Error, Result};
use crate::mesh::DiscreteField;
use crate::problem::ProblemSpec;
use crate::scalar::{phi_inverse_derivative, phi_inverse_saturating, trunc, HModel};

/// Right-hand side nonlinearity `g_n(u)` multiplying the capped source.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Reaction {
    /// `h_n(u)`.
    Direct(HModel),
    /// `h_n(Φ⁻¹(v))` for the change of variable with parameter `θ`.
    Transformed { h: HModel, theta: f64 },
}

impl Reaction {
    fn value(&self, n: f64, s: f64) -> f64 {
        match *self {
            Reaction::Direct(h) => h.truncated(n, s),
            Reaction::Transformed { h, theta } => {
                if s < 0.0 {
                    return h.truncated(n, s);
                }
                let u = phi_inverse_saturating(theta, s);
                if u.is_infinite() {
                    h.truncated(n, f64::MAX)
                } else {
                    h.truncated(n, u)
                }
            }
        }
    }

    fn derivative(&self, n: f64, s: f64) -> f64 {
        match *self {
            Reaction::Direct(h) => h.truncated_derivative(n, s),
            Reaction::Transformed { h, theta } => {
                if s < 0.0 {
                    return 0.0;
                }
                let u = phi_inverse_saturating(theta, s);
                if u.is_infinite() {
                    return 0.0;
                }
                h.truncated_derivative(n, u) * phi_inverse_derivative(theta, u)
            }
        }
    }
}

/// Precomputed geometry and data for one (problem, mesh, operator) triple.
#[derive(Debug, Clone)]
pub(crate) struct Discretization {
    /// Exponent of `(1 + T_n(ū))^{-e}` in the face coefficient.
    degeneracy: f64,
    p: f64,
    flux_eps: f64,
    reaction: Reaction,
    /// `r_{i+1/2}^{N-1}` per element.
    face_weight: Vec<f64>,
    /// `r_{i+1} - r_i`.
    spacing: Vec<f64>,
    first: usize,
    last: usize,
    dim: f64,
}

/// Source integrals `S_i = ∫_{cell i} r^{N-1} min(f, n) dr` for one level.
#[derive(Debug, Clone)]
pub(crate) struct SourceMoments(pub Vec<f64>);

impl Discretization {
    pub(crate) fn new(spec: &ProblemSpec, field: &DiscreteField, reaction: Reaction, degeneracy: f64, flux_eps: f64) -> Self {
        let mesh = field.mesh();
        let r = mesh.nodes();
        let dim = spec.dim;
        let face_weight = r.windows(2).map(|w| (0.5 * (w[0] + w[1])).powf(dim - 1.0)).collect();
        let spacing = r.windows(2).map(|w| w[1] - w[0]).collect();
        Discretization {
            degeneracy,
            p: spec.p,
            flux_eps,
            reaction,
            face_weight,
            spacing,
            first: mesh.first_unknown(),
            last: mesh.cells() - 1,
            dim,
        }
    }

    pub(crate) fn first(&self) -> usize {
        self.first
    }

    pub(crate) fn last(&self) -> usize {
        self.last
    }

    pub(crate) fn unknowns(&self) -> usize {
        self.last + 1 - self.first
    }

    pub(crate) fn moments(&self, spec: &ProblemSpec, field: &DiscreteField, cap: f64) -> SourceMoments {
        let mesh = field.mesh();
        let s = (0..mesh.nodes().len())
            .map(|i| {
                let (a, b) = mesh.dual_cell(i);
                spec.source.capped_moment(self.dim, a, b, cap)
            })
            .collect();
        SourceMoments(s)
    }

    fn flux_shape(&self, d: f64) -> (f64, f64) {
        if self.p == 2.0 {
            return (d, 1.0);
        }
        let e2 = self.flux_eps * self.flux_eps;
        let q = d * d + e2;
        let phi = q.powf(0.5 * (self.p - 2.0)) * d;
        let dphi = q.powf(0.5 * (self.p - 4.0)) * ((self.p - 1.0) * d * d + e2);
        (phi, dphi)
    }

    fn coefficient(&self, n: f64, avg: f64) -> (f64, f64) {
        if self.degeneracy == 0.0 {
            return (1.0, 0.0);
        }
        let t = trunc(n, avg);
        let base = 1.0 + t.abs();
        let c = base.powf(-self.degeneracy);
        let dc = if avg.abs() < n {
            -self.degeneracy * c / base * avg.signum()
        } else {
            0.0
        };
        (c, dc)
    }

    /// Flux through the face of element `j` and its partials w.r.t. the
    /// left and right nodal values.
    fn face(&self, n: f64, u: &[f64], j: usize) -> (f64, f64, f64) {
        let h = self.spacing[j];
        let d = (u[j + 1] - u[j]) / h;
        let (phi, dphi) = self.flux_shape(d);
        let (c, dc) = self.coefficient(n, 0.5 * (u[j] + u[j + 1]));
        let w = self.face_weight[j];
        let flux = w * phi * c;
        let d_left = w * (-dphi * c / h + 0.5 * phi * dc);
        let d_right = w * (dphi * c / h + 0.5 * phi * dc);
        (flux, d_left, d_right)
    }

    /// Element flux `r_{j+1/2}^{N-1} a(ū, D)` for every element.
    #[cfg(test)]
    pub(crate) fn fluxes(&self, n: f64, u: &[f64]) -> Vec<f64> {
        (0..self.spacing.len()).map(|j| self.face(n, u, j).0).collect()
    }

    /// Residual `R_i = -(F_{i+1/2} - F_{i-1/2}) - g_n(u_i) S_i` for unknowns,
    /// plus the source term `Q_i` it subtracts.
    pub(crate) fn residual(&self, n: f64, u: &[f64], s: &SourceMoments) -> Result<(Vec<f64>, Vec<f64>)> {
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite value in iterate".into()));
        }
        let mut res = Vec::with_capacity(self.unknowns());
        let mut q = Vec::with_capacity(self.unknowns());
        for i in self.first..=self.last {
            let right = self.face(n, u, i).0;
            let left = if i == 0 { 0.0 } else { self.face(n, u, i - 1).0 };
            let src = self.reaction.value(n, u[i]) * s.0[i];
            res.push(-(right - left) - src);
            q.push(src);
        }
        if res.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite residual".into()));
        }
        Ok((res, q))
    }

    /// Tridiagonal Jacobian `(sub, diag, sup)` in unknown ordering.
    pub(crate) fn jacobian(&self, n: f64, u: &[f64], s: &SourceMoments) -> Tridiagonal {
        let k = self.unknowns();
        let mut t = Tridiagonal { sub: vec![0.0; k], diag: vec![0.0; k], sup: vec![0.0; k] };
        for (row, i) in (self.first..=self.last).enumerate() {
            let (_, rl, rr) = self.face(n, u, i);
            t.diag[row] -= rl;
            if i < self.last {
                t.sup[row] = -rr;
            }
            if i > 0 {
                let (_, ll, lr) = self.face(n, u, i - 1);
                t.diag[row] += lr;
                if i > self.first {
                    t.sub[row] = ll;
                }
            }
            t.diag[row] -= self.reaction.derivative(n, u[i]) * s.0[i];
        }
        t
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    /// Thomas algorithm; fails on a vanishing pivot.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let scale = self.diag.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let mut denom = self.diag[0];
        if !(denom.abs() > 1e-300 * scale) || !denom.is_finite() {
            return Err(Error::SingularJacobian { row: 0 });
        }
        c[0] = self.sup[0] / denom;
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.sub[i] * c[i - 1];
            if !(denom.abs() > 1e-300 * scale) || !denom.is_finite() {
                return Err(Error::SingularJacobian { row: i });
            }
            c[i] = self.sup[i] / denom;
            d[i] = (rhs[i] - self.sub[i] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}
