use crate::error::{Error, Result};
use crate::mesh::{sphere_area, DiscreteField};
use crate::problem::ProblemSpec;
use crate::scalar::trunc;

/// Built-in test functions for the entropy inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    Zero,
    /// `c T_j(u)`.
    ScaledTruncation { scale: f64, level: f64 },
    /// `c (1 - r²)`; only admissible on the ball.
    Bump { scale: f64 },
}

impl TestFunction {
    fn nodal(&self, field: &DiscreteField) -> Result<Vec<f64>> {
        let r = field.mesh().nodes();
        let phi: Vec<f64> = match *self {
            TestFunction::Zero => vec![0.0; r.len()],
            TestFunction::ScaledTruncation { scale, level } => {
                if !(level > 0.0) {
                    return Err(Error::InvalidTestFunction("truncation level must be positive".into()));
                }
                field.values().iter().map(|&u| scale * trunc(level, u)).collect()
            }
            TestFunction::Bump { scale } => r.iter().map(|&x| scale * (1.0 - x * x)).collect(),
        };
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTestFunction("test function is not finite".into()));
        }
        let last = phi.len() - 1;
        if phi[last] != 0.0 || (!field.mesh().is_ball() && phi[0] != 0.0) {
            return Err(Error::InvalidTestFunction(format!("{self:?} does not vanish on the boundary")));
        }
        Ok(phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyResidual {
    /// `∫ a(u, ∇u)·∇T_k(u - φ)`.
    pub lhs: f64,
    /// `∫ h(u) f T_k(u - φ)`.
    pub rhs: f64,
    /// `lhs - rhs`; the inequality asks for `<= 0`.
    pub residual: f64,
    /// `|lhs| + |rhs| + 1`.
    pub scale: f64,
}

/// Both sides of the entropy inequality with test function `φ` and level `k`.
///
/// The quadrature matches the finite-volume scheme: face fluxes weighted by
/// `r_{mid}^{N-1}` against nodal differences of `T_k(u - φ)`, and nodal
/// reaction values against exact dual-cell source integrals. With
/// `level = Some(n)` the level-`n` data (`h_n`, `min(f, n)`, `T_n` in the
/// coefficient) are used, so a converged discrete solution gives a residual at
/// solver tolerance; `None` uses the untruncated data.
pub fn entropy_residual(
    field: &DiscreteField,
    spec: &ProblemSpec,
    level: Option<u64>,
    phi: &TestFunction,
    k: f64,
) -> Result<EntropyResidual> {
    if !(k > 0.0) {
        return Err(Error::invalid("truncation level must be positive"));
    }
    let phi = phi.nodal(field)?;
    let mesh = field.mesh();
    let r = mesh.nodes();
    let u = field.values();
    let dim = spec.dim;
    let n = level.map_or(f64::INFINITY, |n| n as f64);
    let w: Vec<f64> = u.iter().zip(&phi).map(|(a, b)| trunc(k, a - b)).collect();

    let mut lhs = 0.0;
    for e in 0..r.len() - 1 {
        let dw = w[e + 1] - w[e];
        if dw == 0.0 {
            continue;
        }
        let d = (u[e + 1] - u[e]) / (r[e + 1] - r[e]);
        let avg = trunc(n, 0.5 * (u[e] + u[e + 1]));
        let flux = (0.5 * (r[e] + r[e + 1])).powf(dim - 1.0) * spec.coefficient(avg) * d.abs().powf(spec.p - 2.0) * d;
        lhs += flux * dw;
    }
    let mut rhs = 0.0;
    for (i, wi) in w.iter().enumerate() {
        if *wi == 0.0 {
            continue;
        }
        let (a, b) = mesh.dual_cell(i);
        let s = spec.source.capped_moment(dim, a, b, n);
        let g = if n.is_finite() { spec.h.truncated(n, u[i]) } else { spec.h.eval(u[i]) };
        rhs += g * s * wi;
    }
    let omega = sphere_area(dim);
    let (lhs, rhs) = (omega * lhs, omega * rhs);
    Ok(EntropyResidual {
        lhs,
        rhs,
        residual: lhs - rhs,
        scale: lhs.abs() + rhs.abs() + 1.0,
    })
}
