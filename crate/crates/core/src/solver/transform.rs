//! Change of variable `v = Φ(u)`, which turns the degenerate operator into
//! the plain p-Laplacian with reaction `h_n(Φ⁻¹(v))`.

use crate::error::{Error, Result};
use crate::mesh::DiscreteField;
use crate::problem::ProblemSpec;
use crate::scalar::{phi_forward, phi_inverse_saturating};

use super::assemble::Reaction;
use super::continuation::{run_continuation, ContinuationOptions};
use super::SolveDiagnostics;

#[derive(Debug, Clone)]
pub struct TransformOutcome {
    /// `u = Φ⁻¹(v)`.
    pub field: DiscreteField,
    pub transformed: DiscreteField,
    pub diagnostics: SolveDiagnostics,
}

/// Continuation on the transformed problem, mapped back to `u`.
pub fn transform_solve(
    spec: &ProblemSpec,
    init: DiscreteField,
    schedule: &[u64],
    opts: &ContinuationOptions,
) -> Result<TransformOutcome> {
    spec.validate()?;
    let mesh = init.mesh().clone();
    let v0: Vec<f64> = init
        .values()
        .iter()
        .map(|&u| phi_forward(spec.theta, u.max(0.0)))
        .collect::<Result<_>>()?;
    let v0 = DiscreteField::new(mesh.clone(), spec.dim, v0)?;
    let reaction = Reaction::Transformed { h: spec.h, theta: spec.theta };
    let out = run_continuation(spec, v0, schedule, opts, reaction, 0.0)?;
    let u: Vec<f64> = out.field.values().iter().map(|&v| phi_inverse_saturating(spec.theta, v)).collect();
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidState("transformed solution left the range of phi".into()));
    }
    Ok(TransformOutcome {
        field: DiscreteField::new(mesh, spec.dim, u)?,
        transformed: out.field,
        diagnostics: out.diagnostics,
    })
}
