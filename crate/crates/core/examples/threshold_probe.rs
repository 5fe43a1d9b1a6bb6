//! Continuation beyond the existence threshold with large data.

use std::sync::Arc;

use radial_entropy::mesh::{DiscreteField, RadialMesh};
use radial_entropy::solver::{default_schedule, solve_continuation, ContinuationOptions, ExactRadial};
use radial_entropy::Error;

fn main() -> radial_entropy::Result<()> {
    let base = ExactRadial::reference();
    let mut spec = base.problem_spec();
    let threshold = 1.0 + spec.h.gamma2 / (spec.p - 1.0);
    spec.theta = 1.2 * threshold;
    spec.source.amplitude *= 100.0;
    let mesh = Arc::new(RadialMesh::build(1024, 2.0, 0.0)?);
    let init = DiscreteField::zeros(mesh, spec.dim);
    let opts = ContinuationOptions::default();
    println!("theta = {} (threshold {threshold}), amplitude = {}", spec.theta, spec.source.amplitude);
    let diagnostics = match solve_continuation(&spec, init, &default_schedule(), &opts) {
        Ok(out) => {
            println!("no divergence signal");
            for (n, f) in out.history.iter().step_by(4) {
                let row: Vec<String> = [0.01, 0.1, 0.3, 0.5, 0.9].iter().map(|&r| format!("{:.3e}", f.interpolate(r))).collect();
                println!("n = {n:>9}: {}", row.join(" "));
            }
            out.diagnostics
        }
        Err(Error::Divergence { level, diagnostics }) => {
            println!("divergence signal at n = {level}");
            println!("literal d_k rule (non-decreasing over the window): {}", diagnostics.energy_nondecreasing);
            *diagnostics
        }
        Err(e) => return Err(e),
    };
    println!("{:>10} {:>12} {:>12} {:>12} {:>12} {:>5}", "n", "sup u", "d_1", "d_10", "d_100", "cap");
    for lvl in &diagnostics.levels {
        let d = |i: usize| lvl.energy_diffs.get(i).copied().unwrap_or(f64::NAN);
        println!(
            "{:>10} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>5}",
            lvl.level, lvl.sup_u, d(0), d(1), d(2), lvl.operator_cap_active
        );
    }
    Ok(())
}
