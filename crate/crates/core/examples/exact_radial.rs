//! Continuation on the explicit singular radial solution `u = r^{-1/2} - 1`.

use std::sync::Arc;

use radial_entropy::mesh::{DiscreteField, RadialMesh};
use radial_entropy::solver::{default_schedule, solve_continuation, ContinuationOptions, ExactRadial};

fn main() -> radial_entropy::Result<()> {
    let exact = ExactRadial::reference();
    let spec = exact.problem_spec();
    let cells: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4096);
    let mesh = Arc::new(RadialMesh::build(cells, 2.0, 0.0)?);
    let init = DiscreteField::zeros(mesh.clone(), spec.dim);
    let opts = ContinuationOptions::default();
    let out = solve_continuation(&spec, init, &default_schedule(), &opts)?;

    println!("alpha = {}, C = {}", exact.alpha(), exact.amplitude());
    println!("{:>10} {:>6} {:>12} {:>12} {:>12} {:>12}", "n", "iters", "sup u", "d_1", "d_10", "d_100");
    for lvl in &out.diagnostics.levels {
        let d = |i: usize| lvl.energy_diffs.get(i).copied().unwrap_or(f64::NAN);
        println!(
            "{:>10} {:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            lvl.level,
            lvl.steps.len() - 1,
            lvl.sup_u,
            d(0),
            d(1),
            d(2)
        );
    }
    println!("\n{:>12} {:>14} {:>14} {:>10}", "r", "u_h", "u", "rel err");
    for r in [1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 0.5, 0.9] {
        let uh = out.field.interpolate(r);
        let u = exact.eval(r);
        println!("{r:>12.3e} {uh:>14.6e} {u:>14.6e} {:>10.2e}", (uh - u).abs() / u);
    }
    Ok(())
}
