//! Poisson problem with `u = 1 - r²`: nodal exactness and second-order
//! convergence of the piecewise-linear reconstruction.

use std::sync::Arc;

use radial_entropy::mesh::{DiscreteField, RadialMesh};
use radial_entropy::solver::{manufactured_solution, solve_regularized, SolverOptions};

fn main() -> radial_entropy::Result<()> {
    let m = manufactured_solution(3.0);
    let spec = m.problem_spec();
    let mut prev: Option<f64> = None;
    println!("{:>6} {:>12} {:>12} {:>7}", "M", "nodal err", "mid err", "order");
    for cells in [64, 128, 256, 512, 1024] {
        let mesh = Arc::new(RadialMesh::build(cells, 1.0, 0.0)?);
        let init = DiscreteField::zeros(mesh.clone(), spec.dim);
        let (u, diag) = solve_regularized(&spec, 1 << 20, init, &SolverOptions::default())?;
        let r = mesh.nodes();
        let nodal = r.iter().zip(u.values()).map(|(&x, v)| (v - m.eval(x)).abs()).fold(0.0, f64::max);
        let mid = r
            .windows(2)
            .zip(u.values().windows(2))
            .map(|(x, v)| (0.5 * (v[0] + v[1]) - m.eval(0.5 * (x[0] + x[1]))).abs())
            .fold(0.0, f64::max);
        let order = prev.map_or(f64::NAN, |e| (e / mid).log2());
        println!("{cells:>6} {nodal:>12.3e} {mid:>12.3e} {order:>7.3}   ({} Newton steps)", diag.newton_iterations());
        prev = Some(mid);
    }
    Ok(())
}
