//! Entropy-inequality residuals for the three built-in test functions.

use std::sync::Arc;

use radial_entropy::harness::{test_family, ENTROPY_LEVELS};
use radial_entropy::mesh::{DiscreteField, RadialMesh};
use radial_entropy::regularity::entropy_residual;
use radial_entropy::solver::{default_schedule, solve_continuation, ContinuationOptions, ExactRadial};

fn main() -> radial_entropy::Result<()> {
    let spec = ExactRadial::reference().problem_spec();
    let n_max = *default_schedule().last().unwrap();
    for cells in [1024, 2048, 4096] {
        let mesh = Arc::new(RadialMesh::build(cells, 2.0, 0.0)?);
        let out = solve_continuation(&spec, DiscreteField::zeros(mesh, 3.0), &default_schedule(), &ContinuationOptions::default())?;
        println!("M = {cells}");
        for (name, phi) in test_family() {
            let row: Vec<String> = ENTROPY_LEVELS
                .iter()
                .map(|&k| {
                    let limit = entropy_residual(&out.field, &spec, None, &phi, k).unwrap();
                    let level = entropy_residual(&out.field, &spec, Some(n_max), &phi, k).unwrap();
                    format!("k={k}: {:+.2e} / {:+.2e}", limit.residual / limit.scale, level.residual / level.scale)
                })
                .collect();
            println!("  {name:<10} {}", row.join("  "));
        }
    }
    println!("(untruncated data / level-n data, relative to |lhs| + |rhs| + 1)");
    Ok(())
}
