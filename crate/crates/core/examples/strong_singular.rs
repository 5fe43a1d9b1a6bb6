//! `h(s) = s^{-2}`: the energy of `T_k(u)^{3/2}` settles under refinement
//! while the plain truncated energy keeps drifting.

use std::sync::Arc;

use radial_entropy::mesh::{DiscreteField, RadialMesh};
use radial_entropy::problem::{ProblemSpec, SourceSpec};
use radial_entropy::regularity::{strong_singular_trace, truncated_energy};
use radial_entropy::scalar::HModel;
use radial_entropy::solver::{default_schedule, solve_continuation, ContinuationOptions};

fn main() -> radial_entropy::Result<()> {
    let spec = ProblemSpec {
        dim: 3.0,
        p: 2.0,
        theta: 0.0,
        h: HModel::new(2.0, 0.0, 1.0)?,
        source: SourceSpec::constant(1.0),
        r_in: 0.0,
    };
    println!("{:>6} {:>14} {:>14} {:>10}", "M", "trace energy", "plain energy", "sup u");
    for cells in [256, 1024, 4096] {
        let mesh = Arc::new(RadialMesh::build(cells, 1.0, 0.0)?);
        let out = solve_continuation(&spec, DiscreteField::zeros(mesh, 3.0), &default_schedule(), &ContinuationOptions::default())?;
        let u = &out.field;
        println!(
            "{cells:>6} {:>14.6} {:>14.6} {:>10.6}",
            strong_singular_trace(u, &spec, 1.0)?,
            truncated_energy(u, 1.0, spec.p)?,
            u.max()
        );
    }
    Ok(())
}
