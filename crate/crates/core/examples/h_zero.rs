//! Bounded solutions: an `h` that vanishes at `s̄ = 2` far beyond the
//! existence threshold, and a source in `L^m` with `m > N/p`.

use std::sync::Arc;

use radial_entropy::mesh::{DiscreteField, RadialMesh};
use radial_entropy::problem::{ProblemSpec, SourceSpec};
use radial_entropy::regularity::bound_checks;
use radial_entropy::scalar::HModel;
use radial_entropy::solver::{default_schedule, solve_continuation, ContinuationOptions};

fn run(spec: &ProblemSpec, cells: usize) -> radial_entropy::Result<DiscreteField> {
    let mesh = Arc::new(RadialMesh::build(cells, 2.0, 0.0)?);
    let out = solve_continuation(spec, DiscreteField::zeros(mesh, spec.dim), &default_schedule(), &ContinuationOptions::default())?;
    Ok(out.field)
}

fn main() -> radial_entropy::Result<()> {
    let zero = ProblemSpec {
        dim: 3.0,
        p: 2.0,
        theta: 3.0,
        h: HModel::with_zero(0.5, 1.0, 2.0)?,
        source: SourceSpec::new(10.0, 2.5)?,
        r_in: 0.0,
    };
    let u = run(&zero, 1024)?;
    let b = bound_checks(&u, &zero)?;
    println!("vanishing h, theta = 3: sup u = {:.17} (bound {:?}) pass = {}", b.sup_u, b.bound, b.pass);

    let mild = ProblemSpec { theta: 0.5, h: HModel::new(0.0, 0.5, 1.0)?, source: SourceSpec::new(1.0, 1.0)?, ..zero };
    for cells in [512, 1024, 2048] {
        println!("f = 1/r, M = {cells:>4}: sup u = {:.10}", run(&mild, cells)?.max());
    }
    Ok(())
}
