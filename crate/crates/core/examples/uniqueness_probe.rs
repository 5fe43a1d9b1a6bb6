//! Two schedules and two starting guesses on a problem with a decreasing
//! singular `h`; all four limits should coincide.

use std::sync::Arc;

use radial_entropy::exponents::uniqueness_min_m;
use radial_entropy::mesh::{DiscreteField, RadialMesh};
use radial_entropy::problem::{ProblemSpec, SourceSpec};
use radial_entropy::scalar::HModel;
use radial_entropy::solver::{default_schedule, solve_continuation, ContinuationOptions};

fn main() -> radial_entropy::Result<()> {
    let spec = ProblemSpec {
        dim: 3.0,
        p: 2.0,
        theta: 0.25,
        h: HModel::new(0.5, 0.5, 1.0)?,
        source: SourceSpec::new(1.0, 1.0)?,
        r_in: 0.0,
    };
    println!("uniqueness needs m >= {}; f = 1/r lies in L^m for m < 3", uniqueness_min_m(3.0, 2.0, 0.25, 0.5)?);
    let mesh = Arc::new(RadialMesh::build(1024, 2.0, 0.0)?);
    let dyadic = default_schedule();
    let mut triadic: Vec<u64> = (3..=15).map(|j| 3u64.pow(j)).collect();
    triadic.push(*dyadic.last().unwrap());

    let starts = [
        ("zero", DiscreteField::zeros(mesh.clone(), 3.0)),
        ("ones", DiscreteField::from_fn(mesh, 3.0, |_| 1.0)?),
    ];
    let mut fields = Vec::new();
    for (sname, schedule) in [("2^j", &dyadic), ("3^j", &triadic)] {
        for (iname, init) in &starts {
            let out = solve_continuation(&spec, init.clone(), schedule, &ContinuationOptions::default())?;
            println!("{sname} from {iname}: sup u = {:.15}, {} Newton steps", out.field.max(), out.diagnostics.newton_iterations());
            fields.push(out.field);
        }
    }
    let scale = fields[0].max();
    for f in &fields[1..] {
        let d = f.values().iter().zip(fields[0].values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("relative sup difference to the first: {:.2e}", d / scale);
    }
    Ok(())
}
