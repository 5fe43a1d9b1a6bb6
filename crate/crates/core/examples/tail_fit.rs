//! Distribution functions and tail exponents of a computed singular solution.

use std::sync::Arc;

use radial_entropy::exponents::marcinkiewicz_exponents;
use radial_entropy::mesh::{DiscreteField, RadialMesh};
use radial_entropy::regularity::{
    aux_check, distribution_function, gradient_tail, log_levels, solution_tail, truncated_energy,
};
use radial_entropy::solver::{default_schedule, solve_continuation, ContinuationOptions, ExactRadial};

fn main() -> radial_entropy::Result<()> {
    let exact = ExactRadial::reference();
    let spec = exact.problem_spec();
    let mesh = Arc::new(RadialMesh::build(4096, 2.0, 0.0)?);
    let out = solve_continuation(&spec, DiscreteField::zeros(mesh.clone(), 3.0), &default_schedule(), &ContinuationOptions::default())?;
    let u = &out.field;

    let levels = log_levels(1.0, 20.0, 6);
    let mu = distribution_function(u, &levels)?;
    println!("{:>8} {:>12} {:>12}", "k", "|{u>=k}|", "closed form");
    for (k, m) in levels.iter().zip(&mu) {
        let want = 4.0 * std::f64::consts::PI / 3.0 * (1.0 + k).powi(-6);
        println!("{k:>8.3} {m:>12.4e} {want:>12.4e}");
    }

    let mx = marcinkiewicz_exponents(spec.dim, spec.p, spec.theta, spec.h.gamma2)?;
    let st = solution_tail(u)?;
    let gt = gradient_tail(u)?;
    println!("\nguaranteed t = {}, r = {}", mx.t, mx.r);
    println!("fitted solution tail {:.3} (r² {:.4}, window {:?})", st.exponent, st.r_squared, st.window);
    println!("fitted gradient tail {:.3} (r² {:.4}, window {:?})", gt.exponent, gt.r_squared, gt.window);

    println!("\ntruncated energies:");
    for k in [1.0, 3.0, 10.0] {
        println!("  k = {k:>4}: {:.5}", truncated_energy(u, k, spec.p)?);
    }
    let aux = aux_check(u, spec.p)?;
    println!("eta = {:.3}: bounds ({:.3}, {:.3}) pass = {}", aux.eta, aux.solution_bound, aux.gradient_bound, aux.pass);
    Ok(())
}
