//! Regularity exponents across the degeneracy range for `L¹` data, and the
//! regime report of one parameter set.

use radial_entropy::exponents::{
    classify_regime, existence_threshold, lebesgue_solution_exponent, marcinkiewicz_exponents, uniqueness_min_m,
    ParameterSet,
};

fn main() -> radial_entropy::Result<()> {
    let (dim, p, gamma2) = (3.0, 2.0, 0.5);
    let top = existence_threshold(p, gamma2)?;
    println!("{:>7} {:>9} {:>9} {:>13} {:>9}", "theta", "t", "r", "t(m=1+1e-8)", "m_uniq");
    for i in 0..=20 {
        let theta = top * i as f64 / 20.0;
        let (t, r) = match marcinkiewicz_exponents(dim, p, theta, gamma2) {
            Ok(mx) => (format!("{:.5}", mx.t), format!("{:.5}", mx.r)),
            Err(_) => ("-".into(), "-".into()),
        };
        let tl = lebesgue_solution_exponent(dim, p, theta, gamma2, 1.0 + 1e-8);
        let mu = uniqueness_min_m(dim, p, theta, gamma2)?;
        println!("{theta:>7.4} {t:>9} {r:>9} {tl:>13.5} {mu:>9.5}");
    }

    println!();
    let report = classify_regime(&ParameterSet::new(3.0, 2.0, 0.5, 0.5, 0.5, 1.0)?);
    print!("{}", report.to_record());
    Ok(())
}
