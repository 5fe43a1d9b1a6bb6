//! Truncations, the singular nonlinearity and the change of variable.

use radial_entropy::scalar::{phi_forward, phi_inverse, plateau, remainder, trunc, HModel};

fn main() -> radial_entropy::Result<()> {
    let k = 2.0;
    println!("{:>6} {:>8} {:>8} {:>8}", "s", "T_k", "G_k", "V_k");
    for s in [-3.0, -1.0, 0.5, 2.0, 2.5, 3.5, 5.0] {
        println!("{s:>6} {:>8} {:>8} {:>8}", trunc(k, s), remainder(k, s), plateau(k, s));
    }

    let h = HModel::new(0.5, 1.5, 1.0)?;
    println!("\nh(s) = (1+s)^(g1-g2) s^-g1 with g1 = 0.5, g2 = 1.5");
    for s in [1e-6, 1e-3, 1.0, 1e3, 1e6] {
        // the envelope ratios s^g1 h(s) and s^g2 h(s) tend to the scale at 0 and infinity
        println!("s = {s:>8.0e}  h = {:>12.5e}  s^g1 h = {:.6}  s^g2 h = {:.6}  h_64 = {:.5e}",
            h.eval(s), s.powf(h.gamma1) * h.eval(s), s.powf(h.gamma2) * h.eval(s), h.truncated(64.0, s));
    }

    println!("\nPhi(u) = int_0^u (1+t)^-theta dt");
    for theta in [0.5, 1.0, 1.7] {
        for u in [0.1, 10.0, 1e4] {
            let v = phi_forward(theta, u)?;
            let back = phi_inverse(theta, v)?;
            println!("theta = {theta:<4} u = {u:<8} v = {v:<22} rel round-trip = {:.1e}", (back - u).abs() / u);
        }
    }
    Ok(())
}
