//! A small sweep through the harness: the exact instance for three values of
//! `ε`, written under a temporary directory.

use radial_entropy::harness::{run_sweep, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join("radial-entropy-sweep");
    let text = format!(
        "scenario = exact-radial\nmesh.cells = 2048\noutput.dir = {}\nsweep.epsilon = 0.25, 0.5, 0.75\n",
        out.display()
    );
    let cfg = ExperimentConfig::parse(&text)?;
    let sweep = run_sweep(&cfg, None)?;
    for (pt, rec) in sweep.points.iter().zip(&sweep.records) {
        println!("{:?} -> exit {}", pt.assignments, rec.exit_code);
        for row in &rec.report.rows {
            println!("    {:<28} {:>12.5} (predicted {:.5}) {}", row.check, row.measured, row.predicted, if row.pass { "ok" } else { "FAIL" });
        }
    }
    println!("{}", std::fs::read_to_string(&sweep.summary_path)?);
    Ok(())
}
