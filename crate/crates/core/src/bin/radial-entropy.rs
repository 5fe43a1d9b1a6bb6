use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use radial_entropy::harness::{
    atlas, run_experiment, run_sweep, ExperimentConfig, RunRecord, EXIT_CONFIG_ERROR,
};

#[derive(Parser)]
#[command(name = "radial-entropy", version, about = "Radial solver experiments and regularity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sweep worker threads; defaults to available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for randomized checks (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run { config: PathBuf },
    /// Run every point of the config's sweep axes.
    Sweep { config: PathBuf },
    /// Print the regime report for `N=..,p=..,theta=..,gamma2=..[,gamma1=..,m=..]`.
    Atlas { params: Vec<String> },
}

fn load(cli: &Cli, path: &Path) -> Result<ExperimentConfig, ExitCode> {
    let mut cfg = ExperimentConfig::from_file(path).map_err(|e| {
        eprintln!("config error: {e}");
        ExitCode::from(EXIT_CONFIG_ERROR as u8)
    })?;
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn print_record(r: &RunRecord) {
    println!("{}", r.dir.display());
    for row in &r.report.rows {
        let status = if row.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {} predicted={:?} measured={:?} tolerance={:?}",
            row.check, row.predicted, row.measured, row.tolerance
        );
    }
    if let Some(f) = &r.failure {
        println!("solver failure: {f}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Run { config } => {
            let cfg = match load(&cli, config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match run_experiment(&cfg) {
                Ok(r) => {
                    print_record(&r);
                    r.exit_code
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Command::Sweep { config } => {
            let cfg = match load(&cli, config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match run_sweep(&cfg, cli.workers) {
                Ok(s) => {
                    for (pt, r) in s.points.iter().zip(&s.records) {
                        let axes: Vec<String> = pt.assignments.iter().map(|(k, v)| format!("{k}={v:?}")).collect();
                        println!("point {:04} {} exit={}", pt.index, axes.join(" "), r.exit_code);
                    }
                    println!("{}", s.summary_path.display());
                    s.exit_code
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Command::Atlas { params } => match atlas(&params.join(",")) {
            Ok(report) => {
                print!("{}", report.to_record());
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG_ERROR
            }
        },
    };
    ExitCode::from(code as u8)
}
