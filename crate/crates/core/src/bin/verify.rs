//! Runs verification suites and writes report.json plus CSV tables.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on bad
//! input or a numerical error.

use clap::Parser;
use conekg::cli::config::{parse_config, Flags, OUT_DIR_ENV};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "verify", about = "Numerical checks for the double-cone Klein-Gordon model")]
struct Args {
    /// bulk-boundary, symplectic, goursat, modular, kms, generator, symbol or all
    suite: Option<String>,
    /// Mass; repeat for several
    #[arg(long = "mass", allow_hyphen_values = true)]
    masses: Vec<f64>,
    /// Number of u panels on the main cone grid
    #[arg(long)]
    grid_u: Option<usize>,
    /// Sphere grid as NTHETAxNPHI
    #[arg(long)]
    grid_sphere: Option<String>,
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    eps_ratio: Option<f64>,
    #[arg(long)]
    eps_count: Option<usize>,
    /// Flow parameter; repeat for several
    #[arg(long = "tau", allow_hyphen_values = true)]
    taus: Vec<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reading of --tau: geometric or modular
    #[arg(long)]
    param: Option<String>,
    /// Configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print passing checks too
    #[arg(long, short)]
    verbose: bool,
}

fn main() -> ExitCode {
    let a = Args::parse();
    let flags = Flags {
        suite: a.suite,
        masses: a.masses,
        grid_u: a.grid_u,
        grid_sphere: a.grid_sphere,
        eps0: a.eps0,
        eps_ratio: a.eps_ratio,
        eps_count: a.eps_count,
        taus: a.taus,
        seed: a.seed,
        out: a.out,
        param: a.param,
    };
    let env_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let config = match parse_config(a.config.as_deref(), &flags, env_out) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("verify: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match conekg::cli::run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("verify: {e}");
            return ExitCode::from(2);
        }
    };
    for s in &report.suites {
        println!("{} {} ({:.1} s)", if s.passed { "PASS" } else { "FAIL" }, s.suite, s.runtime_s);
        for c in &s.output.checks {
            if a.verbose || !c.passed {
                println!("  {}", c.line());
            }
        }
        for n in &s.output.notes {
            println!("  note: {n}");
        }
    }
    if let Err(e) = report.write(&config.output_dir) {
        eprintln!("verify: cannot write report: {e}");
        return ExitCode::from(2);
    }
    println!("report written to {}", config.output_dir.display());
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
