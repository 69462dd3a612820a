//! Experiment runner behind the `verify` binary.

pub mod config;
pub mod report;
pub mod suites;

use crate::error::Result;
use config::ExperimentConfig;
use report::{Environment, Report, SuiteReport};
use std::time::Instant;
use suites::{run_suite, Context, Settings};

/// Runs the configured suite (or every suite) and collects a report.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let ctx = Context::new(Settings::from_config(config)?);
    let mut suites = Vec::new();
    for s in config.suite.expand() {
        let t0 = Instant::now();
        let output = run_suite(&ctx, s);
        suites.push(SuiteReport { suite: s.to_string(), passed: output.passed(), runtime_s: t0.elapsed().as_secs_f64(), output });
    }
    Ok(Report {
        passed: suites.iter().all(|s| s.passed),
        suites,
        environment: Environment::current(),
        config: config.clone(),
    })
}
