//! Check records, the JSON report and CSV tables.

use crate::cli::config::ExperimentConfig;
use crate::error::Result;
use serde::Serialize;
use std::path::Path;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// value <= tolerance
    AtMost,
    /// value >= tolerance
    AtLeast,
    /// |value - reference| <= tolerance
    Within,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
    pub runtime_s: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, reference: f64, tolerance: f64, comparison: Comparison) -> Self {
        let passed = value.is_finite()
            && match comparison {
                Comparison::AtMost => value <= tolerance,
                Comparison::AtLeast => value >= tolerance,
                Comparison::Within => (value - reference).abs() <= tolerance,
            };
        Self { name: name.into(), value, reference, tolerance, comparison, passed, runtime_s: 0.0 }
    }

    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, 0.0, tolerance, Comparison::AtMost)
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, bound, bound, Comparison::AtLeast)
    }

    pub fn within(name: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        Self::new(name, value, reference, tolerance, Comparison::Within)
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.runtime_s = start.elapsed().as_secs_f64();
        self
    }

    pub fn line(&self) -> String {
        let rel = match self.comparison {
            Comparison::AtMost => format!("{:.3e} <= {:.1e}", self.value, self.tolerance),
            Comparison::AtLeast => format!("{:.3} >= {:.2}", self.value, self.tolerance),
            Comparison::Within => format!("{:.3} = {:.3} +- {:.2}", self.value, self.reference, self.tolerance),
        };
        format!("{} {} ({rel})", if self.passed { "ok  " } else { "FAIL" }, self.name)
    }
}

/// A named table written as CSV.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:.17e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Checks and tables produced by one suite.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteOutput {
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

impl SuiteOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn extend(&mut self, other: SuiteOutput) {
        self.checks.extend(other.checks);
        self.tables.extend(other.tables);
        self.notes.extend(other.notes);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub package: &'static str,
    pub version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
    pub threads: usize,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub runtime_s: f64,
    #[serde(flatten)]
    pub output: SuiteOutput,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
    pub environment: Environment,
    pub config: ExperimentConfig,
}

impl Report {
    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.suites.iter().flat_map(|s| s.output.checks.iter())
    }

    /// Writes report.json and one CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(self).map_err(|e| crate::Error::Io(e.to_string()))?;
        std::fs::write(dir.join("report.json"), json)?;
        for s in &self.suites {
            for t in &s.output.tables {
                std::fs::write(dir.join(format!("{}_{}.csv", s.suite, t.name)), t.to_csv())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        assert!(Check::at_most("a", 1e-7, 1e-6).passed);
        assert!(!Check::at_most("a", f64::NAN, 1e-6).passed);
        assert!(Check::at_least("b", 1.9, 1.8).passed);
        assert!(!Check::within("c", -1.3, -1.0, 0.15).passed);
        let mut t = Table::new("t", &["x", "y"]);
        t.push(vec![1.0, 2.0]);
        assert!(t.to_csv().starts_with("x,y\n1.0"));
    }
}
