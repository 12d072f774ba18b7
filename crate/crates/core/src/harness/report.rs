use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// How a measured value is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `value <= tolerance`
    AtMost,
    /// `value >= tolerance`
    AtLeast,
    /// `|value - target| <= tolerance`
    Within { target: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Acceptance criterion number, 0 for auxiliary checks.
    pub criterion: u8,
    pub value: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Check {
    fn new(criterion: u8, name: &str, value: f64, tolerance: f64, relation: Relation) -> Self {
        let passed = value.is_finite()
            && match relation {
                Relation::AtMost => value <= tolerance,
                Relation::AtLeast => value >= tolerance,
                Relation::Within { target } => (value - target).abs() <= tolerance,
            };
        Check { name: name.into(), criterion, value, tolerance, relation, passed }
    }

    pub fn at_most(criterion: u8, name: &str, value: f64, tolerance: f64) -> Self {
        Check::new(criterion, name, value, tolerance, Relation::AtMost)
    }

    pub fn at_least(criterion: u8, name: &str, value: f64, bound: f64) -> Self {
        Check::new(criterion, name, value, bound, Relation::AtLeast)
    }

    pub fn within(criterion: u8, name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Check::new(criterion, name, value, tolerance, Relation::Within { target })
    }

    /// A check that could not be evaluated.
    pub fn failed(criterion: u8, name: &str) -> Self {
        Check::new(criterion, name, f64::NAN, 0.0, Relation::AtMost)
    }

    pub fn describe(&self) -> String {
        let rel = match self.relation {
            Relation::AtMost => format!("<= {:.3e}", self.tolerance),
            Relation::AtLeast => format!(">= {:.3e}", self.tolerance),
            Relation::Within { target } => format!("= {target} +- {:.3e}", self.tolerance),
        };
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} [{}] {:<44} {:>12.5e} {rel}", self.criterion, self.name, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub suite: String,
    pub seconds: f64,
}

/// Outcome of one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub subcommand: String,
    /// `sha256("blob <len>\0" + config text)`, hex.
    pub config_hash: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub timings: Vec<Timing>,
    pub artifacts: Vec<String>,
    pub notes: Vec<String>,
}

/// Git-style content hash of the configuration text.
pub fn config_hash(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", text.len()).as_bytes());
    h.update(text.as_bytes());
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl RunReport {
    pub fn new(experiment: &str, subcommand: &str, config_text: &str, seed: u64) -> Self {
        RunReport {
            experiment: experiment.into(),
            subcommand: subcommand.into(),
            config_hash: config_hash(config_text),
            seed,
            passed: true,
            checks: Vec::new(),
            timings: Vec::new(),
            artifacts: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn time(&mut self, suite: &str, seconds: f64) {
        self.timings.push(Timing { suite: suite.into(), seconds });
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// Plain-text rendering of the same content as [`RunReport::to_json`].
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment {} / {}", self.experiment, self.subcommand);
        let _ = writeln!(s, "config sha256 {}  seed {}", self.config_hash, self.seed);
        for c in &self.checks {
            let _ = writeln!(s, "{}", c.describe());
        }
        for t in &self.timings {
            let _ = writeln!(s, "time {:<24} {:.3} s", t.suite, t.seconds);
        }
        for n in &self.notes {
            let _ = writeln!(s, "note {n}");
        }
        for a in &self.artifacts {
            let _ = writeln!(s, "wrote {a}");
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(s, "{} ({} checks, {failed} failed)", if self.passed { "PASSED" } else { "FAILED" }, self.checks.len());
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json()?)?;
        std::fs::write(dir.join("summary.txt"), self.summary())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_matches_git_style_blob_digest() {
        // printf 'blob 0\0' | sha256sum
        assert_eq!(config_hash(""), "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813");
        assert_ne!(config_hash("a"), config_hash("b"));
    }

    #[test]
    fn relations_and_pass_flag() {
        let mut r = RunReport::new("t", "verify-all", "x", 1);
        r.push(Check::at_most(1, "small", 1e-12, 1e-10));
        r.push(Check::within(2, "slope", 2.1, 2.0, 0.2));
        assert!(r.passed);
        r.push(Check::at_least(8, "order", 1.5, 1.8));
        assert!(!r.passed);
        r.push(Check::failed(9, "crashed"));
        assert!(!r.checks[3].passed);
        let json = r.to_json().unwrap();
        let text = r.summary();
        for c in &r.checks {
            assert!(json.contains(&c.name) && text.contains(&c.name));
        }
        assert!(text.contains("FAILED (4 checks, 2 failed)"));
    }
}
