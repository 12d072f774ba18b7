use std::path::PathBuf;
use std::time::Instant;

use super::config::RunConfig;
use super::report::{Check, RunReport};
use super::suites::{self, Sink};
use crate::{Error, Result};

/// Experiments exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Evolve,
    Stationary,
    Transform,
    Madelung,
    Trajectories,
    Gravity,
    VerifyAll,
    Converge,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Evolve => "evolve",
            Subcommand::Stationary => "stationary",
            Subcommand::Transform => "transform",
            Subcommand::Madelung => "madelung",
            Subcommand::Trajectories => "trajectories",
            Subcommand::Gravity => "gravity",
            Subcommand::VerifyAll => "verify-all",
            Subcommand::Converge => "converge",
        }
    }

    /// Acceptance criteria covered, 0 standing for the charge check.
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Subcommand::Evolve => &[0],
            Subcommand::Stationary => &[1],
            Subcommand::Transform => &[3, 4],
            Subcommand::Madelung => &[2, 5, 6, 7],
            Subcommand::Trajectories => &[8],
            Subcommand::Gravity => &[9],
            Subcommand::VerifyAll => &[1, 2, 3, 4, 5, 6, 7, 8, 9],
            Subcommand::Converge => &[2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    pub subcommand: Subcommand,
    /// Run file; the built-in configuration when absent.
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub levels: Option<usize>,
    pub seed: Option<u64>,
}

impl RunOptions {
    pub fn new(subcommand: Subcommand) -> Self {
        RunOptions { subcommand, config: None, out: None, levels: None, seed: None }
    }
}

fn suite_name(criterion: u8) -> &'static str {
    match criterion {
        0 => "charge_conservation",
        1 => "mass_shell",
        2 => "derivation_closure",
        3 => "transform_positivity",
        4 => "operator_correspondence",
        5 => "nonrelativistic_limit",
        6 => "antiparticle_normalization",
        7 => "expansion_order",
        8 => "trajectories",
        _ => "gravity",
    }
}

fn run_suite(criterion: u8, cfg: &RunConfig, levels: usize, seed: u64, sink: &mut Sink) -> Result<Vec<Check>> {
    match criterion {
        0 => suites::charge_conservation(cfg, sink),
        1 => suites::mass_shell(cfg, sink),
        2 => suites::derivation_closure(cfg, levels, sink),
        3 => suites::transform_positivity(cfg, seed, sink),
        4 => suites::operator_correspondence(cfg, sink),
        5 => suites::nonrelativistic_limit(cfg, sink),
        6 => suites::antiparticle_normalization(cfg, sink),
        7 => suites::expansion_order(cfg, sink),
        8 => suites::trajectories(cfg, sink),
        _ => suites::gravity(cfg, sink),
    }
}

/// Load the configuration, run the suites and write the report. Only
/// configuration problems come back as errors; a suite that fails to run is
/// recorded as a failed check.
pub fn execute(opts: &RunOptions) -> Result<RunReport> {
    let (mut cfg, text) = match &opts.config {
        Some(path) => RunConfig::load(path)?,
        None => (RunConfig::builtin(), super::config::DEFAULT_TOML.to_string()),
    };
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    let levels = opts.levels.unwrap_or(cfg.packet.levels);
    if levels < 2 {
        return Err(Error::Config("--levels must be at least 2".into()));
    }
    let out = opts.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from));
    let mut sink = match &out {
        Some(dir) => Sink::to_dir(dir.clone(), cfg.plots),
        None => Sink::discard(),
    };
    let mut report = RunReport::new(&cfg.name, opts.subcommand.name(), &text, cfg.seed);
    for &c in opts.subcommand.criteria() {
        let name = suite_name(c);
        let start = Instant::now();
        match run_suite(c, &cfg, levels, cfg.seed, &mut sink) {
            Ok(checks) => report.extend(checks),
            Err(Error::Config(msg)) => return Err(Error::Config(msg)),
            Err(e) => {
                report.notes.push(format!("{name}: {e}"));
                report.push(Check::failed(c, name));
            }
        }
        report.time(name, start.elapsed().as_secs_f64());
    }
    report.notes.append(&mut sink.notes);
    report.artifacts.append(&mut sink.written);
    if let Some(dir) = &out {
        report.artifacts.push(dir.join("report.json").display().to_string());
        report.artifacts.push(dir.join("summary.txt").display().to_string());
        report.write(dir)?;
    }
    Ok(report)
}

/// Run and print the summary. Exit code 0 when every check passes, 1 when
/// one fails and 2 for a configuration error.
pub fn run(opts: &RunOptions) -> i32 {
    match execute(opts) {
        Ok(report) => {
            print!("{}", report.summary());
            if report.passed {
                0
            } else {
                1
            }
        }
        Err(Error::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_config_file_is_a_config_error() {
        let mut o = RunOptions::new(Subcommand::Evolve);
        o.config = Some("/nonexistent/run.toml".into());
        assert!(matches!(execute(&o), Err(Error::Config(_))));
        assert_eq!(run(&o), 2);
    }

    #[test]
    fn evolve_passes_on_builtin_config() {
        let r = execute(&RunOptions::new(Subcommand::Evolve)).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert_eq!(r.timings.len(), 1);
    }

    #[test]
    fn every_criterion_is_reachable() {
        let mut seen: Vec<u8> = Subcommand::VerifyAll.criteria().to_vec();
        seen.extend(Subcommand::Evolve.criteria());
        seen.sort();
        assert_eq!(seen, (0..=9).collect::<Vec<_>>());
    }
}
