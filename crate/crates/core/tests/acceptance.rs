//! Acceptance criteria 1-10 with their tolerances and time limits. Run with
//! `--nocapture` to see one line per criterion.

use std::process::Command;
use std::time::{Duration, Instant};

use relquant::harness::suites::{self, Sink};
use relquant::harness::{Check, Relation, RunConfig};

/// Every check a criterion must report, with its pinned bar.
const PINNED: &[(&str, Relation, f64)] = &[
    ("rest_energy_relative_error", Relation::AtMost, 1e-8),
    ("hj_residual_plane_wave_exact_sampling", Relation::AtMost, 1e-10),
    ("hj_residual_plane_wave_evolved_order", Relation::AtLeast, 1.8),
    ("refinement_levels", Relation::AtLeast, 4.0),
    ("density_residual_order", Relation::Within { target: 2.0 }, 0.2),
    ("continuity_residual_order", Relation::Within { target: 2.0 }, 0.2),
    ("random_carriers", Relation::AtLeast, 1000.0),
    ("diagonal_imaginary_part_max", Relation::AtMost, 1e-12),
    ("diagonal_real_part_min", Relation::AtLeast, -1e-12),
    ("gaussian_closed_form_max_error", Relation::AtMost, 1e-8),
    ("separation_derivative_vs_moment_relative", Relation::AtMost, 1e-6),
    ("amplitude_moment_vs_current_integral", Relation::AtMost, 1e-10),
    ("nonrelativistic_density_deviation", Relation::AtMost, 1e-3),
    ("antiparticle_density_min", Relation::AtLeast, f64::MIN_POSITIVE),
    ("antiparticle_density_integral", Relation::Within { target: 1.0 }, 1e-6),
    ("particle_branch_flags_mismatch", Relation::AtLeast, 1.0),
    ("expansion_error_order", Relation::Within { target: 3.0 }, 0.3),
    ("plane_wave_path_deviation", Relation::AtMost, 1e-9),
    ("plane_wave_path_completed", Relation::AtLeast, 1.0),
    ("guidance_consistency_order", Relation::AtLeast, 1.8),
    ("decoupled_metric_deviation", Relation::AtMost, 1e-8),
    ("decoupled_energy_vs_flat", Relation::AtMost, 1e-8),
    ("coupled_omega_0.5_converged", Relation::AtLeast, 1.0),
    ("coupled_omega_0.5_iterations", Relation::AtMost, 50.0),
    ("coupled_omega_0.5_field_residual", Relation::AtMost, 1e-8),
    ("coupled_omega_0.5_quantum_residual", Relation::AtMost, 1e-8),
    ("coupled_omega_0.5_continuity_residual", Relation::AtMost, 1e-8),
    ("coupled_omega_1.0_converged", Relation::AtLeast, 1.0),
    ("coupled_omega_1.0_iterations", Relation::AtMost, 50.0),
    ("coupled_omega_1.0_field_residual", Relation::AtMost, 1e-8),
    ("coupled_omega_1.0_quantum_residual", Relation::AtMost, 1e-8),
    ("coupled_omega_1.0_continuity_residual", Relation::AtMost, 1e-8),
    ("relaxation_energy_difference", Relation::AtMost, 1e-7),
    ("relaxation_potential_difference", Relation::AtMost, 1e-7),
    ("uniform_ball_potential_relative_error", Relation::AtMost, 1e-6),
];

fn expected(criterion: u8) -> &'static [&'static str] {
    match criterion {
        1 => &["rest_energy_relative_error", "hj_residual_plane_wave_exact_sampling", "hj_residual_plane_wave_evolved_order"],
        2 => &["refinement_levels", "density_residual_order", "continuity_residual_order"],
        3 => &["random_carriers", "diagonal_imaginary_part_max", "diagonal_real_part_min", "gaussian_closed_form_max_error"],
        4 => &["separation_derivative_vs_moment_relative", "amplitude_moment_vs_current_integral"],
        5 => &["nonrelativistic_density_deviation"],
        6 => &["antiparticle_density_min", "antiparticle_density_integral", "particle_branch_flags_mismatch"],
        7 => &["expansion_error_order"],
        8 => &["plane_wave_path_deviation", "plane_wave_path_completed", "guidance_consistency_order"],
        _ => &[
            "decoupled_metric_deviation",
            "decoupled_energy_vs_flat",
            "coupled_omega_0.5_converged",
            "coupled_omega_0.5_iterations",
            "coupled_omega_0.5_field_residual",
            "coupled_omega_0.5_quantum_residual",
            "coupled_omega_0.5_continuity_residual",
            "coupled_omega_1.0_converged",
            "coupled_omega_1.0_iterations",
            "coupled_omega_1.0_field_residual",
            "coupled_omega_1.0_quantum_residual",
            "coupled_omega_1.0_continuity_residual",
            "relaxation_energy_difference",
            "relaxation_potential_difference",
            "uniform_ball_potential_relative_error",
        ],
    }
}

fn criterion(n: u8, limit_s: u64, suite: impl FnOnce(&RunConfig, &mut Sink) -> relquant::Result<Vec<Check>>) {
    let cfg = RunConfig::builtin();
    let mut sink = Sink::discard();
    let start = Instant::now();
    let checks = suite(&cfg, &mut sink).unwrap_or_else(|e| panic!("criterion {n}: suite error {e}"));
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_s);

    let names: Vec<&str> = checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, expected(n), "criterion {n}: reported checks");
    for c in &checks {
        let (_, rel, tol) = PINNED.iter().find(|(name, ..)| *name == c.name).expect("pinned");
        assert_eq!((c.relation, c.tolerance, c.criterion), (*rel, *tol, n), "{} bar moved", c.name);
    }
    let passed = checks.iter().all(|c| c.passed) && elapsed <= limit;
    println!(
        "criterion {n:>2}: {} ({:.2} s of {limit_s} s)",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    for c in &checks {
        println!("    {}", c.describe());
    }
    for note in &sink.notes {
        println!("    note {note}");
    }
    assert!(checks.iter().all(|c| c.passed), "criterion {n} failed");
    assert!(elapsed <= limit, "criterion {n} took {elapsed:?}, limit {limit:?}");
}

#[test]
fn criterion_01_mass_shell() {
    criterion(1, 5, suites::mass_shell);
}

#[test]
fn criterion_02_residual_convergence() {
    criterion(2, 60, |c, s| suites::derivation_closure(c, 4, s));
}

#[test]
fn criterion_03_transform_positivity() {
    criterion(3, 30, |c, s| suites::transform_positivity(c, c.seed, s));
}

#[test]
fn criterion_04_momentum_correspondence() {
    criterion(4, 10, suites::operator_correspondence);
}

#[test]
fn criterion_05_nonrelativistic_limit() {
    criterion(5, 30, suites::nonrelativistic_limit);
}

#[test]
fn criterion_06_antiparticle_density() {
    criterion(6, 5, suites::antiparticle_normalization);
}

#[test]
fn criterion_07_expansion_order() {
    criterion(7, 10, suites::expansion_order);
}

#[test]
fn criterion_08_trajectories() {
    criterion(8, 10, suites::trajectories);
}

#[test]
fn criterion_09_self_consistent_gravity() {
    criterion(9, 120, suites::gravity);
}

#[test]
fn criterion_10_verify_all_binary() {
    let out = std::env::temp_dir().join(format!("relquant-acceptance-{}", std::process::id()));
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_relquant")).args(["verify-all", "--out"]).arg(&out).output().expect("binary runs");
    let elapsed = start.elapsed();
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).expect("report written")).unwrap();
    let _ = std::fs::remove_dir_all(&out);
    let ok = status.status.code() == Some(0) && elapsed <= Duration::from_secs(300);
    println!("criterion 10: {} ({:.2} s of 300 s)", if ok { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stdout));
    assert_eq!(report["passed"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), PINNED.len());
    assert!(elapsed <= Duration::from_secs(300), "verify-all took {elapsed:?}");
}
