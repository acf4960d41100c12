//! End-to-end lattice runs on the 256 × 256 preset (about 25 s each).

use std::f64::consts::PI;
use std::sync::OnceLock;

use ab_core::presets::{compact_quantum, QuantumPreset};
use ab_core::quantum_solver::*;
use ab_core::*;

fn run(p: &QuantumPreset, phase: f64) -> FringePattern {
    run_experiment(&p.setup.with_ab_phase(phase), &p.grid, &p.solver, &p.options).unwrap()
}

fn baseline() -> &'static (FringePattern, FringePattern) {
    static RUNS: OnceLock<(FringePattern, FringePattern)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let p = compact_quantum();
        (run(&p, 0.0), run(&p, PI))
    })
}

#[test]
fn zero_flux_pattern_is_mirror_symmetric() {
    let (zero, _) = baseline();
    assert!(zero.mirror_asymmetry() < 0.02);
    assert!(!zero.eikonal.valid, "kL = {}", zero.eikonal.kl);
}

#[test]
fn half_quantum_shifts_half_period() {
    let (zero, half) = baseline();
    let s = fringe_shift(half, zero).unwrap();
    assert!(cyclic_distance(s, 0.5) <= 0.05, "{s}");
    assert_eq!(half.ab_phase, PI);
}

#[test]
fn full_quantum_is_periodic() {
    let (zero, _) = baseline();
    let full = run(&compact_quantum(), 2.0 * PI);
    let s = fringe_shift(&full, zero).unwrap();
    assert!(cyclic_distance(s, 0.0) <= 0.05, "{s}");
}

#[test]
fn larger_shield_leaves_shift_unchanged() {
    let (zero, half) = baseline();
    let base = fringe_shift(half, zero).unwrap();
    let mut p = compact_quantum();
    p.options.shield_radius *= 1.2;
    let wide = fringe_shift(&run(&p, PI), &run(&p, 0.0)).unwrap();
    assert!(cyclic_distance(base, wide) <= 0.01, "{base} vs {wide}");
}

#[test]
fn step_cap_returns_partial_pattern() {
    let mut p = compact_quantum();
    p.options.max_steps = 40;
    match run_experiment(&p.setup, &p.grid, &p.solver, &p.options) {
        Err(Error::Timeout { steps, partial }) => {
            assert_eq!(steps, 40);
            assert!(!partial.screen_y.is_empty());
            assert_eq!(partial.screen_y.len(), partial.intensity.len());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn oversized_step_reports_solver_failure() {
    let mut p = compact_quantum();
    p.solver.dt = 1e4;
    p.solver.max_iterations = 20;
    match run_experiment(&p.setup, &p.grid, &p.solver, &p.options) {
        Err(Error::SolverFailure { iterations, residual }) => {
            assert_eq!(iterations, 20);
            assert!(residual > p.solver.residual_tol);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn flux_upstream_of_wall_is_rejected() {
    let mut p = compact_quantum();
    p.setup.solenoid.center.x = p.setup.slit_plane_x - 10.0;
    assert!(run_experiment(&p.setup, &p.grid, &p.solver, &p.options).is_err());
}
