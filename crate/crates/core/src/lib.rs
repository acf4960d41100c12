//! Aharonov–Bohm interference computed two ways.
//!
//! The classical route integrates Hamilton's equations for a charged particle,
//! accumulates the action along the characteristics and reads the interference
//! phase off the interaction term `q ∫ A·dr`. The quantum route evolves the
//! minimally coupled Schrödinger equation on a lattice carrying Peierls link
//! phases and measures the fringe displacement on a screen. Both routes consume
//! the same [`PotentialField`] models.
//!
//! Units are natural by default (`ħ = m = q = 1`) but every constant is an
//! explicit parameter.

pub mod action_phase;
pub mod classical_dynamics;
pub mod em_potentials;
mod error;
pub mod interference;
pub mod presets;
pub mod quantum_solver;

pub use error::{Error, Result};

pub use action_phase::{
    accumulate_action, eikonal_check, eikonal_check_wavenumber, interaction_action, phase_of, phase_shift, wave_parameters,
    ActionBreakdown, EikonalReport, WaveParameters, DEFAULT_EIKONAL_THRESHOLD,
};
pub use classical_dynamics::{
    canonical_momentum, eom_rhs, hamiltonian, integrate, kinetic_momentum, ParticleParams,
    ParticleState, StateDerivative, Trajectory,
};
pub use em_potentials::{
    line_integral_a, numeric_curl, GaugeFunction, GaugeSpec, Path, PotentialField,
    QuadratureOptions, SolenoidSpec,
};
pub use interference::{
    build_paths, classical_fringes, estimate_fringe_period, fringe_shift, ClassicalOptions,
    FringePattern, PathMode, TwoPathSetup,
};

/// Planar vector (position, momentum, vector potential).
pub type Vec2 = nalgebra::Vector2<f64>;
/// Spatial Jacobian, `J[(i, j)] = ∂A_i/∂x_j`.
pub type Mat2 = nalgebra::Matrix2<f64>;

/// Wrap a phase-like quantity measured in cycles into `[-0.5, 0.5)`.
pub fn wrap_half(cycles: f64) -> f64 {
    let w = cycles - cycles.round();
    if w >= 0.5 {
        w - 1.0
    } else if w < -0.5 {
        w + 1.0
    } else {
        w
    }
}

/// Distance between two values on the unit circle (values in cycles).
pub fn cyclic_distance(a: f64, b: f64) -> f64 {
    wrap_half(a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_half_range() {
        assert_eq!(wrap_half(0.5), -0.5);
        assert_eq!(wrap_half(-0.5), -0.5);
        assert!((wrap_half(1.25) - 0.25).abs() < 1e-15);
        assert!((wrap_half(-0.75) - 0.25).abs() < 1e-15);
        assert!(cyclic_distance(0.49, -0.49) < 0.021);
    }
}
