//! Ready-made experiment configurations.

use std::f64::consts::PI;

use crate::classical_dynamics::ParticleParams;
use crate::em_potentials::SolenoidSpec;
use crate::interference::{ClassicalOptions, TwoPathSetup};
use crate::quantum_solver::{Absorber, Grid2D, QuantumOptions, SolverConfig};
use crate::Vec2;

#[derive(Debug, Clone)]
pub struct QuantumPreset {
    pub setup: TwoPathSetup,
    pub grid: Grid2D,
    pub solver: SolverConfig,
    pub options: QuantumOptions,
}

/// The 512 × 512 desk-scale two-slit configuration in natural units:
/// λ = 8, slits 64 apart, screen 288 downstream of the slit wall.
pub fn reference_quantum() -> QuantumPreset {
    QuantumPreset {
        setup: TwoPathSetup {
            source: Vec2::new(96.0, 0.0),
            slit_separation: 64.0,
            slit_plane_x: 160.0,
            screen_x: 448.0,
            screen_extent: 95.5,
            solenoid: SolenoidSpec {
                center: Vec2::new(184.0, 0.0),
                radius: 4.0,
                flux: 0.0,
            },
            gauge: None,
            particle: ParticleParams::default(),
            speed: PI / 4.0,
        },
        grid: Grid2D {
            nx: 512,
            ny: 512,
            dx: 1.0,
            dy: 1.0,
            origin: Vec2::new(0.0, -255.5),
        },
        solver: SolverConfig {
            dt: 0.5,
            residual_tol: 1e-10,
            max_iterations: 1000,
            absorber: Some(Absorber {
                width: 32,
                min_factor: 0.95,
            }),
        },
        options: QuantumOptions::default(),
    }
}

/// Half-size variant on 256 × 256 (same wavelength, so about 1/8 of the
/// cost) for quicker checks. Slits sit relatively farther apart to keep
/// several fringes on the shorter screen.
pub fn compact_quantum() -> QuantumPreset {
    let mut p = reference_quantum();
    p.setup.source = Vec2::new(48.0, 0.0);
    p.setup.slit_separation = 48.0;
    p.setup.slit_plane_x = 80.0;
    p.setup.screen_x = 224.0;
    p.setup.screen_extent = 60.0;
    p.setup.solenoid.center = Vec2::new(92.0, 0.0);
    p.setup.solenoid.radius = 2.0;
    p.grid.nx = 256;
    p.grid.ny = 256;
    p.grid.origin = Vec2::new(0.0, -127.5);
    p.solver.absorber = Some(Absorber {
        width: 16,
        min_factor: 0.95,
    });
    p.options.slit_width = 8.0;
    p.options.shield_radius = 3.0;
    p.options.packet_width = 6.0;
    p.options.packet_width_y = 40.0;
    p
}

/// Paraxial classical setup: θ ≤ 0.02 rad, λ = 0.008, fringe period 4 and
/// 80 screen samples per fringe with the default 801 samples.
pub fn paraxial_classical() -> (TwoPathSetup, ClassicalOptions) {
    (
        TwoPathSetup {
            source: Vec2::new(-50.0, 0.0),
            slit_separation: 2.0,
            slit_plane_x: 0.0,
            screen_x: 1000.0,
            screen_extent: 20.0,
            solenoid: SolenoidSpec {
                center: Vec2::new(1.0, 0.0),
                radius: 0.2,
                flux: 0.0,
            },
            gauge: None,
            particle: ParticleParams::default(),
            speed: 250.0 * PI,
        },
        ClassicalOptions::default(),
    )
}
