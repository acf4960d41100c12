use ab_core::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0xD1A),
        failure_persistence: None,
        ..Config::default()
    }
}

fn solenoid() -> PotentialField {
    PotentialField::solenoid(Vec2::new(0.5, -0.5), 1.0, 3.0).unwrap()
}

proptest! {
    #![proptest_config(config(48))]

    /// A ≠ 0 along the whole pass, yet the track is straight at constant speed.
    #[test]
    fn kinetic_momentum_constant_outside(
        impact in 1.3..5.0f64,
        heading in 0.0..std::f64::consts::TAU,
        speed in 0.1..3.0f64,
    ) {
        let field = solenoid();
        let center = field.solenoid_spec().unwrap().center;
        let params = ParticleParams::default();
        let dir = Vec2::new(heading.cos(), heading.sin());
        let normal = Vec2::new(-dir.y, dir.x);
        let half = 6.0;
        let start = center + normal * impact - dir * half;
        let v = dir * speed;
        let p0 = canonical_momentum(v, start, &params, &field).unwrap();
        let t_end = 2.0 * half / speed;
        let traj = integrate(ParticleState::new(0.0, start, p0), &params, &field, t_end, 0.005 / speed).unwrap();
        let pi0 = v * params.mass;
        let mut worst = 0.0f64;
        for s in &traj.samples {
            let pi = kinetic_momentum(s, &params, &field).unwrap();
            worst = worst.max((pi - pi0).norm());
        }
        prop_assert!(worst / traj.duration() <= 1e-8, "{}", worst);
    }

    #[test]
    fn momentum_conversions_round_trip(
        x in -10.0..10.0f64,
        y in -10.0..10.0f64,
        vx in -5.0..5.0f64,
        vy in -5.0..5.0f64,
        charge in -3.0..3.0f64,
        mass in 0.1..10.0f64,
    ) {
        let field = solenoid();
        let r = Vec2::new(x, y);
        let params = ParticleParams::new(mass, charge, 1.0).unwrap();
        let v = Vec2::new(vx, vy);
        let p = canonical_momentum(v, r, &params, &field).unwrap();
        let back = kinetic_momentum(&ParticleState::new(0.0, r, p), &params, &field).unwrap();
        let scale = (v * mass).norm() + (field.eval_a(r).unwrap() * charge).norm();
        prop_assert!((back - v * mass).norm() <= 4.0 * f64::EPSILON * scale.max(1.0));
        let rest = canonical_momentum(Vec2::zeros(), r, &params, &field).unwrap();
        prop_assert_eq!(rest, field.eval_a(r).unwrap() * charge);
    }
}
