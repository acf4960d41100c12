//! Hamilton's equations for a charged particle in a static potential.
//!
//! The state is canonical, `(r, P)`, with kinetic momentum `mv = P − qA(r)`.
//! Integration is fixed-step RK4; field models supply analytic `∇A` and `∇φ`.

use serde::{Deserialize, Serialize};

use crate::em_potentials::PotentialField;
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleParams {
    pub mass: f64,
    pub charge: f64,
    pub hbar: f64,
}

impl Default for ParticleParams {
    fn default() -> Self {
        ParticleParams {
            mass: 1.0,
            charge: 1.0,
            hbar: 1.0,
        }
    }
}

impl ParticleParams {
    pub fn new(mass: f64, charge: f64, hbar: f64) -> Result<Self> {
        let p = ParticleParams { mass, charge, hbar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::invalid("mass", "must be finite and > 0"));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::invalid("hbar", "must be finite and > 0"));
        }
        if !self.charge.is_finite() {
            return Err(Error::invalid("charge", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub t: f64,
    pub position: Vec2,
    /// Canonical momentum `P = mv + qA`.
    pub momentum: Vec2,
}

impl ParticleState {
    pub fn new(t: f64, position: Vec2, momentum: Vec2) -> Self {
        ParticleState {
            t,
            position,
            momentum,
        }
    }
}

/// Time derivative of a canonical state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub velocity: Vec2,
    pub force: Vec2,
}

/// Samples of one characteristic, in strictly increasing time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: ParticleParams,
    pub field: PotentialField,
    pub samples: Vec<ParticleState>,
    pub max_step: f64,
}

impl Trajectory {
    pub fn first(&self) -> Option<&ParticleState> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&ParticleState> {
        self.samples.last()
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.samples.iter().map(|s| s.position).collect()
    }

    pub fn duration(&self) -> f64 {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }
}

/// `P − qA(r)`.
pub fn kinetic_momentum(
    state: &ParticleState,
    params: &ParticleParams,
    field: &PotentialField,
) -> Result<Vec2> {
    Ok(state.momentum - field.eval_a(state.position)? * params.charge)
}

/// `mv + qA(r)`.
pub fn canonical_momentum(
    velocity: Vec2,
    position: Vec2,
    params: &ParticleParams,
    field: &PotentialField,
) -> Result<Vec2> {
    Ok(velocity * params.mass + field.eval_a(position)? * params.charge)
}

/// `H = |P − qA|²/(2m) + qφ`.
pub fn hamiltonian(
    state: &ParticleState,
    params: &ParticleParams,
    field: &PotentialField,
) -> Result<f64> {
    let pi = kinetic_momentum(state, params, field)?;
    Ok(pi.norm_squared() / (2.0 * params.mass) + params.charge * field.eval_phi(state.position)?)
}

/// `ṙ = ∂H/∂P = (P − qA)/m`, `Ṗ = −∂H/∂r = (q/m) Jᵀ(P − qA) − q∇φ`.
pub fn eom_rhs(
    state: &ParticleState,
    params: &ParticleParams,
    field: &PotentialField,
) -> Result<StateDerivative> {
    let q = params.charge;
    let pi = kinetic_momentum(state, params, field)?;
    let jac = field.grad_a(state.position)?;
    let force = jac.transpose() * pi * (q / params.mass) - field.grad_phi(state.position)? * q;
    Ok(StateDerivative {
        velocity: pi / params.mass,
        force,
    })
}

fn rk4_step(
    s: &ParticleState,
    h: f64,
    params: &ParticleParams,
    field: &PotentialField,
) -> Result<ParticleState> {
    let at = |r: Vec2, p: Vec2| eom_rhs(&ParticleState::new(s.t, r, p), params, field);
    let k1 = at(s.position, s.momentum)?;
    let k2 = at(
        s.position + k1.velocity * (0.5 * h),
        s.momentum + k1.force * (0.5 * h),
    )?;
    let k3 = at(
        s.position + k2.velocity * (0.5 * h),
        s.momentum + k2.force * (0.5 * h),
    )?;
    let k4 = at(s.position + k3.velocity * h, s.momentum + k3.force * h)?;
    let position = s.position
        + (k1.velocity + k2.velocity * 2.0 + k3.velocity * 2.0 + k4.velocity) * (h / 6.0);
    let momentum =
        s.momentum + (k1.force + k2.force * 2.0 + k3.force * 2.0 + k4.force) * (h / 6.0);
    if !(position.iter().chain(momentum.iter()).all(|v| v.is_finite())) {
        return Err(Error::SingularPoint(position));
    }
    Ok(ParticleState::new(s.t + h, position, momentum))
}

/// Fixed-step RK4 from `initial.t` to `t_end`, sampling every step. The last
/// step is shortened so the final sample lands on `t_end` exactly.
pub fn integrate(
    initial: ParticleState,
    params: &ParticleParams,
    field: &PotentialField,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    params.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", "must be finite and > 0"));
    }
    if !(t_end > initial.t) {
        return Err(Error::invalid("t_end", "must exceed the initial time"));
    }
    let span = t_end - initial.t;
    let n_steps = ((span / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let mut traj = Trajectory {
        params: *params,
        field: field.clone(),
        samples: Vec::with_capacity(n_steps + 1),
        max_step: dt,
    };
    traj.samples.push(initial);
    let mut state = initial;
    for i in 0..n_steps {
        let t_next = if i + 1 == n_steps {
            t_end
        } else {
            initial.t + (i + 1) as f64 * dt
        };
        match rk4_step(&state, t_next - state.t, params, field) {
            Ok(mut next) => {
                next.t = t_next;
                traj.samples.push(next);
                state = next;
            }
            Err(Error::SingularPoint(_)) => {
                return Err(Error::SingularityHit {
                    t: state.t,
                    partial: Box::new(traj),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::em_potentials::GaugeFunction;

    fn unit() -> ParticleParams {
        ParticleParams::default()
    }

    fn sol() -> PotentialField {
        PotentialField::solenoid(Vec2::zeros(), 1.0, 2.0 * PI).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let f = sol();
        let r = Vec2::new(2.0, 0.0);
        let at_rest = ParticleState::new(0.0, r, f.eval_a(r).unwrap());
        assert_eq!(hamiltonian(&at_rest, &unit(), &f).unwrap(), 0.0);

        let free = PotentialField::uniform_b(0.0);
        let s = ParticleState::new(0.0, r, Vec2::new(3.0, 0.0));
        let m2 = ParticleParams::new(2.0, 1.0, 1.0).unwrap();
        assert!((hamiltonian(&s, &m2, &free).unwrap() - 9.0 / 4.0).abs() < 1e-15);

        let s = ParticleState::new(0.0, r, Vec2::new(0.0, 1.5));
        assert!((hamiltonian(&s, &unit(), &f).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lorentz_force_vanishes_outside() {
        let f = sol();
        let s = ParticleState::new(0.0, Vec2::new(2.0, 1.0), Vec2::new(0.4, -0.3));
        let d = eom_rhs(&s, &unit(), &f).unwrap();
        assert!(d.velocity.norm() > 0.1);
        // d(mv)/dt = Ṗ − q J ṙ
        let jac = f.grad_a(s.position).unwrap();
        let dkin = d.force - jac * d.velocity;
        assert!(dkin.norm() < 1e-15);
    }

    #[test]
    fn free_motion() {
        let f = PotentialField::uniform_b(0.0);
        let s = ParticleState::new(0.0, Vec2::new(1.0, 2.0), Vec2::new(1.0, 0.0));
        let d = eom_rhs(&s, &unit(), &f).unwrap();
        assert_eq!(d.force, Vec2::zeros());
        let traj = integrate(s, &unit(), &f, 10.0, 0.3).unwrap();
        let end = traj.last().unwrap();
        assert_eq!(end.t, 10.0);
        assert!((end.position - Vec2::new(11.0, 2.0)).norm() <= 1e-10);
    }

    #[test]
    fn samples_strictly_increasing_with_bounded_spacing() {
        let traj = integrate(
            ParticleState::new(0.5, Vec2::new(3.0, 0.0), Vec2::new(0.0, 1.0)),
            &unit(),
            &sol(),
            2.05,
            0.1,
        )
        .unwrap();
        for w in traj.samples.windows(2) {
            let h = w[1].t - w[0].t;
            assert!(h > 0.0 && h <= 0.1 + 1e-15);
        }
        assert_eq!(traj.last().unwrap().t, 2.05);
    }

    #[test]
    fn momentum_round_trip() {
        let f = sol();
        let p = ParticleParams::new(1.0, 2.0, 1.0).unwrap();
        let r = Vec2::new(2.0, 0.0);
        let pc = canonical_momentum(Vec2::new(1.0, 0.0), r, &p, &f).unwrap();
        assert!((pc - Vec2::new(1.0, 1.0)).norm() < 1e-15);
        let back = kinetic_momentum(&ParticleState::new(0.0, r, pc), &p, &f).unwrap();
        assert!((back - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        let neutral = ParticleParams::new(1.0, 0.0, 1.0).unwrap();
        let v = Vec2::new(0.3, 0.2);
        assert_eq!(canonical_momentum(v, r, &neutral, &f).unwrap(), v);
        let at_rest = canonical_momentum(Vec2::zeros(), r, &unit(), &f).unwrap();
        assert_eq!(at_rest, f.eval_a(r).unwrap());
    }

    #[test]
    fn flux_line_hit_returns_partial() {
        let f = PotentialField::flux_line(Vec2::zeros(), 1.0);
        // Neutral, so the track is exactly straight and lands on the line.
        let neutral = ParticleParams::new(1.0, 0.0, 1.0).unwrap();
        let s = ParticleState::new(0.0, Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0));
        match integrate(s, &neutral, &f, 3.0, 0.5) {
            Err(Error::SingularityHit { partial, t }) => {
                assert!(!partial.samples.is_empty());
                assert!(t < 1.0);
            }
            other => panic!("expected singularity, got {other:?}"),
        }
    }

    #[test]
    fn gauge_covariant_tracks() {
        let f = sol();
        let chi = GaugeFunction::Sum(vec![
            GaugeFunction::Gaussian {
                amplitude: 1.5,
                center: Vec2::new(2.0, 1.0),
                width: 1.2,
            },
            GaugeFunction::Linear {
                gradient: Vec2::new(0.3, -0.2),
                offset: 1.0,
            },
        ]);
        let g = f.apply_gauge(chi.clone());
        let p = unit();
        let r0 = Vec2::new(-3.0, 1.5);
        let p0 = canonical_momentum(Vec2::new(1.0, 0.1), r0, &p, &f).unwrap();
        let a = integrate(ParticleState::new(0.0, r0, p0), &p, &f, 5.0, 1e-3).unwrap();
        let p0g = p0 + chi.gradient(r0) * p.charge;
        let b = integrate(ParticleState::new(0.0, r0, p0g), &p, &g, 5.0, 1e-3).unwrap();
        for (sa, sb) in a.samples.iter().zip(&b.samples) {
            assert!((sa.position - sb.position).norm() <= 1e-8);
            let diff = sb.momentum - sa.momentum - chi.gradient(sb.position) * p.charge;
            assert!(diff.norm() <= 1e-8);
        }
    }
}
