//! Action along characteristics and its mapping to wave phase, `ψ = S/ħ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::classical_dynamics::{hamiltonian, kinetic_momentum, ParticleParams, ParticleState, Trajectory};
use crate::em_potentials::{line_integral_a, Path, PotentialField, QuadratureOptions};
use crate::{Error, Result, Vec2};

/// Default interpretation of `kL ≫ 1`.
pub const DEFAULT_EIKONAL_THRESHOLD: f64 = 100.0;

/// Paths are considered to share an endpoint when closer than this.
const ENDPOINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionBreakdown {
    /// `∫ ½m|v|² dt`
    pub kinetic: f64,
    /// `q ∫ A·dr`
    pub interaction: f64,
    /// `−∫ qφ dt`
    pub potential: f64,
    pub total: f64,
}

impl ActionBreakdown {
    fn new(kinetic: f64, interaction: f64, potential: f64) -> Self {
        ActionBreakdown {
            kinetic,
            interaction,
            potential,
            total: kinetic + interaction + potential,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParameters {
    pub omega: f64,
    pub wavevector: Vec2,
    pub wavelength: f64,
}

impl WaveParameters {
    pub fn wavenumber(&self) -> f64 {
        self.wavevector.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EikonalReport {
    pub kl: f64,
    pub scale: f64,
    pub threshold: f64,
    pub valid: bool,
}

/// Accumulate the action along an integrated trajectory: trapezoid sums over
/// the samples for the kinetic and scalar parts, and the line integral of `A`
/// along the sampled polyline for the interaction part.
pub fn accumulate_action(traj: &Trajectory, field: &PotentialField) -> Result<ActionBreakdown> {
    if traj.samples.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if &traj.field != field {
        return Err(Error::FieldMismatch);
    }
    let params = &traj.params;
    let q = params.charge;
    let mut lagr_kin = Vec::with_capacity(traj.samples.len());
    let mut scalar = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let pi = kinetic_momentum(s, params, field)?;
        lagr_kin.push(pi.norm_squared() / (2.0 * params.mass));
        scalar.push(q * field.eval_phi(s.position)?);
    }
    let mut kinetic = 0.0;
    let mut potential = 0.0;
    for (i, w) in traj.samples.windows(2).enumerate() {
        let h = w[1].t - w[0].t;
        kinetic += 0.5 * h * (lagr_kin[i] + lagr_kin[i + 1]);
        potential -= 0.5 * h * (scalar[i] + scalar[i + 1]);
    }
    let interaction = if traj.samples.len() >= 2 {
        let shadow = Path::open(traj.positions())?;
        q * line_integral_a(field, &shadow, &QuadratureOptions::default())?
    } else {
        0.0
    };
    Ok(ActionBreakdown::new(kinetic, interaction, potential))
}

/// `S_in = q ∫ A·dr` along a path; no time parametrization involved.
pub fn interaction_action(
    path: &Path,
    field: &PotentialField,
    charge: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    if charge == 0.0 {
        return Ok(0.0);
    }
    Ok(charge * line_integral_a(field, path, opts)?)
}

/// `ψ = S/ħ`, never reduced modulo 2π.
pub fn phase_of(action: f64, hbar: f64) -> f64 {
    action / hbar
}

/// `Δψ = (q/ħ)(∫_a A·dr − ∫_b A·dr)` for two paths with common endpoints,
/// i.e. the flux phase of the loop `a` followed by reversed `b`.
pub fn phase_shift(
    path_a: &Path,
    path_b: &Path,
    field: &PotentialField,
    params: &ParticleParams,
    opts: &QuadratureOptions,
) -> Result<f64> {
    let start_gap = (path_a.start() - path_b.start()).norm();
    let end_gap = (path_a.end() - path_b.end()).norm();
    if start_gap > ENDPOINT_TOLERANCE || end_gap > ENDPOINT_TOLERANCE {
        return Err(Error::EndpointMismatch { start_gap, end_gap });
    }
    let sa = interaction_action(path_a, field, params.charge, opts)?;
    let sb = interaction_action(path_b, field, params.charge, opts)?;
    Ok(phase_of(sa - sb, params.hbar))
}

/// `ω = H/ħ`, `k = (P − qA)/ħ`.
pub fn wave_parameters(
    state: &ParticleState,
    params: &ParticleParams,
    field: &PotentialField,
) -> Result<WaveParameters> {
    let pi = kinetic_momentum(state, params, field)?;
    let k = pi / params.hbar;
    let kn = k.norm();
    if kn == 0.0 {
        return Err(Error::ZeroVelocity);
    }
    Ok(WaveParameters {
        omega: hamiltonian(state, params, field)? / params.hbar,
        wavevector: k,
        wavelength: 2.0 * PI / kn,
    })
}

/// Short-wavelength diagnostic: valid when `|k|·L ≥ threshold`.
pub fn eikonal_check(wave: &WaveParameters, scale: f64, threshold: f64) -> Result<EikonalReport> {
    eikonal_check_wavenumber(wave.wavenumber(), scale, threshold)
}

pub fn eikonal_check_wavenumber(k: f64, scale: f64, threshold: f64) -> Result<EikonalReport> {
    if !(scale > 0.0) {
        return Err(Error::invalid("scale", "characteristic length must be > 0"));
    }
    let kl = k * scale;
    Ok(EikonalReport {
        kl,
        scale,
        threshold,
        valid: kl >= threshold,
    })
}
