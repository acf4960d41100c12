//! Experiment configuration files (TOML).

use std::f64::consts::PI;
use std::path::Path as FsPath;

use ab_core::em_potentials::{GaugeFunction, GaugeSpec};
use ab_core::quantum_solver::{Absorber, Grid2D, QuantumOptions, SolverConfig};
use ab_core::{
    ClassicalOptions, ParticleParams, Path, PathMode, PotentialField, QuadratureOptions,
    SolenoidSpec, TwoPathSetup, Vec2, DEFAULT_EIKONAL_THRESHOLD,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seeds every randomized driver (loop shapes, gauge draws).
    #[serde(default)]
    pub seed: u64,
    pub field: FieldConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeSpec>,
    #[serde(default)]
    pub particle: ParticleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(default)]
    pub classical: ClassicalConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QuantumConfig>,
    #[serde(default, rename = "loop", skip_serializing_if = "Option::is_none")]
    pub loop_spec: Option<LoopConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    Solenoid {
        center: [f64; 2],
        radius: f64,
        #[serde(default)]
        flux: f64,
    },
    FluxLine {
        center: [f64; 2],
        #[serde(default)]
        flux: f64,
    },
    UniformB {
        b: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleConfig {
    pub m: f64,
    pub q: f64,
    pub hbar: f64,
    /// Launch speed; the de Broglie wavenumber is `m·speed/ħ`.
    pub speed: f64,
}

impl Default for ParticleConfig {
    fn default() -> Self {
        ParticleConfig {
            m: 1.0,
            q: 1.0,
            hbar: 1.0,
            speed: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub source: [f64; 2],
    pub slit_separation: f64,
    pub slit_plane_x: f64,
    pub screen_x: f64,
    pub screen_extent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalConfig {
    pub n_samples: usize,
    pub eikonal_threshold: f64,
    pub mode: PathMode,
    pub quadrature_tol: f64,
    pub step_length: f64,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        let d = ClassicalOptions::default();
        ClassicalConfig {
            n_samples: d.n_samples,
            eikonal_threshold: DEFAULT_EIKONAL_THRESHOLD,
            mode: d.mode,
            quadrature_tol: d.quadrature.tol,
            step_length: d.step_length,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantumConfig {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub origin: [f64; 2],
    pub dt: f64,
    pub residual_tol: f64,
    pub max_iterations: usize,
    /// Width of the absorbing layer in nodes; 0 disables it.
    pub absorber_width: usize,
    pub absorber_min_factor: f64,
    pub shield_radius: f64,
    pub slit_width: f64,
    pub wall_thickness: f64,
    pub packet_width: f64,
    pub packet_width_y: f64,
    pub saturation_tol: f64,
    pub saturation_interval: usize,
    pub saturation_floor: f64,
    pub max_steps: usize,
    /// Steps evolved per gauge in `gauge-check --quantum`.
    pub gauge_check_steps: usize,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        let p = ab_core::presets::reference_quantum();
        let a = p.solver.absorber.unwrap_or_default();
        QuantumConfig {
            nx: p.grid.nx,
            ny: p.grid.ny,
            dx: p.grid.dx,
            dy: p.grid.dy,
            origin: [p.grid.origin.x, p.grid.origin.y],
            dt: p.solver.dt,
            residual_tol: p.solver.residual_tol,
            max_iterations: p.solver.max_iterations,
            absorber_width: a.width,
            absorber_min_factor: a.min_factor,
            shield_radius: p.options.shield_radius,
            slit_width: p.options.slit_width,
            wall_thickness: p.options.wall_thickness,
            packet_width: p.options.packet_width,
            packet_width_y: p.options.packet_width_y,
            saturation_tol: p.options.saturation_tol,
            saturation_interval: p.options.saturation_interval,
            saturation_floor: p.options.saturation_floor,
            max_steps: p.options.max_steps,
            gauge_check_steps: 50,
        }
    }
}

/// Loop used by `phase-loop` (and by `gauge-check` when present).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoopConfig {
    Circle {
        center: [f64; 2],
        radius: f64,
        #[serde(default = "default_vertices")]
        vertices: usize,
        #[serde(default = "one")]
        winding: i32,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    /// Two half circles from `center − (r, 0)` to `center + (r, 0)`: `a`
    /// below the center, `b` above, so `a` then reversed `b` runs
    /// counter-clockwise.
    CirclePair {
        center: [f64; 2],
        radius: f64,
        #[serde(default = "default_vertices")]
        vertices: usize,
    },
    /// Explicit routes with shared endpoints; Δψ = phase(a) − phase(b).
    PathPair {
        a: Vec<[f64; 2]>,
        b: Vec<[f64; 2]>,
    },
}

fn default_vertices() -> usize {
    256
}

fn one() -> i32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Values are `qΦ/ħ` in radians.
    FluxPhase,
    /// Values are the flux Φ itself.
    Flux,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Classical,
    Quantum,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Classical => "classical",
            Mode::Quantum => "quantum",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    #[serde(default = "both_modes")]
    pub modes: Vec<Mode>,
}

fn both_modes() -> Vec<Mode> {
    vec![Mode::Classical, Mode::Quantum]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn vec2(a: [f64; 2]) -> Vec2 {
    Vec2::new(a[0], a[1])
}

fn bad(path: &str, reason: impl Into<String>) -> CliError {
    CliError::Config(format!("{path}: {}", reason.into()))
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(path, format!("must be finite and > 0, got {v}")))
    }
}

fn finite(path: &str, v: &[f64]) -> Result<(), CliError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(bad(path, "must be finite"))
    }
}

impl ExperimentConfig {
    pub fn load(path: &FsPath) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Check every section, naming the offending key.
    pub fn validate(&self) -> Result<(), CliError> {
        match &self.field {
            FieldConfig::Solenoid { center, radius, flux } => {
                finite("field.center", center)?;
                positive("field.radius", *radius)?;
                finite("field.flux", &[*flux])?;
            }
            FieldConfig::FluxLine { center, flux } => {
                finite("field.center", center)?;
                finite("field.flux", &[*flux])?;
            }
            FieldConfig::UniformB { b } => finite("field.b", &[*b])?,
        }
        if let Some(g) = &self.gauge {
            GaugeFunction::try_from(g.clone()).map_err(|e| bad("gauge", e.to_string()))?;
        }
        let p = &self.particle;
        positive("particle.m", p.m)?;
        positive("particle.hbar", p.hbar)?;
        positive("particle.speed", p.speed)?;
        finite("particle.q", &[p.q])?;
        if let Some(g) = &self.geometry {
            finite("geometry.source", &g.source)?;
            positive("geometry.slit_separation", g.slit_separation)?;
            positive("geometry.screen_extent", g.screen_extent)?;
            finite("geometry.slit_plane_x", &[g.slit_plane_x])?;
            finite("geometry.screen_x", &[g.screen_x])?;
        }
        let c = &self.classical;
        if c.n_samples < 16 {
            return Err(bad("classical.n_samples", "must be at least 16"));
        }
        positive("classical.eikonal_threshold", c.eikonal_threshold)?;
        positive("classical.quadrature_tol", c.quadrature_tol)?;
        positive("classical.step_length", c.step_length)?;
        if let Some(q) = &self.quantum {
            if q.nx < 16 {
                return Err(bad("quantum.nx", "must be at least 16"));
            }
            if q.ny < 16 {
                return Err(bad("quantum.ny", "must be at least 16"));
            }
            positive("quantum.dx", q.dx)?;
            positive("quantum.dy", q.dy)?;
            finite("quantum.origin", &q.origin)?;
            positive("quantum.dt", q.dt)?;
            positive("quantum.residual_tol", q.residual_tol)?;
            if q.max_iterations == 0 {
                return Err(bad("quantum.max_iterations", "must be ≥ 1"));
            }
            if q.absorber_width != 0 && q.absorber_width < 4 {
                return Err(bad("quantum.absorber_width", "must be 0 (off) or at least 4 nodes"));
            }
            if !(q.absorber_min_factor > 0.0 && q.absorber_min_factor <= 1.0) {
                return Err(bad("quantum.absorber_min_factor", "must lie in (0, 1]"));
            }
            for (k, v) in [
                ("quantum.shield_radius", q.shield_radius),
                ("quantum.slit_width", q.slit_width),
                ("quantum.wall_thickness", q.wall_thickness),
                ("quantum.packet_width", q.packet_width),
                ("quantum.packet_width_y", q.packet_width_y),
                ("quantum.saturation_tol", q.saturation_tol),
            ] {
                positive(k, v)?;
            }
            if q.saturation_interval == 0 {
                return Err(bad("quantum.saturation_interval", "must be ≥ 1"));
            }
            if q.max_steps == 0 {
                return Err(bad("quantum.max_steps", "must be ≥ 1"));
            }
        }
        if let Some(l) = &self.loop_spec {
            self.build_loop(l)?;
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(bad("sweep.values", "must not be empty"));
            }
            finite("sweep.values", &s.values)?;
            if s.modes.is_empty() {
                return Err(bad("sweep.modes", "must not be empty"));
            }
            if s.modes.contains(&Mode::Quantum) && self.quantum.is_none() {
                return Err(bad("sweep.modes", "quantum mode needs a [quantum] section"));
            }
        }
        if self.output.workers == Some(0) {
            return Err(bad("output.workers", "must be ≥ 1"));
        }
        Ok(())
    }

    pub fn params(&self) -> ParticleParams {
        ParticleParams {
            mass: self.particle.m,
            charge: self.particle.q,
            hbar: self.particle.hbar,
        }
    }

    pub fn gauge(&self) -> Option<GaugeFunction> {
        self.gauge
            .clone()
            .map(|g| GaugeFunction::try_from(g).expect("validated at load"))
    }

    /// The configured field without gauge.
    pub fn base_field(&self) -> PotentialField {
        match &self.field {
            FieldConfig::Solenoid { center, radius, flux } => PotentialField::Solenoid(SolenoidSpec {
                center: vec2(*center),
                radius: *radius,
                flux: *flux,
            }),
            FieldConfig::FluxLine { center, flux } => PotentialField::flux_line(vec2(*center), *flux),
            FieldConfig::UniformB { b } => PotentialField::uniform_b(*b),
        }
    }

    pub fn field(&self) -> PotentialField {
        match self.gauge() {
            Some(g) => self.base_field().apply_gauge(g),
            None => self.base_field(),
        }
    }

    /// Flux threading the configured field's singular region, if any.
    pub fn flux(&self) -> Option<(Vec2, f64)> {
        match &self.field {
            FieldConfig::Solenoid { center, flux, .. } | FieldConfig::FluxLine { center, flux } => {
                Some((vec2(*center), *flux))
            }
            FieldConfig::UniformB { .. } => None,
        }
    }

    pub fn setup(&self) -> Result<TwoPathSetup, CliError> {
        let g = self
            .geometry
            .ok_or_else(|| bad("geometry", "section required for fringe experiments"))?;
        let solenoid = match &self.field {
            FieldConfig::Solenoid { center, radius, flux } => SolenoidSpec {
                center: vec2(*center),
                radius: *radius,
                flux: *flux,
            },
            _ => return Err(bad("field.kind", "fringe experiments need a solenoid")),
        };
        let setup = TwoPathSetup {
            source: vec2(g.source),
            slit_separation: g.slit_separation,
            slit_plane_x: g.slit_plane_x,
            screen_x: g.screen_x,
            screen_extent: g.screen_extent,
            solenoid,
            gauge: self.gauge(),
            particle: self.params(),
            speed: self.particle.speed,
        };
        setup.validate().map_err(|e| bad("geometry", e.to_string()))?;
        Ok(setup)
    }

    pub fn classical_options(&self) -> ClassicalOptions {
        let c = &self.classical;
        ClassicalOptions {
            n_samples: c.n_samples,
            mode: c.mode,
            eikonal_threshold: c.eikonal_threshold,
            quadrature: QuadratureOptions::with_tol(c.quadrature_tol),
            step_length: c.step_length,
        }
    }

    pub fn quantum_parts(&self) -> Result<(Grid2D, SolverConfig, QuantumOptions), CliError> {
        let q = self
            .quantum
            .ok_or_else(|| bad("quantum", "section required for quantum mode"))?;
        let grid = Grid2D {
            nx: q.nx,
            ny: q.ny,
            dx: q.dx,
            dy: q.dy,
            origin: vec2(q.origin),
        };
        let solver = SolverConfig {
            dt: q.dt,
            residual_tol: q.residual_tol,
            max_iterations: q.max_iterations,
            absorber: (q.absorber_width > 0).then_some(Absorber {
                width: q.absorber_width,
                min_factor: q.absorber_min_factor,
            }),
        };
        solver.validate(&grid).map_err(|e| bad("quantum", e.to_string()))?;
        let options = QuantumOptions {
            slit_width: q.slit_width,
            wall_thickness: q.wall_thickness,
            shield_radius: q.shield_radius,
            packet_width: q.packet_width,
            packet_width_y: q.packet_width_y,
            saturation_tol: q.saturation_tol,
            saturation_interval: q.saturation_interval,
            saturation_floor: q.saturation_floor,
            max_steps: q.max_steps,
            eikonal_threshold: self.classical.eikonal_threshold,
        };
        Ok((grid, solver, options))
    }

    /// `(a, b)` for a path pair or `(loop, None)` for a closed loop.
    pub fn build_loop(&self, l: &LoopConfig) -> Result<(Path, Option<Path>), CliError> {
        let pts = |v: &[[f64; 2]]| v.iter().copied().map(vec2).collect::<Vec<_>>();
        let r = match l {
            LoopConfig::Circle { center, radius, vertices, winding } => {
                Path::circle(vec2(*center), *radius, *vertices, *winding).map(|p| (p, None))
            }
            LoopConfig::Polygon { vertices } => Path::polygon(pts(vertices)).map(|p| (p, None)),
            LoopConfig::CirclePair { center, radius, vertices } => {
                let c = vec2(*center);
                let half = (*vertices / 2).max(2);
                let arc = |sign: f64| {
                    (0..=half)
                        .map(|k| {
                            // Exact endpoints so the halves join bit for bit.
                            if k == 0 || k == half {
                                let x = if k == 0 { -1.0 } else { 1.0 };
                                return c + Vec2::new(x * *radius, 0.0);
                            }
                            let a = PI * k as f64 / half as f64;
                            c + Vec2::new(-a.cos(), sign * a.sin()) * *radius
                        })
                        .collect::<Vec<_>>()
                };
                if !(*radius > 0.0) {
                    return Err(bad("loop.radius", "must be > 0"));
                }
                Path::open(arc(-1.0)).and_then(|a| Path::open(arc(1.0)).map(|b| (a, Some(b))))
            }
            LoopConfig::PathPair { a, b } => {
                Path::open(pts(a)).and_then(|pa| Path::open(pts(b)).map(|pb| (pa, Some(pb))))
            }
        };
        r.map_err(|e| bad("loop", e.to_string()))
    }

    pub fn sweep_phase(&self, value: f64) -> Result<f64, CliError> {
        let s = self.sweep.as_ref().ok_or_else(|| bad("sweep", "section required"))?;
        Ok(match s.parameter {
            SweepParameter::FluxPhase => value,
            SweepParameter::Flux => value * self.particle.q / self.particle.hbar,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [field]
        kind = "solenoid"
        center = [0.0, 0.0]
        radius = 0.5
        flux = 6.283185307179586

        [loop]
        kind = "circle_pair"
        center = [0.0, 0.0]
        radius = 1.0
    "#;

    #[test]
    fn negative_mass_names_key() {
        let text = format!("{MINIMAL}\n[particle]\nm = -1.0\nq = 1.0\nhbar = 1.0\nspeed = 1.0\n");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("particle.m"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\n[particle]\nmass = 1.0\n");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn multivalued_gauge_rejected() {
        let text = format!("{MINIMAL}\n[gauge]\nkind = \"angular\"\ncenter = [0.0, 0.0]\ncoefficient = 1.0\n");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("gauge:"), "{err}");
    }

    #[test]
    fn round_trip_is_idempotent() {
        let a = ExperimentConfig::parse(MINIMAL).unwrap();
        let text = a.to_toml();
        let b = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(text, b.to_toml());
    }

    #[test]
    fn circle_pair_encloses_counter_clockwise() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        let (a, b) = cfg.build_loop(cfg.loop_spec.as_ref().unwrap()).unwrap();
        let lp = a.concat(&b.unwrap().reversed()).unwrap();
        assert_eq!(lp.winding_number(Vec2::zeros()).unwrap(), 1);
    }
}
