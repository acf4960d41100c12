use serde::{Deserialize, Serialize};

use super::{
    build_hamiltonian, Barrier, Complex, CrankNicolson, GaussianPacket, Grid2D, SolverConfig,
    StepReport, Wavefunction,
};
use crate::action_phase::{eikonal_check_wavenumber, DEFAULT_EIKONAL_THRESHOLD};
use crate::em_potentials::{line_integral_a, Path, PotentialField, QuadratureOptions};
use crate::interference::{estimate_fringe_period, FringePattern, TwoPathSetup};
use crate::{Error, Result, Vec2};

/// Lattice-specific parts of the two-slit experiment. Lengths are physical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuantumOptions {
    pub slit_width: f64,
    pub wall_thickness: f64,
    /// Hard-wall disc around the solenoid; must cover the flux tube.
    pub shield_radius: f64,
    /// Amplitude widths of the launched packet.
    pub packet_width: f64,
    pub packet_width_y: f64,
    /// Stop once the screen dose grows by less than this fraction over one
    /// `saturation_interval`.
    pub saturation_tol: f64,
    pub saturation_interval: usize,
    /// Dose (as a fraction of the launched norm) that must have arrived
    /// before saturation is tested, so the empty early phase does not count.
    pub saturation_floor: f64,
    pub max_steps: usize,
    pub eikonal_threshold: f64,
}

impl Default for QuantumOptions {
    fn default() -> Self {
        QuantumOptions {
            slit_width: 16.0,
            wall_thickness: 2.0,
            shield_radius: 6.0,
            packet_width: 12.0,
            packet_width_y: 64.0,
            saturation_tol: 1e-4,
            saturation_interval: 100,
            saturation_floor: 1e-3,
            max_steps: 20_000,
            eikonal_threshold: DEFAULT_EIKONAL_THRESHOLD,
        }
    }
}

impl QuantumOptions {
    pub fn validate(&self, setup: &TwoPathSetup) -> Result<()> {
        let positive = [
            ("slit_width", self.slit_width),
            ("wall_thickness", self.wall_thickness),
            ("shield_radius", self.shield_radius),
            ("packet_width", self.packet_width),
            ("packet_width_y", self.packet_width_y),
            ("saturation_tol", self.saturation_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, "must be finite and > 0"));
            }
        }
        if self.saturation_interval == 0 || self.max_steps == 0 {
            return Err(Error::invalid("max_steps", "step counts must be ≥ 1"));
        }
        if self.slit_width >= setup.slit_separation {
            return Err(Error::invalid("slit_width", "slits would merge"));
        }
        if self.shield_radius < setup.solenoid.radius {
            return Err(Error::invalid("shield_radius", "must cover the solenoid radius"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct QuantumRun {
    pub pattern: FringePattern,
    pub steps: usize,
    /// Time-integrated probability that reached the screen segment.
    pub dose: f64,
    pub final_state: Wavefunction,
    pub max_iterations: usize,
    pub max_residual: f64,
}

/// Evolve the two-slit experiment and return the screen pattern.
pub fn run_experiment(
    setup: &TwoPathSetup,
    grid: &Grid2D,
    cfg: &SolverConfig,
    opts: &QuantumOptions,
) -> Result<FringePattern> {
    run_experiment_with(setup, grid, cfg, opts, &mut |_, _| {}).map(|r| r.pattern)
}

/// Barriers used by [`run_experiment`]: the slit wall and the shield disc.
pub fn experiment_barriers(setup: &TwoPathSetup, grid: &Grid2D, opts: &QuantumOptions) -> Vec<Barrier> {
    // Nudge the boundaries so nodes exactly on the slit plane are solid.
    let eps = 1e-9 * grid.dx;
    let half = 0.5 * opts.slit_width;
    let openings = [true, false]
        .into_iter()
        .map(|upper| {
            let c = setup.slit(upper).y;
            [c - half, c + half]
        })
        .collect();
    vec![
        Barrier::Wall {
            x_min: setup.slit_plane_x - eps,
            x_max: setup.slit_plane_x + opts.wall_thickness - eps,
            openings,
        },
        Barrier::Disc {
            center: setup.solenoid.center,
            radius: opts.shield_radius,
        },
    ]
}

/// Packet at the source moving toward `+x` with kinetic momentum `ħk`.
///
/// Left of the slit wall the field is curl-free, so `χ(r) = ∫ A·dl` along
/// the straight line from the source is a valid local gauge; multiplying by
/// `exp(iqχ/ħ)` turns the plane-wave factor into one whose kinetic momentum
/// is `ħk` in any gauge.
fn launch_packet(
    setup: &TwoPathSetup,
    grid: &Grid2D,
    field: &PotentialField,
    opts: &QuantumOptions,
    walls: &[Barrier],
) -> Result<Wavefunction> {
    let packet = GaussianPacket {
        center: setup.source,
        width_x: opts.packet_width,
        width_y: opts.packet_width_y,
        wavevector: Vec2::new(setup.wavenumber(), 0.0),
    };
    let quad = QuadratureOptions::default();
    let coupling = setup.particle.charge / setup.particle.hbar;
    let mut psi = Wavefunction::zeros(*grid);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let p = grid.node(i, j);
            if p.x >= setup.slit_plane_x || walls.iter().any(|b| b.covers(p)) {
                continue;
            }
            let a = packet.amplitude(p);
            if a.norm() < 1e-15 {
                continue;
            }
            let chi = if p == setup.source {
                0.0
            } else {
                line_integral_a(field, &Path::open(vec![setup.source, p])?, &quad)?
            };
            psi.amplitudes[grid.index(i, j)] = a * Complex::from_polar(1.0, coupling * chi);
        }
    }
    psi.normalize()?;
    Ok(psi)
}

fn screen_pattern(
    setup: &TwoPathSetup,
    grid: &Grid2D,
    rows: &[usize],
    dose: &[f64],
    opts: &QuantumOptions,
    partial: bool,
) -> Result<FringePattern> {
    let screen_y: Vec<f64> = rows.iter().map(|&j| grid.y(j)).collect();
    let fringe_period = match estimate_fringe_period(&screen_y, dose) {
        Ok(p) => p,
        Err(_) if partial => setup.fringe_period(),
        Err(e) => return Err(e),
    };
    let mut pattern = FringePattern {
        screen_y,
        intensity: dose.to_vec(),
        fringe_period,
        ab_phase: setup.ab_phase(),
        eikonal: eikonal_check_wavenumber(
            setup.wavenumber(),
            setup.slit_separation,
            opts.eikonal_threshold,
        )?,
    };
    pattern.normalize();
    Ok(pattern)
}

/// [`run_experiment`] with a per-step observer and run statistics.
///
/// The screen records `Σ |Ψ|² Δt` at the column nearest `setup.screen_x`
/// for every node with `|y| ≤ screen_extent`. The pattern's fringe period is
/// estimated from the data.
pub fn run_experiment_with(
    setup: &TwoPathSetup,
    grid: &Grid2D,
    cfg: &SolverConfig,
    opts: &QuantumOptions,
    observer: &mut dyn FnMut(&Wavefunction, &StepReport),
) -> Result<QuantumRun> {
    setup.validate()?;
    grid.validate()?;
    cfg.validate(grid)?;
    opts.validate(setup)?;
    if setup.solenoid.center.x - setup.solenoid.radius <= setup.slit_plane_x {
        return Err(Error::invalid(
            "solenoid",
            "flux tube must lie downstream of the slit plane",
        ));
    }
    if !grid.contains(setup.source) {
        return Err(Error::invalid("source", "outside the grid"));
    }
    let column = grid
        .column_of(setup.screen_x)
        .ok_or_else(|| Error::invalid("screen_x", "outside the grid"))?;
    if let Some(a) = &cfg.absorber {
        if column + a.width >= grid.nx {
            return Err(Error::invalid("screen_x", "screen sits inside the absorbing layer"));
        }
    }
    let rows: Vec<usize> = (0..grid.ny)
        .filter(|&j| grid.y(j).abs() <= setup.screen_extent)
        .collect();
    if rows.len() < 16 {
        return Err(Error::invalid("screen_extent", "fewer than 16 screen nodes"));
    }
    let field = setup.field();
    let walls = experiment_barriers(setup, grid, opts);
    let h = build_hamiltonian(grid, &field, &setup.particle, &walls)?;
    let mut psi = launch_packet(setup, grid, &field, opts, &walls)?;
    let mut cn = CrankNicolson::new(&h, cfg)?;

    let dy = grid.dy;
    let mut dose = vec![0.0; rows.len()];
    let mut total = 0.0;
    let mut checkpoint = 0.0;
    let (mut max_iterations, mut max_residual) = (0, 0.0f64);
    for steps in 1..=opts.max_steps {
        let report = cn.step(&mut psi)?;
        max_iterations = max_iterations.max(report.iterations);
        max_residual = max_residual.max(report.residual);
        let mut arrived = 0.0;
        for (d, &j) in dose.iter_mut().zip(&rows) {
            let p = psi.at(column, j).norm_sqr() * cfg.dt;
            *d += p;
            arrived += p;
        }
        total += arrived * dy;
        observer(&psi, &report);
        if steps % opts.saturation_interval == 0 {
            let grew = total - checkpoint;
            checkpoint = total;
            if total >= opts.saturation_floor && grew <= opts.saturation_tol * total {
                return Ok(QuantumRun {
                    pattern: screen_pattern(setup, grid, &rows, &dose, opts, false)?,
                    steps,
                    dose: total,
                    final_state: psi,
                    max_iterations,
                    max_residual,
                });
            }
        }
    }
    let partial = screen_pattern(setup, grid, &rows, &dose, opts, true)?;
    Err(Error::Timeout {
        steps: opts.max_steps,
        partial: Box::new(partial),
    })
}
