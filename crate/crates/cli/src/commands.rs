//! The CLI verbs as library calls.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};
use std::time::Instant;

use ab_core::em_potentials::line_integral_a_quadrature;
use ab_core::quantum_solver::{
    build_hamiltonian, experiment_barriers, gauge_rephase, run_experiment_with, CrankNicolson,
    GaussianPacket, QuantumRun, Wavefunction,
};
use ab_core::{
    classical_fringes, cyclic_distance, estimate_fringe_period, fringe_shift, line_integral_a,
    wrap_half, EikonalReport, Error as CoreError, FringePattern, GaugeFunction, Path, PotentialField,
    QuadratureOptions, Vec2,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, FieldConfig, Mode};
use crate::error::CliError;
use crate::output::{
    atomic_write, fmt_f64, fringes_csv, partial_path, read_fringes_csv, rel, sha256_hex,
    snapshot_csv, Manifest, RunRecord,
};

/// Tolerance on closed-loop phase changes under a gauge transformation.
pub const LOOP_GAUGE_TOL: f64 = 1e-8;
/// Pointwise tolerance on classical fringe intensities under a gauge.
pub const FRINGE_GAUGE_TOL: f64 = 1e-9;
/// Sup-norm tolerance between the rephased and the gauge-evolved lattice state.
pub const QUANTUM_GAUGE_TOL: f64 = 1e-8;

/// A loaded config plus where and how to run it.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub quiet: bool,
}

impl Context {
    /// Hash of the canonical TOML with the `[output]` section cleared, so
    /// the same physics hashes the same wherever it is written.
    pub fn config_hash(&self) -> String {
        let mut c = self.config.clone();
        c.output = Default::default();
        sha256_hex(c.to_toml().as_bytes())
    }

    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        atomic_write(&path, contents.as_bytes())?;
        Ok(path)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| CliError::Io(format!("thread pool: {e}")))
    }
}

// ---------------------------------------------------------------------------
// phase-loop

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopReport {
    pub delta_psi: f64,
    /// Magnetic flux through the loop, counted with its winding.
    pub enclosed_flux: f64,
    /// Winding about the flux tube; 0 for uniform fields.
    pub winding: i32,
    /// `q·enclosed_flux/ħ`.
    pub flux_phase: f64,
}

fn shoelace(path: &Path) -> f64 {
    0.5 * path
        .segments()
        .map(|(a, b)| a.x * b.y - a.y * b.x)
        .sum::<f64>()
}

/// Δψ for the configured loop, with the closed-form flux prediction.
pub fn loop_report(cfg: &ExperimentConfig, opts: &QuadratureOptions) -> Result<LoopReport, CliError> {
    let spec = cfg
        .loop_spec
        .as_ref()
        .ok_or_else(|| CliError::Config("loop: section required for phase-loop".into()))?;
    let (a, b) = cfg.build_loop(spec)?;
    let field = cfg.field();
    let params = cfg.params();
    let (delta_psi, contour) = match &b {
        Some(b) => (
            ab_core::phase_shift(&a, b, &field, &params, opts)?,
            a.concat(&b.reversed())?,
        ),
        None => (
            params.charge * line_integral_a(&field, &a, opts)? / params.hbar,
            a.clone(),
        ),
    };
    let (winding, enclosed_flux) = match &cfg.field {
        FieldConfig::UniformB { b } => (0, b * shoelace(&contour)),
        FieldConfig::Solenoid { center, flux, .. } | FieldConfig::FluxLine { center, flux } => {
            let w = contour.winding_number(Vec2::new(center[0], center[1]))?;
            (w, f64::from(w) * flux)
        }
    };
    Ok(LoopReport {
        delta_psi,
        enclosed_flux,
        winding,
        flux_phase: params.charge * enclosed_flux / params.hbar,
    })
}

pub fn phase_loop(ctx: &Context) -> Result<LoopReport, CliError> {
    let t0 = Instant::now();
    let quad = QuadratureOptions::with_tol(ctx.config.classical.quadrature_tol);
    let r = loop_report(&ctx.config, &quad)?;
    if let FieldConfig::Solenoid { center, radius, .. } = &ctx.config.field {
        let spec = ctx.config.loop_spec.as_ref().expect("checked in loop_report");
        let (a, b) = ctx.config.build_loop(spec)?;
        let c = Vec2::new(center[0], center[1]);
        let clearance = b.iter().fold(a.distance_to(c), |m, p| m.min(p.distance_to(c)));
        if clearance < *radius {
            ctx.say(format!(
                "warning: loop enters the flux tube (closest approach {clearance:.4} < radius {radius}); enclosed flux is only partial"
            ));
        }
    }
    let csv = format!(
        "delta_psi,enclosed_flux,winding,flux_phase,difference\n{},{},{},{},{}\n",
        fmt_f64(r.delta_psi),
        fmt_f64(r.enclosed_flux),
        r.winding,
        fmt_f64(r.flux_phase),
        fmt_f64(r.delta_psi - r.flux_phase)
    );
    let path = ctx.write("phase_loop.csv", &csv)?;
    ctx.say(format!("delta_psi     = {:.12}", r.delta_psi));
    ctx.say(format!("winding       = {}", r.winding));
    ctx.say(format!("enclosed flux = {:.12}", r.enclosed_flux));
    ctx.say(format!("q*flux/hbar   = {:.12}", r.flux_phase));
    ctx.say(format!("difference    = {:.3e}", r.delta_psi - r.flux_phase));
    let hash = ctx.config_hash();
    let mut rec = RunRecord::new("phase-loop", &hash);
    rec.outputs.push(rel(&ctx.out_dir, &path));
    rec.elapsed_s = t0.elapsed().as_secs_f64();
    Manifest::merge_into(&ctx.out_dir, &hash, vec![("phase_loop".into(), rec)])?;
    Ok(r)
}

// ---------------------------------------------------------------------------
// fringes

/// One fringe computation for `cfg` with the flux phase overridden when
/// `ab_phase` is given. Quantum timeouts surface as `CoreError::Timeout`
/// carrying the partial pattern.
pub fn compute_fringes(
    cfg: &ExperimentConfig,
    mode: Mode,
    ab_phase: Option<f64>,
) -> Result<(FringePattern, Option<QuantumRun>), CliError> {
    let mut setup = cfg.setup()?;
    if let Some(phase) = ab_phase {
        if cfg.particle.q == 0.0 {
            return Err(CliError::Config("particle.q: flux phase sweeps need q ≠ 0".into()));
        }
        setup = setup.with_ab_phase(phase);
    }
    match mode {
        Mode::Classical => Ok((classical_fringes(&setup, &cfg.classical_options())?, None)),
        Mode::Quantum => {
            let (grid, solver, opts) = cfg.quantum_parts()?;
            let run = run_experiment_with(&setup, &grid, &solver, &opts, &mut |_, _| {})?;
            Ok((run.pattern.clone(), Some(run)))
        }
    }
}

pub fn fringes(ctx: &Context, mode: Mode, snapshot: bool) -> Result<FringePattern, CliError> {
    let t0 = Instant::now();
    let hash = ctx.config_hash();
    let id = format!("fringes_{}", mode.name());
    let file = format!("{id}.csv");
    let mut rec = RunRecord::new("fringes", &hash);
    rec.mode = Some(mode.name().into());
    let result = compute_fringes(&ctx.config, mode, None);
    rec.elapsed_s = t0.elapsed().as_secs_f64();
    match result {
        Ok((pattern, run)) => {
            let path = ctx.write(&file, &fringes_csv(&pattern))?;
            rec.outputs.push(rel(&ctx.out_dir, &path));
            if let Some(run) = &run {
                rec.steps = Some(run.steps);
                if snapshot {
                    let p = ctx.write("snapshot_quantum.csv", &snapshot_csv(&run.final_state))?;
                    rec.outputs.push(rel(&ctx.out_dir, &p));
                }
                ctx.say(format!(
                    "{} steps, screen dose {:.6}, at most {} solver iterations per step",
                    run.steps, run.dose, run.max_iterations
                ));
            } else if snapshot {
                ctx.say("note: --snapshot only applies to quantum runs");
            }
            rec = rec.with_pattern(&pattern);
            if mode == Mode::Classical && !pattern.eikonal.valid {
                ctx.say(format!("warning: {}", crate::output::eikonal_warning(&pattern.eikonal)));
            }
            ctx.say(format!(
                "wrote {} ({} samples, fringe period {:.6})",
                path.display(),
                pattern.screen_y.len(),
                pattern.fringe_period
            ));
            Manifest::merge_into(&ctx.out_dir, &hash, vec![(id, rec)])?;
            Ok(pattern)
        }
        Err(CliError::Core(CoreError::Timeout { steps, partial })) => {
            let path = partial_path(&ctx.out_dir.join(&file));
            atomic_write(&path, fringes_csv(&partial).as_bytes())?;
            rec.status = "timeout".into();
            rec.steps = Some(steps);
            rec.outputs.push(rel(&ctx.out_dir, &path));
            rec = rec.with_pattern(&partial);
            Manifest::merge_into(&ctx.out_dir, &hash, vec![(id, rec)])?;
            ctx.say(format!("timeout after {steps} steps; partial pattern in {}", path.display()));
            Err(CliError::Core(CoreError::Timeout { steps, partial }))
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// gauge-check

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub invariant: String,
    pub delta: f64,
    pub tolerance: f64,
}

impl InvariantCheck {
    pub fn passed(&self) -> bool {
        self.delta <= self.tolerance
    }
}

fn loop_phase_full(
    cfg: &ExperimentConfig,
    field: &PotentialField,
    a: &Path,
    b: Option<&Path>,
    opts: &QuadratureOptions,
) -> Result<f64, CliError> {
    let integral = |p: &Path| -> Result<f64, CliError> {
        let est = line_integral_a_quadrature(field, p, opts)?;
        if !est.converged {
            return Err(CliError::Core(CoreError::QuadratureFailure {
                estimate: est.value,
                error_bound: est.error_bound,
            }));
        }
        Ok(est.value)
    };
    let mut s = integral(a)?;
    if let Some(b) = b {
        s -= integral(b)?;
    }
    Ok(cfg.particle.q * s / cfg.particle.hbar)
}

fn loop_phase_fast(
    cfg: &ExperimentConfig,
    field: &PotentialField,
    a: &Path,
    b: Option<&Path>,
    opts: &QuadratureOptions,
) -> Result<f64, CliError> {
    let params = cfg.params();
    Ok(match b {
        Some(b) => ab_core::phase_shift(a, b, field, &params, opts)?,
        None => params.charge * line_integral_a(field, a, opts)? / params.hbar,
    })
}

/// Classical invariants of `cfg` under `gauge`: the loop phase (both
/// quadrature routes) when a loop is configured and the fringe pattern
/// when a geometry is.
pub fn classical_gauge_checks(
    cfg: &ExperimentConfig,
    gauge: &GaugeFunction,
) -> Result<Vec<InvariantCheck>, CliError> {
    let base = cfg.base_field();
    let gauged = base.apply_gauge(gauge.clone());
    let quad = QuadratureOptions::with_tol(cfg.classical.quadrature_tol);
    let mut out = Vec::new();
    if let Some(spec) = &cfg.loop_spec {
        let (a, b) = cfg.build_loop(spec)?;
        let fast0 = loop_phase_fast(cfg, &base, &a, b.as_ref(), &quad)?;
        let fast1 = loop_phase_fast(cfg, &gauged, &a, b.as_ref(), &quad)?;
        out.push(InvariantCheck {
            invariant: "loop_phase".into(),
            delta: (fast1 - fast0).abs(),
            tolerance: LOOP_GAUGE_TOL,
        });
        let full0 = loop_phase_full(cfg, &base, &a, b.as_ref(), &quad)?;
        let full1 = loop_phase_full(cfg, &gauged, &a, b.as_ref(), &quad)?;
        out.push(InvariantCheck {
            invariant: "loop_phase_full_quadrature".into(),
            delta: (full1 - full0).abs(),
            tolerance: LOOP_GAUGE_TOL,
        });
    }
    if cfg.geometry.is_some() {
        let mut setup = cfg.setup()?;
        let opts = cfg.classical_options();
        setup.gauge = None;
        let p0 = classical_fringes(&setup, &opts)?;
        setup.gauge = Some(gauge.clone());
        let p1 = classical_fringes(&setup, &opts)?;
        let delta = p0
            .intensity
            .iter()
            .zip(&p1.intensity)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        out.push(InvariantCheck {
            invariant: "classical_fringes".into(),
            delta,
            tolerance: FRINGE_GAUGE_TOL,
        });
    }
    if out.is_empty() {
        return Err(CliError::Config(
            "gauge-check needs a [loop] or a [geometry] section".into(),
        ));
    }
    Ok(out)
}

/// Evolve the same packet under `A` and under `A + ∇χ` for `steps` steps and
/// return `max |e^{iqχ/ħ}Ψ_A − Ψ_{A+∇χ}|`. With `rephase = false` the gauged
/// run starts from the untransformed packet, which breaks covariance on
/// purpose; it exists to show the check can fail.
pub fn quantum_gauge_delta(
    cfg: &ExperimentConfig,
    gauge: &GaugeFunction,
    rephase: bool,
    steps: usize,
) -> Result<f64, CliError> {
    let (grid, solver, opts) = cfg.quantum_parts()?;
    let params = cfg.params();
    let base = cfg.base_field();
    let gauged = base.apply_gauge(gauge.clone());
    let (barriers, center) = match cfg.setup() {
        Ok(setup) => (experiment_barriers(&setup, &grid, &opts), setup.source),
        Err(_) => (Vec::new(), 0.5 * (grid.origin + grid.max_corner())),
    };
    let packet = GaussianPacket {
        center,
        width_x: opts.packet_width,
        width_y: opts.packet_width_y,
        wavevector: Vec2::new(cfg.particle.m * cfg.particle.speed / cfg.particle.hbar, 0.0),
    };
    let h0 = build_hamiltonian(&grid, &base, &params, &barriers)?;
    let h1 = build_hamiltonian(&grid, &gauged, &params, &barriers)?;
    let mut psi0 = Wavefunction::gaussian(grid, &packet);
    h0.pin_walls(&mut psi0);
    psi0.normalize()?;
    let mut psi1 = if rephase {
        gauge_rephase(&psi0, gauge, params.charge, params.hbar)
    } else {
        psi0.clone()
    };
    let mut cn0 = CrankNicolson::new(&h0, &solver)?;
    let mut cn1 = CrankNicolson::new(&h1, &solver)?;
    for _ in 0..steps {
        cn0.step(&mut psi0)?;
        cn1.step(&mut psi1)?;
    }
    let expected = gauge_rephase(&psi0, gauge, params.charge, params.hbar);
    Ok(expected.max_abs_diff(&psi1)?)
}

pub fn gauge_check(ctx: &Context, quantum: bool) -> Result<Vec<InvariantCheck>, CliError> {
    let t0 = Instant::now();
    let gauge = ctx
        .config
        .gauge()
        .ok_or_else(|| CliError::Config("gauge: section required for gauge-check".into()))?;
    let mut checks = classical_gauge_checks(&ctx.config, &gauge)?;
    if quantum {
        let steps = ctx.config.quantum.map(|q| q.gauge_check_steps).unwrap_or_default();
        checks.push(InvariantCheck {
            invariant: "quantum_state".into(),
            delta: quantum_gauge_delta(&ctx.config, &gauge, true, steps)?,
            tolerance: QUANTUM_GAUGE_TOL,
        });
    }
    let mut csv = String::from("invariant,delta,tolerance,status\n");
    for c in &checks {
        let status = if c.passed() { "pass" } else { "fail" };
        let _ = writeln!(csv, "{},{},{},{status}", c.invariant, fmt_f64(c.delta), fmt_f64(c.tolerance));
        ctx.say(format!("{:<28} delta {:.3e}  tol {:.0e}  {status}", c.invariant, c.delta, c.tolerance));
    }
    let path = ctx.write("gauge_check.csv", &csv)?;
    let hash = ctx.config_hash();
    let mut rec = RunRecord::new("gauge-check", &hash);
    rec.outputs.push(rel(&ctx.out_dir, &path));
    rec.elapsed_s = t0.elapsed().as_secs_f64();
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.invariant.as_str())
        .collect();
    if !failed.is_empty() {
        rec.status = "fail".into();
    }
    Manifest::merge_into(&ctx.out_dir, &hash, vec![("gauge_check".into(), rec)])?;
    if failed.is_empty() {
        Ok(checks)
    } else {
        Err(CliError::Invariant(failed.join(", ")))
    }
}

// ---------------------------------------------------------------------------
// compare

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareReport {
    /// In fringe periods of `b`, wrapped to `[−0.5, 0.5)`; positive is toward `−y`.
    pub shift: f64,
    pub period: f64,
    pub phase: f64,
}

pub const SIGN_CONVENTION: &str = "positive shift = pattern a displaced toward -y relative to b; \
     phase = 2*pi*shift; a loop enclosing the flux counter-clockwise gives positive phase";

fn fringe_file(dir: &FsPath, mode: Option<Mode>) -> Result<(Mode, PathBuf), CliError> {
    let candidates: Vec<Mode> = match mode {
        Some(m) => vec![m],
        None => vec![Mode::Classical, Mode::Quantum],
    };
    let found: Vec<(Mode, PathBuf)> = candidates
        .into_iter()
        .map(|m| (m, dir.join(format!("fringes_{}.csv", m.name()))))
        .filter(|(_, p)| p.exists())
        .collect();
    match found.len() {
        1 => Ok(found.into_iter().next().expect("one")),
        0 => Err(CliError::Io(format!("{}: no fringe CSV found", dir.display()))),
        _ => Err(CliError::Config(format!(
            "{}: both classical and quantum fringes present; pass --mode",
            dir.display()
        ))),
    }
}

fn load_pattern(dir: &FsPath, file: &FsPath) -> Result<FringePattern, CliError> {
    let (screen_y, intensity) = read_fringes_csv(file)?;
    let name = rel(dir, file);
    let recorded = Manifest::load(dir)?
        .and_then(|m| m.run_for_output(&name).cloned());
    let fringe_period = match recorded.as_ref().and_then(|r| r.fringe_period) {
        Some(p) => p,
        None => estimate_fringe_period(&screen_y, &intensity)?,
    };
    // Imported files carry no wave parameters.
    let eikonal = recorded.and_then(|r| r.eikonal).unwrap_or(EikonalReport {
        kl: f64::NAN,
        scale: f64::NAN,
        threshold: f64::NAN,
        valid: false,
    });
    Ok(FringePattern {
        screen_y,
        intensity,
        fringe_period,
        ab_phase: f64::NAN,
        eikonal,
    })
}

/// Fringe shift of result dir `a` against result dir `b`, written to
/// `out_dir/compare.csv`.
pub fn compare(
    a: &FsPath,
    b: &FsPath,
    mode: Option<Mode>,
    out_dir: &FsPath,
    quiet: bool,
) -> Result<CompareReport, CliError> {
    let (mode_a, file_a) = fringe_file(a, mode)?;
    let (_, file_b) = fringe_file(b, Some(mode_a))?;
    let pa = load_pattern(a, &file_a)?;
    let pb = load_pattern(b, &file_b)?;
    let shift = fringe_shift(&pa, &pb).map_err(|e| match e {
        CoreError::GridMismatch => CliError::Config(format!(
            "{} and {} are sampled on different screen grids",
            file_a.display(),
            file_b.display()
        )),
        other => other.into(),
    })?;
    let r = CompareReport {
        shift,
        period: pb.fringe_period,
        phase: 2.0 * PI * shift,
    };
    let csv = format!(
        "shift,period,phase,mode,convention\n{},{},{},{},\"{}\"\n",
        fmt_f64(r.shift),
        fmt_f64(r.period),
        fmt_f64(r.phase),
        mode_a.name(),
        SIGN_CONVENTION
    );
    atomic_write(&out_dir.join("compare.csv"), csv.as_bytes())?;
    if !quiet {
        println!("shift  = {:.6} periods", r.shift);
        println!("period = {:.6}", r.period);
        println!("phase  = {:.6} rad", r.phase);
        println!("({SIGN_CONVENTION})");
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub flux: f64,
    pub phase: f64,
    pub shift_classical: Option<f64>,
    pub shift_quantum: Option<f64>,
}

impl SweepRow {
    pub fn phase_over_2pi(&self) -> f64 {
        self.phase / (2.0 * PI)
    }

    /// Cyclic distance between the two modes' shifts, when both ran.
    pub fn delta(&self) -> Option<f64> {
        Some(cyclic_distance(self.shift_classical?, self.shift_quantum?))
    }
}

struct Job {
    mode: Mode,
    /// Index into the sweep values, `None` for an added Φ = 0 baseline.
    index: Option<usize>,
    phase: f64,
}

impl Job {
    fn id(&self) -> String {
        match self.index {
            Some(i) => format!("sweep_{}_{i:03}", self.mode.name()),
            None => format!("sweep_{}_baseline", self.mode.name()),
        }
    }

    fn file(&self) -> String {
        match self.index {
            Some(i) => format!("sweep/fringes_{}_{i:03}.csv", self.mode.name()),
            None => format!("sweep/fringes_{}_baseline.csv", self.mode.name()),
        }
    }
}

pub fn sweep_summary_csv(rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let mut s = String::from("flux,phase_over_2pi,shift_classical,shift_quantum,delta\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_f64(r.flux),
            fmt_f64(r.phase_over_2pi()),
            opt(r.shift_classical),
            opt(r.shift_quantum),
            opt(r.delta())
        );
    }
    s
}

/// Run every `(value, mode)` entry of the sweep, concurrently up to the
/// worker count, and write `sweep_summary.csv`. Shifts are measured
/// against the Φ = 0 entry of the same mode (added if not listed).
pub fn sweep(ctx: &Context) -> Result<Vec<SweepRow>, CliError> {
    let t0 = Instant::now();
    let cfg = &ctx.config;
    let spec = cfg
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("sweep: section required".into()))?;
    if cfg.particle.q == 0.0 {
        return Err(CliError::Config("particle.q: flux sweeps need q ≠ 0".into()));
    }
    cfg.setup()?;
    let phases: Vec<f64> = spec
        .values
        .iter()
        .map(|&v| cfg.sweep_phase(v))
        .collect::<Result<_, _>>()?;
    let mut modes = spec.modes.clone();
    modes.sort();
    modes.dedup();
    let zero = phases.iter().position(|&p| p == 0.0);
    let mut jobs = Vec::new();
    for &mode in &modes {
        if zero.is_none() {
            jobs.push(Job { mode, index: None, phase: 0.0 });
        }
        for (i, &phase) in phases.iter().enumerate() {
            jobs.push(Job { mode, index: Some(i), phase });
        }
    }
    let pool = ctx.pool()?;
    let results: Vec<(Result<FringePattern, CliError>, f64)> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let t = Instant::now();
                let r = compute_fringes(cfg, job.mode, Some(job.phase)).map(|(p, _)| p);
                (r, t.elapsed().as_secs_f64())
            })
            .collect()
    });

    // Everything below runs on the orchestrator alone.
    let hash = ctx.config_hash();
    let mut records = Vec::new();
    let mut patterns = Vec::with_capacity(jobs.len());
    let mut first_error: Option<CliError> = None;
    for (job, (result, elapsed)) in jobs.iter().zip(results) {
        let mut rec = RunRecord::new("sweep", &hash);
        rec.mode = Some(job.mode.name().into());
        rec.elapsed_s = elapsed;
        let path = ctx.out_dir.join(job.file());
        match result {
            Ok(p) => {
                atomic_write(&path, fringes_csv(&p).as_bytes())?;
                rec.outputs.push(rel(&ctx.out_dir, &path));
                rec = rec.with_pattern(&p);
                patterns.push(Some(p));
            }
            Err(CliError::Core(CoreError::Timeout { steps, partial })) => {
                let pp = partial_path(&path);
                atomic_write(&pp, fringes_csv(&partial).as_bytes())?;
                rec.outputs.push(rel(&ctx.out_dir, &pp));
                rec.status = "timeout".into();
                rec.steps = Some(steps);
                rec = rec.with_pattern(&partial);
                patterns.push(None);
                first_error.get_or_insert(CliError::Core(CoreError::Timeout { steps, partial }));
            }
            Err(e) => {
                rec.status = format!("error: {e}");
                patterns.push(None);
                first_error.get_or_insert(e);
            }
        }
        records.push((job.id(), rec));
    }

    let baseline = |mode: Mode| -> Option<&FringePattern> {
        jobs.iter()
            .zip(&patterns)
            .find(|(j, _)| j.mode == mode && j.phase == 0.0)
            .and_then(|(_, p)| p.as_ref())
    };
    let mut rows = Vec::with_capacity(phases.len());
    for (i, &phase) in phases.iter().enumerate() {
        let mut row = SweepRow {
            flux: phase * cfg.particle.hbar / cfg.particle.q,
            phase,
            shift_classical: None,
            shift_quantum: None,
        };
        for &mode in &modes {
            let pattern = jobs
                .iter()
                .zip(&patterns)
                .find(|(j, _)| j.mode == mode && j.index == Some(i))
                .and_then(|(_, p)| p.as_ref());
            let shift = match (pattern, baseline(mode)) {
                (Some(p), Some(b)) => Some(fringe_shift(p, b)?),
                _ => None,
            };
            match mode {
                Mode::Classical => row.shift_classical = shift,
                Mode::Quantum => row.shift_quantum = shift,
            }
        }
        rows.push(row);
    }
    let summary = sweep_summary_csv(&rows);
    let summary_name = if first_error.is_some() {
        "sweep_summary.csv.partial"
    } else {
        "sweep_summary.csv"
    };
    let summary_path = ctx.write(summary_name, &summary)?;
    let mut rec = RunRecord::new("sweep", &hash);
    rec.outputs.push(rel(&ctx.out_dir, &summary_path));
    rec.elapsed_s = t0.elapsed().as_secs_f64();
    if first_error.is_some() {
        rec.status = "incomplete".into();
    }
    records.push(("sweep_summary".into(), rec));
    Manifest::merge_into(&ctx.out_dir, &hash, records)?;

    for r in &rows {
        let show = |v: Option<f64>| v.map(|s| format!("{s:+.4}")).unwrap_or_else(|| "   -   ".into());
        ctx.say(format!(
            "phase/2pi {:+.4} (wrapped {:+.4})  classical {}  quantum {}",
            r.phase_over_2pi(),
            wrap_half(r.phase_over_2pi()),
            show(r.shift_classical),
            show(r.shift_quantum)
        ));
    }
    ctx.say(format!("wrote {}", summary_path.display()));
    match first_error {
        Some(e) => Err(e),
        None => Ok(rows),
    }
}
