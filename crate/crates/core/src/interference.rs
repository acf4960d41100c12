//! Two-path interferometer around a shielded solenoid: geometry, classical
//! fringe prediction and fringe-shift measurement.
//!
//! Sign convention for shifts: the beam travels toward `+x`, and a positive
//! shift is a displacement of the pattern toward `−y`, measured in fringe
//! periods. With this convention a flux phase `qΦ/ħ` shifts the pattern by
//! `+(qΦ/ħ)/(2π)` periods.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action_phase::{
    accumulate_action, eikonal_check_wavenumber, phase_shift, EikonalReport,
    DEFAULT_EIKONAL_THRESHOLD,
};
use crate::classical_dynamics::{canonical_momentum, integrate, ParticleParams, ParticleState};
use crate::em_potentials::{GaugeFunction, Path, PotentialField, QuadratureOptions, SolenoidSpec};
use crate::{wrap_half, Error, Result, Vec2};

/// Minimum clearance between either classical path and the solenoid disc,
/// as a fraction of the solenoid radius.
pub const PATH_CLEARANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPathSetup {
    pub source: Vec2,
    pub slit_separation: f64,
    pub slit_plane_x: f64,
    pub screen_x: f64,
    /// Half-height of the sampled screen interval.
    pub screen_extent: f64,
    pub solenoid: SolenoidSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeFunction>,
    pub particle: ParticleParams,
    pub speed: f64,
}

impl TwoPathSetup {
    pub fn validate(&self) -> Result<()> {
        self.particle.validate()?;
        self.solenoid.validate()?;
        if !(self.slit_separation > 0.0) {
            return Err(Error::invalid("slit_separation", "must be > 0"));
        }
        if !(self.screen_extent > 0.0) {
            return Err(Error::invalid("screen_extent", "must be > 0"));
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::invalid("speed", "must be finite and > 0"));
        }
        if !(self.source.x < self.slit_plane_x && self.slit_plane_x < self.screen_x) {
            return Err(Error::Geometry {
                segment: "beam axis".into(),
                reason: "need source.x < slit_plane_x < screen_x".into(),
            });
        }
        let c = self.solenoid.center;
        let min = self.solenoid.radius * (1.0 + PATH_CLEARANCE);
        for (name, slit) in [("upper", self.slit(true)), ("lower", self.slit(false))] {
            let d = crate::em_potentials::Path::open(vec![self.source, slit])?.distance_to(c);
            if d < min {
                return Err(Error::Geometry {
                    segment: format!("{name} source→slit"),
                    reason: format!("passes {d:.4} from the solenoid center, need ≥ {min:.4}"),
                });
            }
            let top = Vec2::new(self.screen_x, self.screen_extent);
            let bottom = Vec2::new(self.screen_x, -self.screen_extent);
            let d = triangle_distance(slit, top, bottom, c);
            if d < min {
                return Err(Error::Geometry {
                    segment: format!("{name} slit→screen"),
                    reason: format!("passes {d:.4} from the solenoid center, need ≥ {min:.4}"),
                });
            }
        }
        Ok(())
    }

    pub fn slit(&self, upper: bool) -> Vec2 {
        let y = 0.5 * self.slit_separation;
        Vec2::new(self.slit_plane_x, if upper { y } else { -y })
    }

    /// The solenoid field, gauge-wrapped when a gauge is set.
    pub fn field(&self) -> PotentialField {
        let base = PotentialField::Solenoid(self.solenoid);
        match &self.gauge {
            Some(g) => base.apply_gauge(g.clone()),
            None => base,
        }
    }

    pub fn wavenumber(&self) -> f64 {
        self.particle.mass * self.speed / self.particle.hbar
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.wavenumber()
    }

    /// Small-angle fringe period `λ·D/d`.
    pub fn fringe_period(&self) -> f64 {
        self.wavelength() * (self.screen_x - self.slit_plane_x) / self.slit_separation
    }

    /// `qΦ/ħ`.
    pub fn ab_phase(&self) -> f64 {
        self.particle.charge * self.solenoid.flux / self.particle.hbar
    }

    pub fn with_flux(&self, flux: f64) -> Self {
        let mut s = self.clone();
        s.solenoid.flux = flux;
        s
    }

    pub fn with_ab_phase(&self, phase: f64) -> Self {
        self.with_flux(phase * self.particle.hbar / self.particle.charge)
    }

    pub fn screen_samples(&self, n: usize) -> Vec<f64> {
        let e = self.screen_extent;
        (0..n)
            .map(|i| -e + 2.0 * e * i as f64 / (n - 1) as f64)
            .collect()
    }
}

fn triangle_distance(a: Vec2, b: Vec2, c: Vec2, p: Vec2) -> f64 {
    let cross = |u: Vec2, v: Vec2| u.x * v.y - u.y * v.x;
    let s1 = cross(b - a, p - a);
    let s2 = cross(c - b, p - b);
    let s3 = cross(a - c, p - c);
    let inside = (s1 >= 0.0 && s2 >= 0.0 && s3 >= 0.0) || (s1 <= 0.0 && s2 <= 0.0 && s3 <= 0.0);
    if inside {
        return 0.0;
    }
    use crate::em_potentials::Path as P;
    [(a, b), (b, c), (c, a)]
        .into_iter()
        .map(|(u, v)| P::open(vec![u, v]).map(|s| s.distance_to(p)).unwrap_or(f64::INFINITY))
        .fold(f64::INFINITY, f64::min)
}

/// The two routes source → slit → `(screen_x, y)`, upper slit first.
pub fn build_paths(setup: &TwoPathSetup, screen_y: f64) -> Result<(Path, Path)> {
    let target = Vec2::new(setup.screen_x, screen_y);
    let upper = Path::open(vec![setup.source, setup.slit(true), target])?;
    let lower = Path::open(vec![setup.source, setup.slit(false), target])?;
    let min = setup.solenoid.radius * (1.0 + PATH_CLEARANCE);
    for (name, p) in [("upper", &upper), ("lower", &lower)] {
        let d = p.distance_to(setup.solenoid.center);
        if d < min {
            return Err(Error::Geometry {
                segment: format!("{name} path to y = {screen_y}"),
                reason: format!("passes {d:.4} from the solenoid center, need ≥ {min:.4}"),
            });
        }
    }
    Ok((upper, lower))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    /// Straight rays; exact where `B = 0`.
    #[default]
    Rays,
    /// Integrate Hamilton's equations along every leg and use the sampled
    /// trajectories. Cross-check of the ray mode.
    Trajectories,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassicalOptions {
    pub n_samples: usize,
    pub mode: PathMode,
    pub eikonal_threshold: f64,
    pub quadrature: QuadratureOptions,
    /// Arc length per RK4 step in trajectory mode.
    pub step_length: f64,
}

impl Default for ClassicalOptions {
    fn default() -> Self {
        ClassicalOptions {
            n_samples: 801,
            mode: PathMode::Rays,
            eikonal_threshold: DEFAULT_EIKONAL_THRESHOLD,
            quadrature: QuadratureOptions::default(),
            step_length: 0.05,
        }
    }
}

/// Screen intensity normalized to unit maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct FringePattern {
    pub screen_y: Vec<f64>,
    pub intensity: Vec<f64>,
    pub fringe_period: f64,
    /// The flux phase `qΦ/ħ` this pattern was produced with.
    pub ab_phase: f64,
    pub eikonal: EikonalReport,
}

impl FringePattern {
    pub fn normalize(&mut self) {
        let max = self.intensity.iter().cloned().fold(0.0, f64::max);
        if max > 0.0 {
            for v in &mut self.intensity {
                *v /= max;
            }
        }
    }

    pub fn spacing(&self) -> f64 {
        let n = self.screen_y.len();
        (self.screen_y[n - 1] - self.screen_y[0]) / (n - 1) as f64
    }

    /// `Σ|I(y) − I(−y)| / Σ(I(y) + I(−y))` on a grid symmetric about 0.
    pub fn mirror_asymmetry(&self) -> f64 {
        let n = self.intensity.len();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..n {
            let (a, b) = (self.intensity[i], self.intensity[n - 1 - i]);
            num += (a - b).abs();
            den += a + b;
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

/// Phase `k·L + S_in/ħ` accumulated along one route in trajectory mode.
fn integrated_route_phase(
    setup: &TwoPathSetup,
    field: &PotentialField,
    route: &Path,
    step_length: f64,
) -> Result<(f64, f64)> {
    let params: &ParticleParams = &setup.particle;
    let mut length = 0.0;
    let mut interaction = 0.0;
    for (a, b) in route.segments() {
        let leg = b - a;
        let dist = leg.norm();
        let v = leg * (setup.speed / dist);
        let p0 = canonical_momentum(v, a, params, field)?;
        let t_end = dist / setup.speed;
        let traj = integrate(
            ParticleState::new(0.0, a, p0),
            params,
            field,
            t_end,
            step_length / setup.speed,
        )?;
        interaction += accumulate_action(&traj, field)?.interaction;
        length += Path::open(traj.positions())?.length();
    }
    Ok((length, interaction))
}

/// Classical prediction: `I(y) ∝ cos²((Δψ_geo + Δψ_AB)/2)` with
/// `Δψ_geo = k(|upper| − |lower|)` and `Δψ_AB` the flux phase of the loop
/// upper → reversed lower.
pub fn classical_fringes(setup: &TwoPathSetup, opts: &ClassicalOptions) -> Result<FringePattern> {
    setup.validate()?;
    if opts.mode == PathMode::Trajectories && !(opts.step_length > 0.0) {
        return Err(Error::invalid("step_length", "must be > 0"));
    }
    if opts.n_samples < 16 {
        return Err(Error::invalid("n_samples", "need at least 16 screen samples"));
    }
    let field = setup.field();
    let k = setup.wavenumber();
    let ys = setup.screen_samples(opts.n_samples);
    let phases: Vec<f64> = ys
        .par_iter()
        .map(|&y| -> Result<f64> {
            let (upper, lower) = build_paths(setup, y)?;
            match opts.mode {
                PathMode::Rays => {
                    let geo = k * (upper.length() - lower.length());
                    let ab = phase_shift(&upper, &lower, &field, &setup.particle, &opts.quadrature)?;
                    Ok(geo + ab)
                }
                PathMode::Trajectories => {
                    let h = opts.step_length;
                    let (lu, su) = integrated_route_phase(setup, &field, &upper, h)?;
                    let (ll, sl) = integrated_route_phase(setup, &field, &lower, h)?;
                    Ok(k * (lu - ll) + (su - sl) / setup.particle.hbar)
                }
            }
        })
        .collect::<Result<_>>()?;
    let mut pattern = FringePattern {
        intensity: phases.iter().map(|p| (0.5 * p).cos().powi(2)).collect(),
        screen_y: ys,
        fringe_period: setup.fringe_period(),
        ab_phase: setup.ab_phase(),
        eikonal: eikonal_check_wavenumber(k, setup.slit_separation, opts.eikonal_threshold)?,
    };
    pattern.normalize();
    Ok(pattern)
}

fn same_grid(a: &[f64], b: &[f64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let scale = a.iter().chain(b).map(|v| v.abs()).fold(1.0, f64::max);
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12 * scale)
}

/// Centered boxcar average over `len` (odd) samples, defined where the
/// window fits; one period long, it strips the fringe term and leaves the
/// slowly varying envelope.
fn remove_envelope(x: &[f64], len: usize) -> Vec<Option<f64>> {
    let half = len / 2;
    let n = x.len();
    (0..n)
        .map(|i| {
            if i < half || i + half >= n {
                None
            } else {
                let mean = x[i - half..=i + half].iter().sum::<f64>() / len as f64;
                Some(x[i] - mean)
            }
        })
        .collect()
}

/// Displacement of `pattern` relative to `reference` in fringe periods of
/// the reference, wrapped to `[−0.5, 0.5)`. Positive means toward `−y`.
///
/// Both patterns have their envelope removed with a one-period boxcar; the
/// Hann-weighted cross-correlation is maximized over integer lags within
/// about half a period, then refined by a parabola through the peak.
pub fn fringe_shift(pattern: &FringePattern, reference: &FringePattern) -> Result<f64> {
    if !same_grid(&pattern.screen_y, &reference.screen_y) {
        return Err(Error::GridMismatch);
    }
    let n = reference.screen_y.len();
    if n < 16 {
        return Err(Error::DegeneratePattern("fewer than 16 samples".into()));
    }
    let h = reference.spacing();
    let period_samples = reference.fringe_period / h;
    if !(period_samples.is_finite() && period_samples >= 3.0) {
        return Err(Error::DegeneratePattern(format!(
            "fringe period spans {period_samples:.2} samples"
        )));
    }
    let boxcar = 2 * (period_samples / 2.0).round() as usize + 1;
    let max_lag = (0.5 * period_samples).ceil() as usize + 2;
    let rf = remove_envelope(&reference.intensity, boxcar);
    let pf = remove_envelope(&pattern.intensity, boxcar);
    let lo = boxcar / 2 + max_lag;
    let hi = n as isize - 1 - (boxcar / 2 + max_lag) as isize;
    if hi - (lo as isize) + 1 < period_samples.ceil() as isize {
        return Err(Error::DegeneratePattern(
            "screen too narrow for one correlation period".into(),
        ));
    }
    let hi = hi as usize;
    let len = hi - lo + 1;
    let weights: Vec<f64> = (0..len)
        .map(|i| (PI * (i + 1) as f64 / (len + 1) as f64).sin().powi(2))
        .collect();
    let wsum: f64 = weights.iter().sum();
    let ref_win: Vec<f64> = (lo..=hi).map(|i| rf[i].unwrap_or(0.0)).collect();
    let mean = ref_win.iter().zip(&weights).map(|(r, w)| r * w).sum::<f64>() / wsum;
    let centered: Vec<f64> = ref_win.iter().map(|r| r - mean).collect();
    let spread = centered.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pat_spread = (lo - max_lag..=hi + max_lag)
        .map(|i| pf[i].unwrap_or(0.0).abs())
        .fold(0.0f64, f64::max);
    if spread < 1e-12 || pat_spread < 1e-12 {
        return Err(Error::DegeneratePattern("flat intensity".into()));
    }
    let lags: Vec<isize> = (-(max_lag as isize)..=max_lag as isize).collect();
    let corr: Vec<f64> = lags
        .iter()
        .map(|&tau| {
            (0..len)
                .map(|i| {
                    let j = (lo + i) as isize + tau;
                    weights[i] * centered[i] * pf[j as usize].unwrap_or(0.0)
                })
                .sum()
        })
        .collect();
    let (best, _) = corr[1..corr.len() - 1]
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (i, &c)| {
            if c > acc.1 {
                (i + 1, c)
            } else {
                acc
            }
        });
    let (cm, c0, cp) = (corr[best - 1], corr[best], corr[best + 1]);
    let curvature = cm - 2.0 * c0 + cp;
    if !(curvature < 0.0) {
        return Err(Error::DegeneratePattern("correlation has no peak".into()));
    }
    let offset = 0.5 * (cm - cp) / curvature;
    let displacement = (lags[best] as f64 + offset) * h;
    let shift = wrap_half(-displacement / reference.fringe_period);
    // Rounding noise from an exactly symmetric peak is reported as zero.
    Ok(if shift.abs() < 1e-12 { 0.0 } else { shift })
}

/// Dominant fringe period of a pattern from its Hann-windowed periodogram,
/// after removing a quadratic trend. Used where no small-angle prediction
/// applies (lattice runs, imported CSVs).
pub fn estimate_fringe_period(screen_y: &[f64], intensity: &[f64]) -> Result<f64> {
    let n = screen_y.len();
    if n < 16 || intensity.len() != n {
        return Err(Error::DegeneratePattern("need ≥ 16 matching samples".into()));
    }
    let y0 = screen_y[0];
    let width = screen_y[n - 1] - y0;
    let t: Vec<f64> = screen_y.iter().map(|y| 2.0 * (y - y0) / width - 1.0).collect();
    let detrended = subtract_quadratic(&t, intensity);
    let weights: Vec<f64> = (0..n)
        .map(|i| (PI * (i + 1) as f64 / (n + 1) as f64).sin().powi(2))
        .collect();
    let power = |freq: f64| -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for i in 0..n {
            let arg = 2.0 * PI * freq * (screen_y[i] - y0);
            let v = weights[i] * detrended[i];
            re += v * arg.cos();
            im += v * arg.sin();
        }
        re * re + im * im
    };
    let h = width / (n - 1) as f64;
    let f_min = 1.5 / width;
    let f_max = 0.5 / h;
    let scan = 4096;
    let df = (f_max - f_min) / scan as f64;
    let mut best = (f_min, f64::NEG_INFINITY);
    for i in 0..=scan {
        let f = f_min + df * i as f64;
        let p = power(f);
        if p > best.1 {
            best = (f, p);
        }
    }
    if !(best.1 > 0.0) {
        return Err(Error::DegeneratePattern("no periodic component".into()));
    }
    // Golden-section refinement inside the bracketing scan cell.
    let (mut a, mut b) = ((best.0 - df).max(f_min), (best.0 + df).min(f_max));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if power(c) > power(d) {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(2.0 / (a + b))
}

fn subtract_quadratic(t: &[f64], y: &[f64]) -> Vec<f64> {
    // Least squares in the monomial basis on t ∈ [−1, 1].
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut aty = nalgebra::Vector3::<f64>::zeros();
    for (&ti, &yi) in t.iter().zip(y) {
        let row = nalgebra::Vector3::new(1.0, ti, ti * ti);
        ata += row * row.transpose();
        aty += row * yi;
    }
    let coef = ata.try_inverse().map(|inv| inv * aty).unwrap_or_default();
    t.iter()
        .zip(y)
        .map(|(&ti, &yi)| yi - (coef[0] + coef[1] * ti + coef[2] * ti * ti))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic_distance;

    /// Paraxial setup: θ ≤ 0.02 rad, 80 samples per fringe.
    pub(crate) fn paraxial(phase: f64) -> TwoPathSetup {
        TwoPathSetup {
            source: Vec2::new(-50.0, 0.0),
            slit_separation: 2.0,
            slit_plane_x: 0.0,
            screen_x: 1000.0,
            screen_extent: 20.0,
            solenoid: SolenoidSpec::new(Vec2::new(1.0, 0.0), 0.2, 0.0).unwrap(),
            gauge: None,
            particle: ParticleParams::default(),
            speed: 250.0 * PI,
        }
        .with_ab_phase(phase)
    }

    fn opts() -> ClassicalOptions {
        ClassicalOptions::default()
    }

    #[test]
    fn mirror_paths_at_center() {
        let s = paraxial(0.0);
        let (u, l) = build_paths(&s, 0.0).unwrap();
        for (a, b) in u.waypoints().iter().zip(l.waypoints()) {
            assert!((a.x - b.x).abs() < 1e-15 && (a.y + b.y).abs() < 1e-15);
        }
    }

    #[test]
    fn winding_of_enclosed_loop() {
        let s = paraxial(0.0);
        let (u, l) = build_paths(&s, 3.0).unwrap();
        let ccw = l.concat(&u.reversed()).unwrap();
        assert_eq!(ccw.winding_number(s.solenoid.center).unwrap(), 1);
        let cw = u.concat(&l.reversed()).unwrap();
        assert_eq!(cw.winding_number(s.solenoid.center).unwrap(), -1);
    }

    #[test]
    fn clipping_solenoid_is_rejected() {
        let mut s = paraxial(0.0);
        s.solenoid.radius = 0.95;
        match s.validate() {
            Err(Error::Geometry { segment, .. }) => assert!(segment.contains("slit→screen")),
            other => panic!("{other:?}"),
        }
        assert!(classical_fringes(&s, &opts()).is_err());
    }

    #[test]
    fn zero_flux_is_symmetric_with_central_max() {
        let p = classical_fringes(&paraxial(0.0), &opts()).unwrap();
        assert!(p.mirror_asymmetry() < 1e-12);
        let mid = p.intensity.len() / 2;
        assert!((p.intensity[mid] - 1.0).abs() < 1e-12);
        assert!(p.eikonal.valid);
    }

    #[test]
    fn half_flux_puts_minimum_at_center() {
        let p = classical_fringes(&paraxial(PI), &opts()).unwrap();
        let mid = p.intensity.len() / 2;
        assert!(p.intensity[mid] < 1e-12);
    }

    #[test]
    fn full_flux_quantum_restores_pattern() {
        let a = classical_fringes(&paraxial(0.0), &opts()).unwrap();
        let b = classical_fringes(&paraxial(2.0 * PI), &opts()).unwrap();
        let worst = a
            .intensity
            .iter()
            .zip(&b.intensity)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn shift_examples() {
        let r = classical_fringes(&paraxial(0.0), &opts()).unwrap();
        assert_eq!(fringe_shift(&r, &r).unwrap(), 0.0);
        let half = classical_fringes(&paraxial(PI), &opts()).unwrap();
        let s = fringe_shift(&half, &r).unwrap();
        assert!(cyclic_distance(s, 0.5) < 1e-3, "{s}");
        let q = classical_fringes(&paraxial(PI / 2.0), &opts()).unwrap();
        assert!((fringe_shift(&q, &r).unwrap() - 0.25).abs() < 1e-3);
    }

    #[test]
    fn shift_additivity() {
        let r = classical_fringes(&paraxial(0.0), &opts()).unwrap();
        let (p1, p2) = (0.9, 1.7);
        let s1 = fringe_shift(&classical_fringes(&paraxial(p1), &opts()).unwrap(), &r).unwrap();
        let s2 = fringe_shift(&classical_fringes(&paraxial(p2), &opts()).unwrap(), &r).unwrap();
        let s12 =
            fringe_shift(&classical_fringes(&paraxial(p1 + p2), &opts()).unwrap(), &r).unwrap();
        assert!(cyclic_distance(s12, s1 + s2) < 1e-3);
    }

    #[test]
    fn grid_mismatch_and_flat() {
        let r = classical_fringes(&paraxial(0.0), &opts()).unwrap();
        let coarse = classical_fringes(
            &paraxial(0.0),
            &ClassicalOptions {
                n_samples: 401,
                ..opts()
            },
        )
        .unwrap();
        assert!(matches!(fringe_shift(&coarse, &r), Err(Error::GridMismatch)));
        let mut flat = r.clone();
        flat.intensity.iter_mut().for_each(|v| *v = 1.0);
        assert!(matches!(fringe_shift(&flat, &r), Err(Error::DegeneratePattern(_))));
    }

    #[test]
    fn trajectory_mode_agrees_with_rays() {
        let s = paraxial(1.1);
        let o = ClassicalOptions {
            n_samples: 21,
            ..opts()
        };
        let rays = classical_fringes(&s, &o).unwrap();
        let traj = classical_fringes(
            &s,
            &ClassicalOptions {
                mode: PathMode::Trajectories,
                ..o
            },
        )
        .unwrap();
        let worst = rays
            .intensity
            .iter()
            .zip(&traj.intensity)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        // kL is ~1e6 here, so rounding in the summed track positions alone
        // moves the phase by ~1e-6 rad.
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn period_estimate_recovers_small_angle_value() {
        let p = classical_fringes(&paraxial(0.4), &opts()).unwrap();
        let est = estimate_fringe_period(&p.screen_y, &p.intensity).unwrap();
        assert!((est / p.fringe_period - 1.0).abs() < 1e-3, "{est} vs {}", p.fringe_period);
    }
}
