use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Complex, Grid2D, LatticeHamiltonian, Wavefunction};
use crate::em_potentials::GaugeFunction;
use crate::{Error, Result};

/// Cosine-ramp amplitude mask over the outer `width` nodes of each edge. The
/// per-step factor falls from 1 at the inner edge of the layer to
/// `min_factor` on the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Absorber {
    pub width: usize,
    pub min_factor: f64,
}

impl Default for Absorber {
    fn default() -> Self {
        Absorber {
            width: 16,
            min_factor: 0.95,
        }
    }
}

impl Absorber {
    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if self.width < 4 {
            return Err(Error::invalid("absorber.width", "must be at least 4 nodes"));
        }
        if 2 * self.width >= grid.nx.min(grid.ny) {
            return Err(Error::invalid("absorber.width", "layers would overlap"));
        }
        if !(self.min_factor > 0.0 && self.min_factor <= 1.0) {
            return Err(Error::invalid("absorber.min_factor", "must lie in (0, 1]"));
        }
        Ok(())
    }

    fn ramp(&self, k: usize, n: usize) -> f64 {
        let w = self.width;
        let depth = if k < w {
            w - k
        } else if k + w >= n {
            k + w + 1 - n
        } else {
            return 1.0;
        };
        let s = depth as f64 / w as f64;
        1.0 - (1.0 - self.min_factor) * (0.5 * PI * s).sin().powi(2)
    }

    pub fn mask(&self, grid: &Grid2D) -> Vec<f64> {
        let mut m = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            let fy = self.ramp(j, grid.ny);
            for i in 0..grid.nx {
                m.push(fy * self.ramp(i, grid.nx));
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub dt: f64,
    /// Bound on `‖b − AΨ'‖/‖b‖` for the implicit solve.
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub absorber: Option<Absorber>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 0.5,
            residual_tol: 1e-10,
            max_iterations: 1000,
            absorber: Some(Absorber::default()),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt", "must be finite and > 0"));
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::invalid("residual_tol", "must be > 0"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be ≥ 1"));
        }
        if let Some(a) = &self.absorber {
            a.validate(grid)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub iterations: usize,
    pub residual: f64,
    pub norm: f64,
}

/// Crank–Nicolson propagator `(I + iHΔt/2ħ)Ψ' = (I − iHΔt/2ħ)Ψ` solved by
/// red-black Gauss–Seidel. The system matrix is strictly diagonally
/// dominant for every `Δt`, so the sweep always converges, only more slowly
/// as `‖H‖Δt/ħ` grows.
pub struct CrankNicolson {
    grid: Grid2D,
    cfg: SolverConfig,
    /// `iα·h(n, n+x̂)` and `iα·h(n, n+ŷ)` with `α = Δt/2ħ`; zero across walls
    /// and edges. Since `H` is Hermitian the couplings toward `−x̂, −ŷ` are
    /// `−conj` of the neighbour's entries.
    xp: Vec<Complex>,
    yp: Vec<Complex>,
    plus_diag: Vec<Complex>,
    inv_plus_diag: Vec<Complex>,
    minus_diag: Vec<Complex>,
    open: Vec<bool>,
    absorber: Option<Vec<f64>>,
    rhs: Vec<Complex>,
}

impl CrankNicolson {
    pub fn new(h: &LatticeHamiltonian, cfg: &SolverConfig) -> Result<Self> {
        let g = h.grid;
        cfg.validate(&g)?;
        let alpha = Complex::new(0.0, cfg.dt / (2.0 * h.params.hbar));
        let len = g.len();
        let mut xp = Vec::with_capacity(len);
        let mut yp = Vec::with_capacity(len);
        let mut plus_diag = Vec::with_capacity(len);
        let mut minus_diag = Vec::with_capacity(len);
        let mut open = Vec::with_capacity(len);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let n = g.index(i, j);
                let c = h.row_couplings(i, j);
                xp.push(alpha * c[0]);
                yp.push(alpha * c[2]);
                let wall = h.is_wall(n);
                let d = if wall { 0.0 } else { h.diagonal(n) };
                plus_diag.push(1.0 + alpha * d);
                minus_diag.push(1.0 - alpha * d);
                open.push(!wall);
            }
        }
        Ok(CrankNicolson {
            grid: g,
            cfg: *cfg,
            xp,
            yp,
            inv_plus_diag: plus_diag.iter().map(|d| 1.0 / d).collect(),
            plus_diag,
            minus_diag,
            open,
            absorber: cfg.absorber.map(|a| a.mask(&g)),
            rhs: vec![Complex::new(0.0, 0.0); len],
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// `Σ_m iα h(n, m) src[m]` over the four neighbours.
    #[inline]
    fn neighbours(&self, src: &[Complex], i: usize, j: usize, n: usize) -> Complex {
        let nx = self.grid.nx;
        let mut acc = Complex::new(0.0, 0.0);
        if i + 1 < nx {
            acc += self.xp[n] * src[n + 1];
        }
        if i > 0 {
            acc -= self.xp[n - 1].conj() * src[n - 1];
        }
        if j + 1 < self.grid.ny {
            acc += self.yp[n] * src[n + nx];
        }
        if j > 0 {
            acc -= self.yp[n - nx].conj() * src[n - nx];
        }
        acc
    }

    /// `dst = (I − iαH) src`.
    fn apply_minus(&self, src: &[Complex], dst: &mut [Complex]) {
        let nx = self.grid.nx;
        for (j, row) in dst.chunks_mut(nx).enumerate() {
            for (i, d) in row.iter_mut().enumerate() {
                let n = i + nx * j;
                *d = if self.open[n] {
                    self.minus_diag[n] * src[n] - self.neighbours(src, i, j, n)
                } else {
                    Complex::new(0.0, 0.0)
                };
            }
        }
    }

    /// Update every open node of one colour (`(i + j) % 2 == color`) from
    /// its neighbours, which all have the other colour.
    fn relax(&self, x: &mut [Complex], color: usize) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for j in 0..ny {
            let base = j * nx;
            let (head, tail) = x.split_at_mut(base);
            let (row, after) = tail.split_at_mut(nx);
            let below: &[Complex] = if j > 0 { &head[base - nx..] } else { &[] };
            let above: &[Complex] = if j + 1 < ny { &after[..nx] } else { &[] };
            let xp = &self.xp[base..base + nx];
            let yp = &self.yp[base..base + nx];
            let yp_below: &[Complex] = if j > 0 { &self.yp[base - nx..base] } else { &[] };
            let rhs = &self.rhs[base..base + nx];
            let inv = &self.inv_plus_diag[base..base + nx];
            let open = &self.open[base..base + nx];
            for i in ((j + color) % 2..nx).step_by(2) {
                if !open[i] {
                    continue;
                }
                let mut s = rhs[i];
                if i + 1 < nx {
                    s -= xp[i] * row[i + 1];
                }
                if i > 0 {
                    s += xp[i - 1].conj() * row[i - 1];
                }
                if j + 1 < ny {
                    s -= yp[i] * above[i];
                }
                if j > 0 {
                    s += yp_below[i].conj() * below[i];
                }
                row[i] = s * inv[i];
            }
        }
    }

    /// `Σ |b − Ax|²` over open nodes of one colour, summed row by row.
    fn colour_residual(&self, x: &[Complex], color: usize) -> f64 {
        let nx = self.grid.nx;
        let mut total = 0.0;
        for j in 0..self.grid.ny {
            let mut row = 0.0;
            for i in ((j + color) % 2..nx).step_by(2) {
                let n = i + nx * j;
                if self.open[n] {
                    let r = self.rhs[n] - self.plus_diag[n] * x[n] - self.neighbours(x, i, j, n);
                    row += r.norm_sqr();
                }
            }
            total += row;
        }
        total
    }

    /// One red-black Gauss–Seidel sweep; returns `‖b − Ax‖²` for the updated
    /// `x`. Black nodes were solved last against the current red values, so
    /// their residual vanishes and only the red rows are evaluated.
    fn sweep(&mut self, x: &mut [Complex]) -> f64 {
        self.relax(x, 0);
        self.relax(x, 1);
        self.colour_residual(x, 0)
    }

    pub fn step(&mut self, psi: &mut Wavefunction) -> Result<StepReport> {
        if psi.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut rhs = std::mem::take(&mut self.rhs);
        self.apply_minus(&psi.amplitudes, &mut rhs);
        self.rhs = rhs;
        let b_norm = self
            .rhs
            .chunks(self.grid.nx)
            .map(|r| r.iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        // (I − iαH)b inverts (I + iαH) up to O((αH)²).
        let mut x = std::mem::take(&mut psi.amplitudes);
        self.apply_minus(&self.rhs, &mut x);
        let mut residual = f64::INFINITY;
        let mut iterations = 0;
        if b_norm == 0.0 {
            residual = 0.0;
            x.iter_mut().for_each(|v| *v = Complex::new(0.0, 0.0));
        }
        while residual > self.cfg.residual_tol {
            if iterations == self.cfg.max_iterations {
                psi.amplitudes = x;
                return Err(Error::SolverFailure { iterations, residual });
            }
            residual = self.sweep(&mut x).sqrt() / b_norm;
            iterations += 1;
            if !residual.is_finite() {
                psi.amplitudes = x;
                return Err(Error::SolverFailure { iterations, residual });
            }
        }
        if let Some(mask) = &self.absorber {
            x.iter_mut().zip(mask).for_each(|(v, m)| *v *= *m);
        }

        psi.amplitudes = x;
        psi.t += self.cfg.dt;
        Ok(StepReport {
            iterations,
            residual,
            norm: psi.norm(),
        })
    }

    /// `max |(I + iαH)x − b|` for diagnostics.
    pub fn plus_residual(&self, x: &[Complex], b: &[Complex]) -> f64 {
        let nx = self.grid.nx;
        let mut worst = 0.0f64;
        for j in 0..self.grid.ny {
            for i in 0..nx {
                let n = i + nx * j;
                if self.open[n] {
                    let ax = self.plus_diag[n] * x[n] + self.neighbours(x, i, j, n);
                    worst = worst.max((ax - b[n]).norm());
                }
            }
        }
        worst
    }
}

/// One step with a freshly assembled propagator.
pub fn step(psi: &Wavefunction, h: &LatticeHamiltonian, cfg: &SolverConfig) -> Result<Wavefunction> {
    let mut cn = CrankNicolson::new(h, cfg)?;
    let mut out = psi.clone();
    cn.step(&mut out)?;
    Ok(out)
}

/// `Ψ'(r) = exp(iqχ(r)/ħ) Ψ(r)`, the partner of `A → A + ∇χ`.
pub fn gauge_rephase(psi: &Wavefunction, chi: &GaugeFunction, charge: f64, hbar: f64) -> Wavefunction {
    let g = psi.grid;
    let mut out = psi.clone();
    if matches!(chi, GaugeFunction::Zero) {
        return out;
    }
    for j in 0..g.ny {
        for i in 0..g.nx {
            let n = g.index(i, j);
            out.amplitudes[n] *= Complex::from_polar(1.0, charge * chi.value(g.node(i, j)) / hbar);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{build_hamiltonian, GaussianPacket};
    use super::*;
    use crate::classical_dynamics::ParticleParams;
    use crate::em_potentials::PotentialField;
    use crate::Vec2;

    fn setup() -> (LatticeHamiltonian, Wavefunction) {
        let g = Grid2D::centered(32, 1.0, Vec2::zeros()).unwrap();
        let h = build_hamiltonian(&g, &PotentialField::uniform_b(0.02), &ParticleParams::default(), &[]).unwrap();
        let mut psi = Wavefunction::gaussian(
            g,
            &GaussianPacket {
                center: Vec2::zeros(),
                width_x: 3.0,
                width_y: 3.0,
                wavevector: Vec2::new(0.4, 0.1),
            },
        );
        psi.normalize().unwrap();
        (h, psi)
    }

    #[test]
    fn single_step_is_unitary() {
        let (h, psi) = setup();
        let cfg = SolverConfig {
            absorber: None,
            ..SolverConfig::default()
        };
        let out = step(&psi, &h, &cfg).unwrap();
        assert!((out.norm() - psi.norm()).abs() < 1e-10);
        assert_eq!(out.t, 0.5);
    }

    #[test]
    fn solve_meets_residual() {
        let (h, psi) = setup();
        let cfg = SolverConfig {
            absorber: None,
            residual_tol: 1e-12,
            ..SolverConfig::default()
        };
        let mut cn = CrankNicolson::new(&h, &cfg).unwrap();
        let mut b = vec![Complex::new(0.0, 0.0); psi.grid.len()];
        cn.apply_minus(&psi.amplitudes, &mut b);
        let mut out = psi.clone();
        cn.step(&mut out).unwrap();
        let b_norm = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(cn.plus_residual(&out.amplitudes, &b) <= 1e-12 * b_norm);
    }

    #[test]
    fn huge_step_exhausts_iterations() {
        let (h, psi) = setup();
        let cfg = SolverConfig {
            dt: 1e4,
            max_iterations: 50,
            absorber: None,
            ..SolverConfig::default()
        };
        match step(&psi, &h, &cfg) {
            Err(Error::SolverFailure { iterations, residual }) => {
                assert_eq!(iterations, 50);
                assert!(residual > 1e-10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn absorber_profile() {
        let g = Grid2D::centered(64, 1.0, Vec2::zeros()).unwrap();
        let a = Absorber::default();
        let m = a.mask(&g);
        assert_eq!(m[g.index(32, 32)], 1.0);
        assert!((m[g.index(0, 32)] - 0.95).abs() < 1e-15);
        assert!((m[g.index(63, 32)] - 0.95).abs() < 1e-15);
        assert_eq!(m[g.index(16, 32)], 1.0);
        assert!(m[g.index(15, 32)] < 1.0);
        assert!(Absorber { width: 3, min_factor: 0.9 }.validate(&g).is_err());
    }

    #[test]
    fn rephase_examples() {
        let (_, psi) = setup();
        assert_eq!(gauge_rephase(&psi, &GaugeFunction::Zero, 1.0, 1.0), psi);
        let chi = GaugeFunction::Gaussian {
            amplitude: 3.0,
            center: Vec2::new(1.0, 1.0),
            width: 4.0,
        };
        let out = gauge_rephase(&psi, &chi, 1.0, 1.0);
        for (a, b) in psi.amplitudes.iter().zip(&out.amplitudes) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }
}
