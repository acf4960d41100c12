use serde::{Deserialize, Serialize};

use super::Complex;
use crate::{Error, Result, Vec2};

/// Regular node lattice; node `(i, j)` sits at `origin + (i·dx, j·dy)` and is
/// stored at index `i + nx·j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub origin: Vec2,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, origin: Vec2) -> Result<Self> {
        let g = Grid2D { nx, ny, dx, dy, origin };
        g.validate()?;
        Ok(g)
    }

    /// Grid of `n × n` unit cells centered on `center`.
    pub fn centered(n: usize, spacing: f64, center: Vec2) -> Result<Self> {
        let half = 0.5 * (n - 1) as f64 * spacing;
        Grid2D::new(n, n, spacing, spacing, center - Vec2::new(half, half))
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 16 || self.ny < 16 {
            return Err(Error::invalid("grid", format!("need nx, ny ≥ 16, got {}×{}", self.nx, self.ny)));
        }
        if !(self.dx > 0.0 && self.dy > 0.0 && self.dx.is_finite() && self.dy.is_finite()) {
            return Err(Error::invalid("grid", "dx and dy must be finite and > 0"));
        }
        if !self.origin.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("grid", "origin must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin.x + i as f64 * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.origin.y + j as f64 * self.dy
    }

    pub fn node(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(self.x(i), self.y(j))
    }

    pub fn max_corner(&self) -> Vec2 {
        self.node(self.nx - 1, self.ny - 1)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let hi = self.max_corner();
        p.x >= self.origin.x && p.x <= hi.x && p.y >= self.origin.y && p.y <= hi.y
    }

    /// Nearest column to `x`, if inside the grid.
    pub fn column_of(&self, x: f64) -> Option<usize> {
        let i = ((x - self.origin.x) / self.dx).round();
        (i >= 0.0 && i < self.nx as f64).then_some(i as usize)
    }

    pub fn row_of(&self, y: f64) -> Option<usize> {
        let j = ((y - self.origin.y) / self.dy).round();
        (j >= 0.0 && j < self.ny as f64).then_some(j as usize)
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }
}

/// Gaussian wavepacket `exp(−Δx²/(2wₓ²) − Δy²/(2w_y²) + i k·Δr)`; the widths are
/// those of the amplitude, so `|Ψ|²` has standard deviations `w/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub center: Vec2,
    pub width_x: f64,
    pub width_y: f64,
    pub wavevector: Vec2,
}

impl GaussianPacket {
    pub fn amplitude(&self, p: Vec2) -> Complex {
        let d = p - self.center;
        let envelope = (-0.5 * (d.x * d.x / (self.width_x * self.width_x)
            + d.y * d.y / (self.width_y * self.width_y)))
            .exp();
        Complex::from_polar(envelope, self.wavevector.dot(&d))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub grid: Grid2D,
    pub amplitudes: Vec<Complex>,
    pub t: f64,
}

impl Wavefunction {
    pub fn zeros(grid: Grid2D) -> Self {
        Wavefunction {
            grid,
            amplitudes: vec![Complex::new(0.0, 0.0); grid.len()],
            t: 0.0,
        }
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Vec2) -> Complex) -> Self {
        let mut psi = Wavefunction::zeros(grid);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                psi.amplitudes[grid.index(i, j)] = f(grid.node(i, j));
            }
        }
        psi
    }

    pub fn gaussian(grid: Grid2D, packet: &GaussianPacket) -> Self {
        Wavefunction::from_fn(grid, |p| packet.amplitude(p))
    }

    pub fn at(&self, i: usize, j: usize) -> Complex {
        self.amplitudes[self.grid.index(i, j)]
    }

    /// `Σ|Ψ|² dx dy`, summed row by row in a fixed order.
    pub fn norm(&self) -> f64 {
        let nx = self.grid.nx;
        let rows: f64 = self
            .amplitudes
            .chunks(nx)
            .map(|row| row.iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum();
        rows * self.grid.cell_area()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::invalid("wavefunction", "cannot normalize a zero or non-finite state"));
        }
        let s = 1.0 / n.sqrt();
        self.amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(())
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `(⟨x⟩, ⟨y⟩)` and `(Var x, Var y)` of `|Ψ|²`.
    pub fn moments(&self) -> (Vec2, Vec2) {
        let g = &self.grid;
        let (mut w, mut mx, mut my, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let p = self.at(i, j).norm_sqr();
                let (x, y) = (g.x(i), g.y(j));
                w += p;
                mx += p * x;
                my += p * y;
                sxx += p * x * x;
                syy += p * y * y;
            }
        }
        let mean = Vec2::new(mx / w, my / w);
        let var = Vec2::new(sxx / w - mean.x * mean.x, syy / w - mean.y * mean.y);
        (mean, var)
    }

    pub fn max_abs_diff(&self, other: &Wavefunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}
