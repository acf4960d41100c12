use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Complex, Grid2D};
use crate::classical_dynamics::ParticleParams;
use crate::em_potentials::{line_integral_a, Path, PotentialField, QuadratureOptions};
use crate::{Error, Result, Vec2};

/// Impenetrable regions; nodes they cover are pinned to `Ψ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Barrier {
    /// Nodes with `x_min ≤ x < x_max`, except those with `lo ≤ y < hi` for
    /// one of the openings `[lo, hi]`.
    Wall {
        x_min: f64,
        x_max: f64,
        #[serde(default)]
        openings: Vec<[f64; 2]>,
    },
    /// Closed disc, e.g. the shield around a solenoid.
    Disc { center: Vec2, radius: f64 },
    /// Closed axis-aligned rectangle.
    Rect { min: Vec2, max: Vec2 },
}

impl Barrier {
    pub fn covers(&self, p: Vec2) -> bool {
        match self {
            Barrier::Wall { x_min, x_max, openings } => {
                p.x >= *x_min && p.x < *x_max && !openings.iter().any(|[lo, hi]| p.y >= *lo && p.y < *hi)
            }
            Barrier::Disc { center, radius } => (p - center).norm() <= *radius,
            Barrier::Rect { min, max } => {
                p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y
            }
        }
    }

    fn check_within(&self, grid: &Grid2D) -> Result<()> {
        let (lo, hi) = (grid.origin, grid.max_corner());
        let ok = match self {
            Barrier::Wall { x_min, x_max, .. } => x_min < x_max && *x_min >= lo.x && *x_max <= hi.x + grid.dx,
            Barrier::Disc { center, radius } => {
                *radius > 0.0
                    && grid.contains(center - Vec2::new(*radius, *radius))
                    && grid.contains(center + Vec2::new(*radius, *radius))
            }
            Barrier::Rect { min, max } => min.x <= max.x && min.y <= max.y && grid.contains(*min) && grid.contains(*max),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BarrierOutsideGrid(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Wall,
}

/// Discretized `(P − qA)²/(2m) + qφ`: nearest-neighbour hopping
/// `−ħ²/(2m h²)` dressed with Peierls factors.
///
/// `link_x[n]` is `exp(i(q/ħ)∫A·dl)` from node `n` to its `+x` neighbour
/// (and `link_y` likewise); entries on the last column/row are unused and
/// set to 1. Hopping from `m` to `n` carries `exp(i(q/ħ)∫ₘⁿ A·dl)`.
#[derive(Debug, Clone)]
pub struct LatticeHamiltonian {
    pub grid: Grid2D,
    pub params: ParticleParams,
    pub link_x: Vec<Complex>,
    pub link_y: Vec<Complex>,
    pub onsite: Vec<f64>,
    pub mask: Vec<NodeKind>,
}

pub fn build_hamiltonian(
    grid: &Grid2D,
    field: &PotentialField,
    params: &ParticleParams,
    barriers: &[Barrier],
) -> Result<LatticeHamiltonian> {
    grid.validate()?;
    params.validate()?;
    for b in barriers {
        b.check_within(grid)?;
    }
    let opts = QuadratureOptions::default();
    let coupling = params.charge / params.hbar;
    let (nx, ny) = (grid.nx, grid.ny);
    let link = |from: Vec2, to: Vec2| -> Result<Complex> {
        let path = Path::open(vec![from, to])?;
        Ok(Complex::from_polar(1.0, coupling * line_integral_a(field, &path, &opts)?))
    };
    let rows: Vec<(Vec<Complex>, Vec<Complex>)> = (0..ny)
        .into_par_iter()
        .map(|j| -> Result<_> {
            let mut lx = vec![Complex::new(1.0, 0.0); nx];
            let mut ly = vec![Complex::new(1.0, 0.0); nx];
            for i in 0..nx {
                let p = grid.node(i, j);
                if i + 1 < nx {
                    lx[i] = link(p, grid.node(i + 1, j))?;
                }
                if j + 1 < ny {
                    ly[i] = link(p, grid.node(i, j + 1))?;
                }
            }
            Ok((lx, ly))
        })
        .collect::<Result<_>>()?;
    let mut link_x = Vec::with_capacity(grid.len());
    let mut link_y = Vec::with_capacity(grid.len());
    for (lx, ly) in rows {
        link_x.extend(lx);
        link_y.extend(ly);
    }
    let mut onsite = vec![0.0; grid.len()];
    let mut mask = vec![NodeKind::Interior; grid.len()];
    for j in 0..ny {
        for i in 0..nx {
            let n = grid.index(i, j);
            let p = grid.node(i, j);
            if barriers.iter().any(|b| b.covers(p)) {
                mask[n] = NodeKind::Wall;
            } else {
                onsite[n] = params.charge * field.eval_phi(p)?;
            }
        }
    }
    Ok(LatticeHamiltonian {
        grid: *grid,
        params: *params,
        link_x,
        link_y,
        onsite,
        mask,
    })
}

impl LatticeHamiltonian {
    pub fn hopping(&self) -> (f64, f64) {
        let c = self.params.hbar * self.params.hbar / (2.0 * self.params.mass);
        (c / (self.grid.dx * self.grid.dx), c / (self.grid.dy * self.grid.dy))
    }

    pub fn is_wall(&self, n: usize) -> bool {
        self.mask[n] == NodeKind::Wall
    }

    /// Zero `Ψ` on wall nodes, where the evolution keeps it pinned.
    pub fn pin_walls(&self, psi: &mut super::Wavefunction) {
        for (a, k) in psi.amplitudes.iter_mut().zip(&self.mask) {
            if *k == NodeKind::Wall {
                *a = Complex::new(0.0, 0.0);
            }
        }
    }

    /// Diagonal element `2tₓ + 2t_y + V`.
    pub fn diagonal(&self, n: usize) -> f64 {
        let (tx, ty) = self.hopping();
        2.0 * tx + 2.0 * ty + self.onsite[n]
    }

    /// Off-diagonal elements of row `n` toward `+x, −x, +y, −y`; zero where
    /// the neighbour is missing or either node is a wall.
    pub fn row_couplings(&self, i: usize, j: usize) -> [Complex; 4] {
        let g = &self.grid;
        let n = g.index(i, j);
        let zero = Complex::new(0.0, 0.0);
        if self.is_wall(n) {
            return [zero; 4];
        }
        let (tx, ty) = self.hopping();
        let open = |m: usize| !self.is_wall(m);
        [
            if i + 1 < g.nx && open(n + 1) { -tx * self.link_x[n].conj() } else { zero },
            if i > 0 && open(n - 1) { -tx * self.link_x[n - 1] } else { zero },
            if j + 1 < g.ny && open(n + g.nx) { -ty * self.link_y[n].conj() } else { zero },
            if j > 0 && open(n - g.nx) { -ty * self.link_y[n - g.nx] } else { zero },
        ]
    }

    /// `out = HΨ`; wall rows are zero.
    pub fn apply(&self, psi: &[Complex], out: &mut [Complex]) -> Result<()> {
        let g = self.grid;
        if psi.len() != g.len() || out.len() != g.len() {
            return Err(Error::GridMismatch);
        }
        out.par_chunks_mut(g.nx).enumerate().for_each(|(j, row)| {
            for (i, o) in row.iter_mut().enumerate() {
                let n = g.index(i, j);
                if self.is_wall(n) {
                    *o = Complex::new(0.0, 0.0);
                    continue;
                }
                let c = self.row_couplings(i, j);
                let mut acc = psi[n] * self.diagonal(n);
                if i + 1 < g.nx {
                    acc += c[0] * psi[n + 1];
                }
                if i > 0 {
                    acc += c[1] * psi[n - 1];
                }
                if j + 1 < g.ny {
                    acc += c[2] * psi[n + g.nx];
                }
                if j > 0 {
                    acc += c[3] * psi[n - g.nx];
                }
                *o = acc;
            }
        });
        Ok(())
    }

    /// Product of link factors counter-clockwise around the cell with lower
    /// left node `(i, j)`; equals `exp(i(q/ħ)·flux through the cell)`.
    pub fn plaquette(&self, i: usize, j: usize) -> Complex {
        let g = &self.grid;
        let n = g.index(i, j);
        self.link_x[n] * self.link_y[n + 1] * self.link_x[n + g.nx].conj() * self.link_y[n].conj()
    }

    /// Largest `|U_p − 1|` over cells whose four corners are all open.
    pub fn max_open_plaquette_deviation(&self) -> f64 {
        let g = &self.grid;
        let mut worst = 0.0f64;
        for j in 0..g.ny - 1 {
            for i in 0..g.nx - 1 {
                let n = g.index(i, j);
                if [n, n + 1, n + g.nx, n + g.nx + 1].iter().any(|&m| self.is_wall(m)) {
                    continue;
                }
                worst = worst.max((self.plaquette(i, j) - 1.0).norm());
            }
        }
        worst
    }

    /// Largest `||U| − 1|` over all used links.
    pub fn max_link_modulus_error(&self) -> f64 {
        let g = &self.grid;
        let mut worst = 0.0f64;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let n = g.index(i, j);
                if i + 1 < g.nx {
                    worst = worst.max((self.link_x[n].norm() - 1.0).abs());
                }
                if j + 1 < g.ny {
                    worst = worst.max((self.link_y[n].norm() - 1.0).abs());
                }
            }
        }
        worst
    }

    /// Dense matrix restricted to open nodes, with the open node indices.
    pub fn to_dense(&self) -> (DMatrix<Complex>, Vec<usize>) {
        let g = &self.grid;
        let open: Vec<usize> = (0..g.len()).filter(|&n| !self.is_wall(n)).collect();
        let mut slot = vec![usize::MAX; g.len()];
        for (k, &n) in open.iter().enumerate() {
            slot[n] = k;
        }
        let mut h = DMatrix::from_element(open.len(), open.len(), Complex::new(0.0, 0.0));
        for (k, &n) in open.iter().enumerate() {
            let (i, j) = (n % g.nx, n / g.nx);
            h[(k, k)] = Complex::new(self.diagonal(n), 0.0);
            let c = self.row_couplings(i, j);
            let nbrs = [
                (i + 1 < g.nx).then(|| n + 1),
                (i > 0).then(|| n - 1),
                (j + 1 < g.ny).then(|| n + g.nx),
                (j > 0).then(|| n - g.nx),
            ];
            for (cm, m) in c.iter().zip(nbrs) {
                if let Some(m) = m {
                    if slot[m] != usize::MAX {
                        h[(k, slot[m])] = *cm;
                    }
                }
            }
        }
        (h, open)
    }
}

/// Largest `|∇·A|` over grid nodes (nodes on a singular point are skipped).
/// Zero for fields in Coulomb gauge.
pub fn coulomb_gauge_residual(grid: &Grid2D, field: &PotentialField) -> Result<f64> {
    let mut worst = 0.0f64;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            match field.divergence_a(grid.node(i, j)) {
                Ok(d) => worst = worst.max(d.abs()),
                Err(Error::SingularPoint(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(worst)
}
