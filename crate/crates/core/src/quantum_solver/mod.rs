//! Lattice Schrödinger evolution with Peierls link phases and a
//! Crank–Nicolson stepper.

mod experiment;
mod grid;
mod hamiltonian;
mod stepper;

pub use experiment::{experiment_barriers, run_experiment, run_experiment_with, QuantumOptions, QuantumRun};
pub use grid::{GaussianPacket, Grid2D, Wavefunction};
pub use hamiltonian::{build_hamiltonian, coulomb_gauge_residual, Barrier, LatticeHamiltonian, NodeKind};
pub use stepper::{gauge_rephase, step, Absorber, CrankNicolson, SolverConfig, StepReport};

pub type Complex = num_complex::Complex64;
