//! Shared building blocks for tilted, phase-modulated 1D lattices in recoil units:
//! parameters, the boxed grid, the lattice potential and the Hamiltonian action.

pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod params;
pub mod potential;
pub mod sine;
pub mod units;

pub use error::LatticeError;
pub use grid::GridSpec;
pub use hamiltonian::{apply_hamiltonian, KineticOperator};
pub use params::{LatticeParams, ModulationKind, ModulationSpec, D, M_STAR};
pub use potential::{build_potential, write_potential_csv};
pub use sine::SineTransform;
pub use units::UnitSystem;

pub use num_complex::Complex64;
