//! Wannier-Stark basis: boxed eigenproblem, ladder extraction, sign convention
//! and the coupling table X_p = <phi_n|x|phi_{n+p}>.

pub mod couplings;
pub mod eigen;
pub mod error;
pub mod export;
pub mod ladder;

pub use couplings::{coupling_matrix, matrix_element, CouplingOptions, Couplings};
pub use eigen::{solve_eigenproblem, EigenOptions, Eigenpairs};
pub use error::BasisError;
pub use ladder::{extract_wss_ladder, fix_phase, LadderDiagnostics, LadderOptions, WSBasis};

use ws_lattice::{GridSpec, LatticeParams};

/// Solve, extract and couple in one go with default options.
pub fn build_basis(grid: &GridSpec, params: &LatticeParams, p_max: usize) -> Result<(WSBasis, Couplings), BasisError> {
    let pairs = solve_eigenproblem(grid, params, &EigenOptions::default())?;
    let basis = extract_wss_ladder(&pairs, &LadderOptions::default())?;
    let couplings = coupling_matrix(&basis, p_max, &CouplingOptions::default())?;
    Ok((basis, couplings))
}
