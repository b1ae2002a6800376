//! Sine-spectral kinetic term P^2/(2 m*) with Dirichlet walls, shared by the
//! eigensolver (dense form) and the propagators (transform form).

use num_complex::Complex64;

use crate::error::LatticeError;
use crate::grid::GridSpec;
use crate::params::{LatticeParams, M_STAR};
use crate::sine::SineTransform;

#[derive(Clone)]
pub struct KineticOperator {
    grid: GridSpec,
    eigenvalues: Vec<f64>,
    transform: SineTransform,
}

impl KineticOperator {
    pub fn new(grid: &GridSpec) -> Self {
        KineticOperator { grid: *grid, eigenvalues: kinetic_eigenvalues(grid), transform: SineTransform::new(grid.points()) }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// (pi k / L)^2 / (2 m*), k = 1 .. n-1.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn transform_mut(&mut self) -> &mut SineTransform {
        &mut self.transform
    }

    /// out = T psi.
    pub fn apply(&mut self, psi: &[Complex64], out: &mut [Complex64]) -> Result<(), LatticeError> {
        self.grid.check_len(psi.len())?;
        self.grid.check_len(out.len())?;
        out.copy_from_slice(psi);
        self.transform.apply(out);
        for (o, t) in out.iter_mut().zip(&self.eigenvalues) {
            *o *= *t;
        }
        self.transform.apply(out);
        Ok(())
    }

    /// Dense row-major matrix of the same operator, T_ij = g(i-j) - g(i+j+2) in
    /// 0-based interior indices, g(m) = (1/n) sum_k t_k cos(pi m k / n).
    pub fn dense(&self) -> Vec<f64> {
        let n = self.grid.points();
        let m = n - 1;
        let two_n = 2 * n;
        let cos_table: Vec<f64> =
            (0..two_n).map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
        let g: Vec<f64> = (0..=two_n)
            .map(|mm| {
                let mut s = 0.0;
                for (k, t) in self.eigenvalues.iter().enumerate() {
                    s += t * cos_table[(mm * (k + 1)) % two_n];
                }
                s / n as f64
            })
            .collect();
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                let diff = i.abs_diff(j);
                out[i * m + j] = g[diff] - g[i + j + 2];
            }
        }
        out
    }
}

pub fn kinetic_eigenvalues(grid: &GridSpec) -> Vec<f64> {
    let l = grid.length();
    (1..grid.points())
        .map(|k| {
            let q = std::f64::consts::PI * k as f64 / l;
            q * q / (2.0 * M_STAR)
        })
        .collect()
}

/// H psi = -(1/(2 m*)) psi'' + V psi with the sine-spectral second derivative.
pub fn apply_hamiltonian(
    grid: &GridSpec,
    state: &[Complex64],
    potential: &[f64],
    _params: &LatticeParams,
) -> Result<Vec<Complex64>, LatticeError> {
    grid.check_len(state.len())?;
    grid.check_len(potential.len())?;
    let mut kin = KineticOperator::new(grid);
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    kin.apply(state, &mut out)?;
    for ((o, s), v) in out.iter_mut().zip(state).zip(potential) {
        *o += s * v;
    }
    Ok(out)
}
