use faer::{Mat, Side};
use ws_lattice::{build_potential, Complex64, GridSpec, KineticOperator, LatticeParams};

use crate::error::BasisError;

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Keep eigenpairs with energy below this; default V0 + F x_max.
    pub cutoff: Option<f64>,
    pub residual_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { cutoff: None, residual_tol: 1e-8 }
    }
}

/// Eigenpairs of the boxed H0 below the cutoff, ascending, normalized so that
/// sum phi^2 dx = 1.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub grid: GridSpec,
    pub params: LatticeParams,
    pub cutoff: f64,
    pub energies: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub max_residual: f64,
    /// Size of the full spectrum before the cutoff.
    pub total: usize,
}

pub fn solve_eigenproblem(grid: &GridSpec, params: &LatticeParams, opts: &EigenOptions) -> Result<Eigenpairs, BasisError> {
    let m = grid.interior();
    let v = build_potential(grid, params, 0.0)?;
    let mut kin = KineticOperator::new(grid);
    let t = kin.dense();
    let h = Mat::<f64>::from_fn(m, m, |i, j| if i == j { t[i * m + j] + v[i] } else { t[i * m + j] });
    drop(t);
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(|e| BasisError::Solver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let cutoff = opts.cutoff.unwrap_or(params.v0() + params.f() * grid.x_max);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let inv_sqrt_dx = 1.0 / grid.dx().sqrt();
    let mut energies = Vec::new();
    let mut states = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut hphi = vec![Complex64::new(0.0, 0.0); m];
    for &k in order.iter().filter(|&&k| s[k] < cutoff) {
        let e = s[k];
        let phi: Vec<f64> = (0..m).map(|i| u[(i, k)] * inv_sqrt_dx).collect();
        let cphi: Vec<Complex64> = phi.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        kin.apply(&cphi, &mut hphi)?;
        let mut r2 = 0.0;
        for i in 0..m {
            let r = hphi[i].re + v[i] * phi[i] - e * phi[i];
            r2 += r * r;
        }
        let residual = (r2 * grid.dx()).sqrt();
        if !(residual <= opts.residual_tol) {
            return Err(BasisError::Residual { residual, tol: opts.residual_tol, energy: e });
        }
        max_residual = max_residual.max(residual);
        energies.push(e);
        states.push(phi);
    }
    Ok(Eigenpairs { grid: *grid, params: *params, cutoff, energies, states, max_residual, total: m })
}
