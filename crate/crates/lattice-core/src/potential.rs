use std::io::Write;
use std::path::Path;

use crate::error::LatticeError;
use crate::grid::GridSpec;
use crate::params::LatticeParams;

/// V(x) = V0 cos(2 pi (x - x0)) + F x on the interior nodes. Walls are a boundary
/// condition and do not appear here.
pub fn build_potential(grid: &GridSpec, params: &LatticeParams, x0: f64) -> Result<Vec<f64>, LatticeError> {
    if !x0.is_finite() {
        return Err(LatticeError::InvalidParam { name: "x0", reason: format!("must be finite, got {x0}") });
    }
    let tau = 2.0 * std::f64::consts::PI;
    Ok((0..grid.interior())
        .map(|i| {
            let x = grid.x(i);
            params.v0() * (tau * (x - x0)).cos() + params.f() * x
        })
        .collect())
}

/// Two-column CSV (x, V).
pub fn write_potential_csv(path: &Path, grid: &GridSpec, v: &[f64]) -> Result<(), LatticeError> {
    grid.check_len(v.len())?;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "x,V")?;
    for (i, vi) in v.iter().enumerate() {
        writeln!(w, "{:.10},{:.12e}", grid.x(i), vi)?;
    }
    w.flush()?;
    Ok(())
}
