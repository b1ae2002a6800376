use crate::error::ObservablesError;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub samples: usize,
    pub max_dmean: f64,
    pub max_dwidth: f64,
    /// (t, fidelity) on timestamps both trajectories share, when both carry amplitudes.
    pub fidelity: Vec<(f64, f64)>,
}

impl Comparison {
    pub fn min_fidelity(&self) -> Option<f64> {
        self.fidelity.iter().map(|p| p.1).reduce(f64::min)
    }
}

fn interp(t: &[f64], y: &[f64], at: f64) -> f64 {
    match t.binary_search_by(|v| v.total_cmp(&at)) {
        Ok(k) => y[k],
        Err(k) => {
            let (i, j) = (k - 1, k);
            let w = (at - t[i]) / (t[j] - t[i]);
            y[i] * (1.0 - w) + y[j] * w
        }
    }
}

/// Metrics of B against A on A's timestamps inside the common range; B is
/// linearly interpolated, exactly where the timestamps coincide.
pub fn compare_trajectories(a: &Trajectory, b: &Trajectory) -> Result<Comparison, ObservablesError> {
    if a.is_empty() || b.is_empty() {
        return Err(ObservablesError::DisjointRanges);
    }
    let lo = a.t[0].max(b.t[0]);
    let hi = a.t[a.len() - 1].min(b.t[b.len() - 1]);
    if lo > hi {
        return Err(ObservablesError::DisjointRanges);
    }
    let mut out = Comparison { samples: 0, max_dmean: 0.0, max_dwidth: 0.0, fidelity: Vec::new() };
    let tol = 1e-9 * (1.0 + hi.abs());
    for i in 0..a.len() {
        let t = a.t[i];
        if t < lo - tol || t > hi + tol {
            continue;
        }
        let t = t.clamp(lo, hi);
        out.samples += 1;
        out.max_dmean = out.max_dmean.max((a.mean_x[i] - interp(&b.t, &b.mean_x, t)).abs());
        out.max_dwidth = out.max_dwidth.max((a.width[i] - interp(&b.t, &b.width, t)).abs());
        if a.has_coeffs() && b.has_coeffs() {
            if let Some(k) = b.t.iter().position(|bt| (bt - a.t[i]).abs() <= tol) {
                out.fidelity.push((a.t[i], a.coeffs[i].fidelity(&b.coeffs[k])));
            }
        }
    }
    Ok(out)
}
