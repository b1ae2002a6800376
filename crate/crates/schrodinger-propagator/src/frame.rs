//! Unitary map between the lab frame (lattice displaced by X0(t) = a sin wt) and
//! the frame co-moving with the lattice, where the drive is the force -F0 sin(wt) x.
//!
//! psi_lab(x) = e^{-i gamma} e^{i beta x} psi_acc(x - X0), beta = m* X0',
//! gamma' = F X0 + m* X0'' X0 + (m*/2) X0'^2.

use rustfft::FftPlanner;
use ws_lattice::{Complex64, LatticeParams, ModulationKind, ModulationSpec, M_STAR};

use crate::error::PropagatorError;
use crate::wavepacket::{Frame, Wavepacket};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LabToAccelerated,
    AcceleratedToLab,
}

/// Closed form of gamma(t) with gamma(0) = 0.
pub fn gamma(params: &LatticeParams, modulation: &ModulationSpec, t: f64) -> f64 {
    if modulation.kind == ModulationKind::None {
        return 0.0;
    }
    let (a, w) = (modulation.a, modulation.omega);
    params.f() * a * (1.0 - (w * t).cos()) / w + M_STAR * a * a * w * w * (-t / 4.0 + 3.0 * (2.0 * w * t).sin() / (8.0 * w))
}

/// f(x) -> f(x - s) on the periodic extension of the interior nodes. Odd length,
/// so the map is exactly unitary and the shift by -s inverts it.
fn shift(state: &mut Wavepacket, s: f64) {
    let n = state.psi.len();
    let period = n as f64 * state.grid.dx();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut state.psi);
    for (j, b) in state.psi.iter_mut().enumerate() {
        let m = if 2 * j < n { j as f64 } else { j as f64 - n as f64 };
        let k = 2.0 * std::f64::consts::PI * m / period;
        *b *= Complex64::cis(-k * s) / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut state.psi);
}

pub fn frame_transform(
    state: &Wavepacket,
    params: &LatticeParams,
    modulation: &ModulationSpec,
    direction: Direction,
) -> Result<Wavepacket, PropagatorError> {
    let (expected, target) = match direction {
        Direction::LabToAccelerated => (Frame::Lab, Frame::Accelerated),
        Direction::AcceleratedToLab => (Frame::Accelerated, Frame::Lab),
    };
    if state.frame != expected {
        return Err(PropagatorError::FrameMismatch { expected, found: state.frame });
    }
    let mut out = state.clone();
    out.frame = target;
    out.coeffs = None;
    if modulation.kind == ModulationKind::None {
        return Ok(out);
    }
    let t = state.t;
    let (x0, v0, _) = modulation.displacement(t);
    let beta = M_STAR * v0;
    let gam = gamma(params, modulation, t);
    let g = state.grid;
    match direction {
        Direction::AcceleratedToLab => {
            shift(&mut out, x0);
            for (i, p) in out.psi.iter_mut().enumerate() {
                *p *= Complex64::cis(beta * g.x(i) - gam);
            }
        }
        Direction::LabToAccelerated => {
            for (i, p) in out.psi.iter_mut().enumerate() {
                *p *= Complex64::cis(gam - beta * g.x(i));
            }
            shift(&mut out, -x0);
        }
    }
    Ok(out)
}
