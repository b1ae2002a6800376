use ws_basis::{Couplings, WSBasis};
use ws_lattice::{Complex64, GridSpec, ModulationSpec, SineTransform};
use ws_observables::SiteAmplitudes;

use crate::error::PropagatorError;

/// Fraction of envelope weight allowed outside the bulk; it is dropped.
pub const OUTSIDE_BULK_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Accelerated,
}

/// Grid state with optional WSS coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavepacket {
    pub grid: GridSpec,
    pub psi: Vec<Complex64>,
    pub coeffs: Option<SiteAmplitudes>,
    pub t: f64,
    pub frame: Frame,
}

impl Wavepacket {
    /// psi = sum_n c_n phi_n.
    pub fn from_coefficients(basis: &WSBasis, coeffs: SiteAmplitudes, frame: Frame) -> Result<Self, PropagatorError> {
        let m = basis.grid.interior();
        let mut psi = vec![Complex64::new(0.0, 0.0); m];
        for n in coeffs.sites() {
            let c = coeffs.get(n);
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let phi = basis.state(n).ok_or(PropagatorError::BadEnvelope { site: n, value: c.norm() })?;
            for (p, f) in psi.iter_mut().zip(phi) {
                *p += c * f;
            }
        }
        Ok(Wavepacket { grid: basis.grid, psi, coeffs: Some(coeffs), t: 0.0, frame })
    }

    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// <self|other> on the grid.
    pub fn overlap(&self, other: &Wavepacket) -> Complex64 {
        self.psi.iter().zip(&other.psi).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.grid.dx()
    }

    pub fn fidelity(&self, other: &Wavepacket) -> f64 {
        self.overlap(other).norm_sqr() / (self.norm() * other.norm())
    }

    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|p| p.norm_sqr()).collect()
    }
}

/// Normalized Gaussian-shaped envelope with |c_n|^2 of RMS width `sigma` sites.
pub fn gaussian_envelope(center: f64, sigma: f64) -> impl Fn(i64) -> f64 {
    move |n| (-(n as f64 - center).powi(2) / (4.0 * sigma * sigma)).exp()
}

/// Which coefficients a set of site amplitudes stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeKind {
    /// c_n.
    Bare,
    /// d_n at t = 0, with c_n = d_n e^{-i F0 X_nn / omega}.
    Interaction,
}

/// Amplitudes on the basis sites, zeroed outside the bulk and normalized.
fn bulk_amplitudes(basis: &WSBasis, amp: &dyn Fn(i64) -> Complex64) -> Result<Vec<Complex64>, PropagatorError> {
    let mut amps = Vec::with_capacity(basis.len());
    let (mut inside, mut outside) = (0.0, 0.0);
    for &n in &basis.sites {
        let v = amp(n);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(PropagatorError::BadEnvelope { site: n, value: v.norm() });
        }
        if basis.in_bulk(n) {
            inside += v.norm_sqr();
            amps.push(v);
        } else {
            outside += v.norm_sqr();
            amps.push(Complex64::new(0.0, 0.0));
        }
    }
    let total = inside + outside;
    if total == 0.0 {
        return Err(PropagatorError::ZeroNorm);
    }
    if outside / total > OUTSIDE_BULK_TOL {
        return Err(PropagatorError::EnvelopeOutsideBulk { fraction: outside / total, limit: OUTSIDE_BULK_TOL });
    }
    let s = inside.sqrt();
    Ok(amps.into_iter().map(|a| a / s).collect())
}

fn check_envelope(basis: &WSBasis, envelope: &dyn Fn(i64) -> f64) -> Result<(), PropagatorError> {
    for &n in &basis.sites {
        let v = envelope(n);
        if !(v.is_finite() && v >= 0.0) {
            return Err(PropagatorError::BadEnvelope { site: n, value: v });
        }
    }
    Ok(())
}

/// c_n(0) = envelope(n) e^{i k0 d n}, normalized.
pub fn prepare_wavepacket(basis: &WSBasis, envelope: impl Fn(i64) -> f64, k0: f64) -> Result<Wavepacket, PropagatorError> {
    check_envelope(basis, &envelope)?;
    let c = bulk_amplitudes(basis, &|n| Complex64::from_polar(envelope(n), k0 * n as f64))?;
    Wavepacket::from_coefficients(basis, SiteAmplitudes::new(basis.first_site(), c), Frame::Accelerated)
}

/// Arbitrary site amplitudes, read as c_n or as d_n(0).
pub fn prepare_amplitudes(
    basis: &WSBasis,
    couplings: &Couplings,
    amplitudes: impl Fn(i64) -> Complex64,
    kind: AmplitudeKind,
    modulation: &ModulationSpec,
) -> Result<Wavepacket, PropagatorError> {
    let a = SiteAmplitudes::new(basis.first_site(), bulk_amplitudes(basis, &amplitudes)?);
    match kind {
        AmplitudeKind::Bare => Wavepacket::from_coefficients(basis, a, Frame::Accelerated),
        AmplitudeKind::Interaction => prepare_from_interaction(basis, couplings, &a, modulation),
    }
}

/// Interaction-picture amplitudes d_n at t = 0 mapped to c_n = d_n e^{-i F0 X_nn / omega}.
pub fn prepare_from_interaction(
    basis: &WSBasis,
    couplings: &Couplings,
    d: &SiteAmplitudes,
    modulation: &ModulationSpec,
) -> Result<Wavepacket, PropagatorError> {
    let f0 = modulation.f0();
    let mut c = SiteAmplitudes::new(
        basis.first_site(),
        basis
            .sites
            .iter()
            .map(|&n| {
                let phase = if f0 != 0.0 { -f0 * couplings.x_nm(n, n) / modulation.omega } else { 0.0 };
                d.get(n) * Complex64::cis(phase)
            })
            .collect(),
    );
    if c.norm_sqr() == 0.0 {
        return Err(PropagatorError::ZeroNorm);
    }
    c.normalize();
    Wavepacket::from_coefficients(basis, c, Frame::Accelerated)
}

/// Like `prepare_wavepacket`, but k0 is the site-to-site phase of the slow
/// amplitudes d_n rather than of c_n.
pub fn prepare_driven_wavepacket(
    basis: &WSBasis,
    couplings: &Couplings,
    envelope: impl Fn(i64) -> f64,
    k0: f64,
    modulation: &ModulationSpec,
) -> Result<Wavepacket, PropagatorError> {
    check_envelope(basis, &envelope)?;
    prepare_amplitudes(basis, couplings, |n| Complex64::from_polar(envelope(n), k0 * n as f64), AmplitudeKind::Interaction, modulation)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub coeffs: SiteAmplitudes,
    /// 1 - sum |c_n|^2.
    pub residual: f64,
}

/// c_n = <phi_n|psi>.
pub fn project_onto_wss(state: &Wavepacket, basis: &WSBasis) -> Result<Projection, PropagatorError> {
    basis.grid.check_len(state.psi.len())?;
    let dx = basis.grid.dx();
    let c: Vec<Complex64> = basis
        .states
        .iter()
        .map(|phi| {
            let (mut re, mut im) = (0.0, 0.0);
            for (f, p) in phi.iter().zip(&state.psi) {
                re += f * p.re;
                im += f * p.im;
            }
            Complex64::new(re * dx, im * dx)
        })
        .collect();
    let coeffs = SiteAmplitudes::new(basis.first_site(), c);
    let residual = state.norm() - coeffs.norm_sqr();
    Ok(Projection { coeffs, residual })
}

/// Same state on a finer grid of the same box by zero-padding its sine spectrum.
pub fn resample_spectral(state: &Wavepacket, grid: &GridSpec) -> Result<Wavepacket, PropagatorError> {
    let old = state.grid;
    if grid.x_min != old.x_min || grid.x_max != old.x_max || grid.points() < old.points() {
        return Err(PropagatorError::BadStep("resampling needs the same box and at least as many points".into()));
    }
    let mut coef = state.psi.clone();
    SineTransform::new(old.points()).apply(&mut coef);
    let scale = (grid.points() as f64 / old.points() as f64).sqrt();
    let mut fine = vec![Complex64::new(0.0, 0.0); grid.interior()];
    for (f, c) in fine.iter_mut().zip(&coef) {
        *f = c * scale;
    }
    SineTransform::new(grid.points()).apply(&mut fine);
    Ok(Wavepacket { grid: *grid, psi: fine, coeffs: None, t: state.t, frame: state.frame })
}
