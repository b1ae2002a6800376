use thiserror::Error;
use ws_basis::BasisError;
use ws_lattice::LatticeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagatorError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("envelope must be finite and non-negative (site {site}: {value})")]
    BadEnvelope { site: i64, value: f64 },
    #[error("envelope puts {fraction:.3e} of its weight outside the bulk (limit {limit:.1e})")]
    EnvelopeOutsideBulk { fraction: f64, limit: f64 },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("norm {norm} drifted beyond 1 +- {tol} at t = {t}")]
    NormDrift { t: f64, norm: f64, tol: f64 },
    #[error("probability {mass:.3e} reached the box walls at t = {t} (limit {tol:.1e})")]
    WallContact { t: f64, mass: f64, tol: f64 },
    #[error("bad step parameters: {0}")]
    BadStep(String),
    #[error("state is tagged {found:?}, transform expects {expected:?}")]
    FrameMismatch { expected: crate::wavepacket::Frame, found: crate::wavepacket::Frame },
}
