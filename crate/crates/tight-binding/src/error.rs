use thiserror::Error;

use crate::chain::Picture;

#[derive(Debug, Error)]
pub enum TightBindingError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("l_max = {l_max} is too small for z = {z}; need at least {needed}")]
    LMaxTooSmall { l_max: usize, z: f64, needed: usize },
    #[error("Bessel partial sum misses exp(-i z cos wt) by {error:e} (tol {tol:e})")]
    Truncation { error: f64, tol: f64 },
    #[error("omega = {omega} is not within {tol_rel} omega_B of {q} omega_B")]
    NoResonance { omega: f64, q: u32, tol_rel: f64 },
    #[error("no secular terms survive the retention window")]
    NoSecularTerms,
    #[error("resonance order {0} is not supported (1 or 2)")]
    UnsupportedOrder(u32),
    #[error("norm drifted to {norm} at t = {t} (tol {tol:e}); reduce dt")]
    NormDrift { t: f64, norm: f64, tol: f64 },
    #[error("edge sites hold {mass:e} of the probability at t = {t} (tol {tol:e})")]
    EdgeContact { t: f64, mass: f64, tol: f64 },
    #[error("state is in the {found:?} picture, expected {expected:?}")]
    WrongPicture { expected: Picture, found: Picture },
    #[error("quadrature did not settle: {error:e} > {tol:e}")]
    Quadrature { error: f64, tol: f64 },
}
