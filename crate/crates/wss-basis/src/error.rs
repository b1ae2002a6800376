use thiserror::Error;
use ws_lattice::LatticeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("eigensolver failed: {0}")]
    Solver(String),
    #[error("eigenpair residual {residual:.3e} exceeds {tol:.1e} (energy {energy})")]
    Residual { residual: f64, tol: f64, energy: f64 },
    #[error("ladder extraction needs a tilt F > 0")]
    NoTilt,
    #[error("ambiguous assignment in well {well}: candidates at {e0} and {e1} are closer than {gap}")]
    Ambiguous { well: i64, e0: f64, e1: f64, gap: f64 },
    #[error("no eigenstate below the cutoff is localized in well {well}")]
    MissingWell { well: i64 },
    #[error("bulk range shrank below {min} sites without meeting the ladder tolerances (ladder {ladder:.3e}, translation {translation:.3e})")]
    BulkTooSmall { min: usize, ladder: f64, translation: f64 },
    #[error("state for site {site} has no dominant lobe in its own well")]
    NoDominantLobe { site: i64 },
    #[error("coupling X_{p} spread {spread:.3e} over the bulk exceeds {tol:.1e}")]
    CouplingSpread { p: usize, spread: f64, tol: f64 },
    #[error("p_max must be >= 1")]
    BadPMax,
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for BasisError {
    fn from(e: std::io::Error) -> Self {
        BasisError::Io(e.to_string())
    }
}
