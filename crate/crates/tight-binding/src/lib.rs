//! Reduced models of a driven Wannier-Stark ladder: the coupled c_n equations on a
//! finite chain, the secular d_n models and the Gaussian envelope theory.

pub mod bessel;
mod chain;
mod envelope;
mod error;
pub mod ode;
mod secular;

pub use bessel::{bessel_j, bessel_j_all};
pub use chain::{
    from_interaction_picture, integrate_cn, to_interaction_picture, Picture, TbChain, TbOptions, TbRun, TightBindingState,
    DEFAULT_SITES,
};
pub use envelope::{detuned_envelope, envelope_general, gaussian_profile, gaussian_width, EnvelopeOptions, EnvelopeSolution};
pub use error::TightBindingError;
pub use secular::{
    bessel_expansion_terms, default_l_max, dispersion_and_vg, expansion_error, integrate_dn_resonant, min_l_max, rabi_frequency,
    secular_reduce, SecularModel, SecularOptions, SecularTerm, EXPANSION_TOL,
};
