//! Full Schrodinger propagation on the boxed grid, the lab/accelerated frame
//! transform and projection onto the Wannier-Stark ladder.

pub mod error;
pub mod frame;
pub mod propagate;
pub mod wavepacket;

pub use error::PropagatorError;
pub use frame::{frame_transform, gamma, Direction};
pub use propagate::{energy_expectation, propagate, PropagateOptions, PropagationResult};
pub use wavepacket::{
    gaussian_envelope, prepare_amplitudes, prepare_driven_wavepacket, prepare_from_interaction, prepare_wavepacket,
    project_onto_wss, resample_spectral, AmplitudeKind, Frame, Projection, Wavepacket, OUTSIDE_BULK_TOL,
};
