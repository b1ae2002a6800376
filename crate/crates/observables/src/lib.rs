//! Observables and fitted quantities from trajectories of any representation.

pub mod compare;
pub mod error;
pub mod fit;
pub mod moments;
pub mod report;
pub mod trajectory;

pub use compare::{compare_trajectories, Comparison};
pub use error::ObservablesError;
pub use fit::{
    fit_group_velocity, fit_oscillation, harmonic_amplitudes, linear_fit, period_average, LinearFit, OscillationFit,
    VelocityFit,
};
pub use moments::{
    mean_position_grid, mean_position_wss, mean_position_wss_free, norm_grid, sublattice_centroids, width_grid,
    width_sites,
};
pub use report::Report;
pub use trajectory::{Representation, SiteAmplitudes, Snapshot, Trajectory, CSV_SCHEMA_VERSION};
