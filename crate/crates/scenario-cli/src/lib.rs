//! Scenario files, shipped presets and the pipeline behind the `wslattice` binary.

pub mod config;
pub mod error;
pub mod presets;
pub mod runner;

pub use config::{parse_config, with_override, AnalysisKind, Engine, ScenarioConfig, REQUIRED_KEYS};
pub use error::{ConfigError, ConfigIssue, IssueKind, ScenarioError};
pub use presets::{list_presets, preset, preset_config, Preset};
pub use runner::{run_scenario, sweep, Check, Context, EngineRun, Outcome, CHAIN_NORM_TOL, GRID_NORM_TOL};
