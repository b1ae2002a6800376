//! Scenario files shipped with the binary.

use crate::config::{parse_config, ScenarioConfig};
use crate::error::ConfigError;

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub source: &'static str,
}

const PRESETS: [Preset; 6] = [
    Preset {
        name: "bloch-undriven",
        description: "Undriven Bloch oscillation; amplitude against initial site-to-site coherence",
        source: include_str!("../presets/bloch-undriven.toml"),
    },
    Preset {
        name: "fig1-basis",
        description: "Wannier-Stark ladder, localized states and coupling table",
        source: include_str!("../presets/fig1-basis.toml"),
    },
    Preset {
        name: "fig2-quadrature",
        description: "Resonant drive, k0 = pi/2: spreading without drift",
        source: include_str!("../presets/fig2-quadrature.toml"),
    },
    Preset {
        name: "fig3-inphase",
        description: "Resonant drive, k0 = 0: climbing at constant group velocity",
        source: include_str!("../presets/fig3-inphase.toml"),
    },
    Preset {
        name: "fig4-harmonic",
        description: "Drive at twice the Bloch frequency: two counter-propagating packets",
        source: include_str!("../presets/fig4-harmonic.toml"),
    },
    Preset {
        name: "fig56-detuned",
        description: "Drive detuned by 0.02: breathing centroid and width over two beat periods",
        source: include_str!("../presets/fig56-detuned.toml"),
    },
];

const ALIASES: [(&str, &str); 8] = [
    ("bloch", "bloch-undriven"),
    ("fig1", "fig1-basis"),
    ("fig2", "fig2-quadrature"),
    ("fig3", "fig3-inphase"),
    ("fig4", "fig4-harmonic"),
    ("fig5", "fig56-detuned"),
    ("fig6", "fig56-detuned"),
    ("fig56", "fig56-detuned"),
];

/// (name, description) in a fixed order.
pub fn list_presets() -> Vec<(&'static str, &'static str)> {
    PRESETS.iter().map(|p| (p.name, p.description)).collect()
}

/// Looks a preset up by name or short alias.
pub fn preset(name: &str) -> Result<&'static Preset, ConfigError> {
    let full = ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, f)| *f);
    PRESETS.iter().find(|p| p.name == full).ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))
}

pub fn preset_config(name: &str) -> Result<ScenarioConfig, ConfigError> {
    parse_config(preset(name)?.source)
}
