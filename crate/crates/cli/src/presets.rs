//! Built-in scenario presets shipped with the binary.
//!
//! Every preset is a plain scenario TOML file under `presets/`, compiled into
//! the binary so `qvte run <name>` works without any files on disk. The same
//! files can be copied and edited as starting points for custom scenarios.

use crate::config::Scenario;
use crate::error::{HarnessError, Result};

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../presets/", $name, ".toml")))),*]
    };
}

/// `(name, TOML source)` for every built-in preset.
pub const PRESETS: &[(&str, &str)] = presets![
    "fp-6q-vf1d5-position",
    "fp-6q-vf1d2-momentum",
    "ho-6q-vf1d5-position",
    "ho-6q-vf1d5-momentum",
    "eb-6q-vf1d5-position",
    "eb-6q-vf1d5-momentum",
    "ho-6q-vf2d5-ld-cut0",
    "ho-6q-vf2d5-ld-cut0p1",
    "ho-6q-vf2d5-ld-cut1",
    "eb-6q-vf2d5-ld-cut0",
    "eb-6q-vf2d5-ld-cut0p1",
    "eb-6q-vf2d5-ld-cut1",
    "ho-6q-b06-vf1d5-position",
    "mh-8q-vf1d20-position",
    "mh-8q-vf1d20-ld",
    "mh-8q-vf1d25-position",
    "mh-8q-vf1d25-ld",
    "width-study-b1",
    "width-study-b2",
    "width-study-b3",
    "mesh-study-ho-6q",
    "mesh-study-ho-7q",
    "mesh-study-ho-8q",
];

/// The TOML source of one preset, if it exists.
pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Parses a preset into a scenario.
pub fn preset_scenario(name: &str) -> Result<Scenario> {
    let source = preset_source(name).ok_or_else(|| {
        HarnessError::validation("preset", format!("unknown preset `{name}`"))
    })?;
    Scenario::from_toml(source)
}

/// `(name, description)` pairs for every preset, in declaration order.
pub fn list_presets() -> Vec<(String, String)> {
    PRESETS
        .iter()
        .map(|(name, source)| {
            let description = Scenario::from_toml(source)
                .map(|s| s.description)
                .unwrap_or_default();
            (name.to_string(), description)
        })
        .collect()
}
