//! Experiment files shipped with the crate.

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const PRESETS: [(&str, &str); 5] = [
    ("fig2", include_str!("../../presets/fig2.toml")),
    ("fig3", include_str!("../../presets/fig3.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("figS4", include_str!("../../presets/figS4.toml")),
    ("figS5", include_str!("../../presets/figS5.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, t)| *t)
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = preset_text(name).ok_or_else(|| {
        Error::Config(format!("unknown preset {name:?}; known: {}", preset_names().collect::<Vec<_>>().join(", ")))
    })?;
    ExperimentConfig::from_toml(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_validates() {
        for name in preset_names() {
            let c = preset(name).unwrap();
            assert!(c.diagnostics().is_empty(), "{name}: {:?}", c.diagnostics());
        }
        assert!(preset("fig9").is_err());
    }
}
