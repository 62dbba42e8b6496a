use super::config::Scenario;
use crate::error::{Error, Result};

/// Built-in scenarios, by name.
pub const PRESETS: &[(&str, &str)] = &[
    (
        "fig2-cavity",
        include_str!("../../presets/fig2-cavity.toml"),
    ),
    (
        "fig3-freespace",
        include_str!("../../presets/fig3-freespace.toml"),
    ),
    (
        "zero-coupling",
        include_str!("../../presets/zero-coupling.toml"),
    ),
    (
        "shaped-output",
        include_str!("../../presets/shaped-output.toml"),
    ),
];

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load_preset(name: &str) -> Result<Scenario> {
    let text = preset_text(name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        Error::Config(format!(
            "unknown preset `{name}`; available: {}",
            names.join(", ")
        ))
    })?;
    Scenario::from_toml(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_round_trips() {
        for (name, _) in PRESETS {
            let s = load_preset(name).unwrap();
            assert_eq!(&s.name, name);
            let again = Scenario::from_toml(&s.to_toml().unwrap()).unwrap();
            assert_eq!(s, again);
        }
        assert!(load_preset("nope").is_err());
    }
}
