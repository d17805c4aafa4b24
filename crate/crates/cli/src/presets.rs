use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Bundled configs, sorted by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("identity-weights", include_str!("../presets/identity-weights.json")),
    ("mixed-translation", include_str!("../presets/mixed-translation.json")),
    ("phi-commutative", include_str!("../presets/phi-commutative.json")),
    ("phi-compact", include_str!("../presets/phi-compact.json")),
    ("salas-avg", include_str!("../presets/salas-avg.json")),
    ("salas-chaos", include_str!("../presets/salas-chaos.json")),
    ("salas-hc", include_str!("../presets/salas-hc.json")),
    ("translation-avg", include_str!("../presets/translation-avg.json")),
    ("translation-chaos", include_str!("../presets/translation-chaos.json")),
    ("translation-hc", include_str!("../presets/translation-hc.json")),
];

pub fn get(name: &str) -> Option<Result<ExperimentConfig, CliError>> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ExperimentConfig::parse(text))
}

/// `(name, description)` for every preset.
pub fn list() -> Result<Vec<(&'static str, String)>, CliError> {
    PRESETS
        .iter()
        .map(|(n, text)| Ok((*n, ExperimentConfig::parse(text)?.description)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_are_sorted() {
        let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        for (name, desc) in list().unwrap() {
            assert!(!desc.is_empty(), "{name}");
        }
        assert!(get("nope").is_none());
    }
}
