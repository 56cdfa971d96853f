//! Shipped scenarios, embedded from `scenarios/*.json`.

use crate::config::ScenarioConfig;
use crate::LabError;

pub const SHIPPED: [(&str, &str); 6] = [
    ("ring-example", include_str!("../scenarios/ring-example.json")),
    ("theorem1-disk", include_str!("../scenarios/theorem1-disk.json")),
    ("theorem2-star", include_str!("../scenarios/theorem2-star.json")),
    ("theorem3-intrinsic", include_str!("../scenarios/theorem3-intrinsic.json")),
    ("radial-exact", include_str!("../scenarios/radial-exact.json")),
    ("incompatible-data", include_str!("../scenarios/incompatible-data.json")),
];

pub fn names() -> Vec<&'static str> {
    SHIPPED.iter().map(|(n, _)| *n).collect()
}

pub fn get(name: &str) -> Result<ScenarioConfig, LabError> {
    let (_, text) = SHIPPED.iter().find(|(n, _)| *n == name).ok_or_else(|| LabError::UnknownScenario(name.into()))?;
    ScenarioConfig::from_json(text)
}

/// `(name, description)` of every shipped scenario.
pub fn list() -> Vec<(String, String)> {
    SHIPPED
        .iter()
        .map(|(n, _)| {
            let c = get(n).expect("shipped scenarios are valid");
            (c.name, c.description)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_valid_scenarios_named_like_their_files() {
        let l = list();
        assert_eq!(l.len(), 6);
        for ((name, desc), file) in l.iter().zip(names()) {
            assert_eq!(name, file);
            assert!(!desc.is_empty());
        }
    }
}
