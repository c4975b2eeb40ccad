//! Scenarios shipped with the crate as TOML data files.

use super::Scenario;
use crate::error::{GceError, Result};

const BUILTINS: &[(&str, &str)] = &[
    ("fig1a", include_str!("../../scenarios/fig1a.toml")),
    ("fig1b", include_str!("../../scenarios/fig1b.toml")),
    ("fig2", include_str!("../../scenarios/fig2.toml")),
    ("free", include_str!("../../scenarios/free.toml")),
    ("unequal-potentials", include_str!("../../scenarios/unequal-potentials.toml")),
    (
        "unequal-potentials-schrodinger",
        include_str!("../../scenarios/unequal-potentials-schrodinger.toml"),
    ),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

/// TOML text of a built-in scenario.
pub fn builtin_source(name: &str) -> Result<&'static str> {
    BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| GceError::UnknownScenario(name.into()))
}

pub fn builtin_scenario(name: &str) -> Result<Scenario> {
    Scenario::from_toml_str(builtin_source(name)?, &format!("builtin `{name}`"))
}
