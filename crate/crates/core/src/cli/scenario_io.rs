//! Scenario files are TOML documents that map one-to-one onto
//! [`Scenario`]. Keys carry their unit (`energy_wh`, `rates_kbps`, ...).

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::model::{validate_scenario, Scenario};

/// The reference scenario as shipped in `data/default_scenario.toml`.
pub const DEFAULT_SCENARIO_TOML: &str = include_str!("../../data/default_scenario.toml");

#[derive(Debug)]
pub enum LoadError {
    Read(String),
    Parse(String),
    Invalid(Vec<String>),
}

impl LoadError {
    /// Human-readable lines, one per problem.
    pub fn lines(&self) -> Vec<String> {
        match self {
            LoadError::Read(m) | LoadError::Parse(m) => vec![m.clone()],
            LoadError::Invalid(v) => v.clone(),
        }
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, LoadError> {
    let scenario: Scenario =
        toml::from_str(text).map_err(|e| LoadError::Parse(format!("parse error: {e}")))?;
    validate_scenario(&scenario)
        .map_err(|errs| LoadError::Invalid(errs.iter().map(ToString::to_string).collect()))?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let text = fs::read_to_string(path)
        .map_err(|e| LoadError::Read(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

pub fn to_toml(scenario: &Scenario) -> String {
    toml::to_string(scenario).expect("scenario serializes")
}

/// First 16 hex digits of the SHA-256 of the scenario's canonical JSON form.
/// Independent of file layout and comments.
pub fn scenario_hash(scenario: &Scenario) -> String {
    let canonical = serde_json::to_vec(scenario).expect("scenario serializes");
    Sha256::digest(&canonical)
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}
