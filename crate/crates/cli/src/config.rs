//! Merging of flags with the optional JSON config file, and validation.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Configuration problem, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError {
    pub field: String,
    pub message: String,
}

impl UsageError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SeedValue {
    Number(u64),
    Text(String),
}

/// Contents of a `--config` file. Keys mirror the long flag names with
/// dashes replaced by underscores.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<SeedValue>,
    pub no_metadata: Option<bool>,
    pub samples: Option<usize>,
    pub lenient: Option<bool>,
    pub potential: Option<String>,
    pub grid: Option<usize>,
    #[serde(rename = "box")]
    pub box_len: Option<f64>,
    pub scheme: Option<String>,
    pub probes: Option<usize>,
    pub band: Option<usize>,
    pub probe_mode: Option<String>,
    pub tolerance: Option<f64>,
    pub identity: Option<String>,
    #[serde(alias = "superpotential_U")]
    pub superpotential_u: Option<String>,
    pub k: Option<usize>,
    pub method: Option<String>,
    pub zero_modes: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError::new("config", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| UsageError::new("config", format!("{}: {e}", path.display())))
    }
}

/// Resolved parameters, echoed in every report. Output location and format
/// are left out so they do not affect report contents.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lenient: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub superpotential_u: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_len: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_modes: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub fn parse_format(s: &str) -> Result<Format, UsageError> {
    match s.to_ascii_lowercase().as_str() {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        "text" => Ok(Format::Text),
        _ => Err(UsageError::new("format", format!("`{s}` is not one of json, csv, text"))),
    }
}

pub fn parse_seed(s: &str) -> Result<u64, UsageError> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| UsageError::new("seed", format!("`{s}` is not a decimal or 0x-hex integer")))
}

pub fn seed_from_file(v: &SeedValue) -> Result<u64, UsageError> {
    match v {
        SeedValue::Number(n) => Ok(*n),
        SeedValue::Text(s) => parse_seed(s),
    }
}

/// Parses a core enum through its serde names.
pub fn parse_enum<T: DeserializeOwned>(field: &str, s: &str, allowed: &str) -> Result<T, UsageError> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| UsageError::new(field, format!("`{s}` is not one of {allowed}")))
}

pub fn positive(field: &str, v: f64) -> Result<f64, UsageError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(UsageError::new(field, format!("{v} must be a positive finite number")))
    }
}

pub fn at_least(field: &str, v: usize, min: usize) -> Result<usize, UsageError> {
    if v >= min {
        Ok(v)
    } else {
        Err(UsageError::new(field, format!("{v} is below the minimum {min}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("0xD5EED").unwrap(), 0xD5EED);
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert_eq!(parse_seed("x").unwrap_err().field, "seed");
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"gird": 3}"#).is_err());
        let c: FileConfig = serde_json::from_str(r#"{"grid": 8, "box": 6.0, "seed": "0x10"}"#).unwrap();
        assert_eq!((c.grid, c.box_len), (Some(8), Some(6.0)));
        assert_eq!(seed_from_file(c.seed.as_ref().unwrap()).unwrap(), 16);
    }
}
