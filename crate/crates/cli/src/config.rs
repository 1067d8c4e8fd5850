//! Optional JSON config file mirroring the subcommand flags.
//!
//! The file is a flat object keyed by the long flag names of the invoked
//! subcommand, e.g. `{"kind": "sub", "xbar": 0.05, "gamma": 1.1}`.
//! Values given on the command line take precedence.

use crate::CliError;
use serde_json::Value;
use std::path::Path;

#[derive(Debug, Default)]
pub struct Config(Option<Value>);

pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
    let Some(path) = path else {
        return Ok(Config(None));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    if !value.is_object() {
        return Err(CliError::Usage(format!(
            "config {} must be a JSON object of flag values",
            path.display()
        )));
    }
    Ok(Config(Some(value)))
}

impl Config {
    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.0.as_ref().and_then(|v| v.get(key)) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| CliError::Usage(format!("config key '{key}' must be a number"))),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.0.as_ref().and_then(|v| v.get(key)) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| CliError::Usage(format!("config key '{key}' must be an integer"))),
        }
    }

    pub fn string(&self, key: &str) -> Result<Option<String>, CliError> {
        match self.0.as_ref().and_then(|v| v.get(key)) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(|s| Some(s.to_owned()))
                .ok_or_else(|| CliError::Usage(format!("config key '{key}' must be a string"))),
        }
    }
}

/// Flag value if given, else config value, else the built-in default.
pub fn resolve<T>(flag: Option<T>, config: Result<Option<T>, CliError>, default: T) -> Result<T, CliError> {
    Ok(flag.or(config?).unwrap_or(default))
}

/// Flag value if given, else config value, else a usage error.
pub fn require<T>(
    flag: Option<T>,
    config: Result<Option<T>, CliError>,
    name: &str,
) -> Result<T, CliError> {
    flag.or(config?)
        .ok_or_else(|| CliError::Usage(format!("missing required value --{name}")))
}
