//! Layered configuration: built-in defaults, then a TOML file, then `--set` overrides.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

use crate::exit::CliError;

/// Keys a schema accepts besides those present in its serialized defaults
/// (optional fields that serialize to nothing when unset).
pub type OptionalKeys = &'static [&'static str];

/// Parses `key=value`; the value is read as a TOML literal, falling back to a bare string.
pub fn parse_override(text: &str) -> Result<(String, Value), CliError> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override '{text}' is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::config(format!("override '{text}' has an empty key")));
    }
    let raw = raw.trim();
    let value = match toml::from_str::<Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => Value::String(raw.to_string()),
    };
    Ok((key.to_string(), value))
}

/// Merges defaults, the optional file and the parsed overrides, then deserializes
/// (unknown keys are errors). Returns the typed value and the effective table.
pub fn load<T>(
    defaults: &T,
    optional: OptionalKeys,
    file: Option<&Path>,
    overrides: &[(String, Value)],
) -> Result<(T, Table), CliError>
where
    T: Serialize + DeserializeOwned,
{
    let mut table = Table::try_from(defaults).map_err(|e| CliError::config(format!("cannot encode defaults: {e}")))?;
    let known = |key: &str, table: &Table| table.contains_key(key) || optional.contains(&key);
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config file {}: {e}", path.display())))?;
        let parsed: Table =
            toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message())))?;
        for (k, v) in parsed {
            if !known(&k, &table) {
                return Err(CliError::config(format!("unknown config key '{k}' in {}", path.display())));
            }
            table.insert(k, v);
        }
    }
    for (k, v) in overrides {
        if !known(k, &table) {
            return Err(CliError::config(format!("unknown config key '{k}' in --set")));
        }
        table.insert(k.clone(), v.clone());
    }
    let value: T = table.clone().try_into().map_err(|e: toml::de::Error| CliError::config(e.message().to_string()))?;
    let effective = Table::try_from(&value).map_err(|e| CliError::config(format!("cannot encode config: {e}")))?;
    Ok((value, effective))
}
