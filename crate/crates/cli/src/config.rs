//! Merging of flags with an optional TOML config file.
//!
//! A config file holds flag values under their snake_case names. Top-level
//! keys apply to every subcommand that knows them; a `[solve]`, `[train]`,
//! ... table overrides them for that subcommand. Flags given on the command
//! line override both.

use std::path::Path;

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

const SUBCOMMANDS: [&str; 5] = ["generate", "train", "solve", "eval", "bench"];

fn file_values(path: &Path, subcommand: &str) -> anyhow::Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let table: toml::Table = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    let Value::Object(root) = serde_json::to_value(table)? else {
        bail!("config root must be a table");
    };
    let mut merged = Map::new();
    let mut section = None;
    for (key, value) in root {
        if SUBCOMMANDS.contains(&key.as_str()) {
            if key == subcommand {
                let Value::Object(table) = value else {
                    bail!("config section [{key}] must be a table");
                };
                section = Some(table);
            }
        } else {
            merged.insert(key, value);
        }
    }
    merged.extend(section.unwrap_or_default());
    Ok(merged)
}

/// Resolves the final settings: command-line values first, then the config
/// file, then the defaults of `T`. Config keys that `T` does not know are
/// ignored so one file can serve several subcommands.
pub fn resolve<A: Serialize, T: DeserializeOwned>(
    args: &A,
    config: Option<&Path>,
    subcommand: &str,
) -> anyhow::Result<T> {
    let Value::Object(flags) = serde_json::to_value(args)? else {
        bail!("flags must serialize to a map");
    };
    let mut values = match config {
        Some(path) => file_values(path, subcommand)?,
        None => Map::new(),
    };
    let known: Vec<String> = flags.keys().cloned().collect();
    values.retain(|k, _| known.contains(k));
    for (key, value) in flags {
        if !value.is_null() {
            values.insert(key, value);
        }
    }
    serde_json::from_value(Value::Object(values)).map_err(|e| anyhow::anyhow!("{e}"))
}
