//! Flat JSON configuration files merged with command-line overrides.
//!
//! A config file is a single JSON object whose values are scalars or arrays
//! of scalars. Flags given on the command line replace keys from the file.
//! The merged object is deserialized into a command's typed config, which
//! rejects unknown keys, and the typed value is serialized back as the
//! resolved config embedded in every output.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// Version of every file format written by this crate.
pub const FORMAT_VERSION: u32 = 1;

fn check_flat(map: &Map<String, Value>) -> Result<()> {
    for (k, v) in map {
        let ok = match v {
            Value::Object(_) => false,
            Value::Array(items) => items.iter().all(|x| !matches!(x, Value::Object(_) | Value::Array(_))),
            _ => true,
        };
        if !ok {
            return Err(CliError::Config(format!("key `{k}`: nested values are not allowed")));
        }
    }
    Ok(())
}

pub fn parse_flat(text: &str) -> Result<Map<String, Value>> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
    match v {
        Value::Object(m) => {
            check_flat(&m)?;
            Ok(m)
        }
        _ => Err(CliError::Config("config must be a JSON object".into())),
    }
}

pub fn load_flat(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_flat(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Merges `flags` over the file at `path` (if any) and deserializes the
/// result. Returns the typed config and its resolved JSON form.
pub fn resolve<T, F>(path: Option<&Path>, flags: &F) -> Result<(T, Value)>
where
    T: DeserializeOwned + Serialize,
    F: Serialize,
{
    let mut merged = match path {
        Some(p) => load_flat(p)?,
        None => Map::new(),
    };
    let flags = serde_json::to_value(flags).map_err(|e| CliError::Config(e.to_string()))?;
    if let Value::Object(m) = flags {
        for (k, v) in m {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    check_flat(&merged)?;
    let typed: T = serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(e.to_string()))?;
    let resolved = serde_json::to_value(&typed).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((typed, resolved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    #[serde(deny_unknown_fields)]
    struct Demo {
        eps: Vec<f64>,
        #[serde(default)]
        a: Option<f64>,
        seed: u64,
    }

    #[derive(Serialize)]
    struct Flags {
        eps: Option<Vec<f64>>,
        seed: Option<u64>,
    }

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"eps": [0.4, 0.2], "a": 1.0, "seed": 3}"#).unwrap();
        let flags = Flags {
            eps: Some(vec![0.1]),
            seed: None,
        };
        let (d, resolved): (Demo, Value) = resolve(Some(&p), &flags).unwrap();
        assert_eq!(
            d,
            Demo {
                eps: vec![0.1],
                a: Some(1.0),
                seed: 3
            }
        );
        assert_eq!(resolved["seed"], 3);
    }

    #[test]
    fn missing_seed_and_unknown_keys_are_config_errors() {
        let flags = Flags {
            eps: Some(vec![0.1]),
            seed: None,
        };
        let e = resolve::<Demo, _>(None, &flags).unwrap_err();
        assert!(matches!(e, CliError::Config(ref m) if m.contains("seed")), "{e}");
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"eps": [0.4], "seed": 1, "bogus": true}"#).unwrap();
        assert!(matches!(resolve::<Demo, _>(Some(&p), &flags), Err(CliError::Config(_))));
    }

    #[test]
    fn nesting_is_rejected() {
        assert!(parse_flat(r#"{"a": {"b": 1}}"#).is_err());
        assert!(parse_flat(r#"{"a": [[1]]}"#).is_err());
        assert!(parse_flat(r#"[1, 2]"#).is_err());
        assert!(parse_flat(r#"{"a": [1, 2], "b": "x"}"#).is_ok());
    }
}
