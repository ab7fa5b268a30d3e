use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Resolved parameters of one invocation, recorded for provenance.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub params: BTreeMap<String, Value>,
}

/// Looks up parameters, preferring command-line flags over the config
/// file's `[command]` table over its top-level keys.
pub struct Resolver {
    file: BTreeMap<String, Value>,
    pub run: RunConfig,
}

fn to_json(v: toml::Value) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

impl Resolver {
    pub fn new(command: &str, config: Option<&Path>) -> Result<Self, CliError> {
        let mut file = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            let table: toml::Table = text
                .parse()
                .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
            let mut section = None;
            for (k, v) in table {
                match v {
                    toml::Value::Table(t) if k == command => section = Some(t),
                    toml::Value::Table(_) => {}
                    other => {
                        file.insert(k, to_json(other));
                    }
                }
            }
            for (k, v) in section.into_iter().flatten() {
                file.insert(k, to_json(v));
            }
        }
        Ok(Resolver {
            file,
            run: RunConfig {
                command: command.to_string(),
                params: BTreeMap::new(),
            },
        })
    }

    pub fn get<T: DeserializeOwned + Serialize>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>, CliError> {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(raw) => Some(serde_json::from_value(raw.clone()).map_err(|e| {
                    CliError::Usage(format!("config key `{key}`: {e}"))
                })?),
                None => None,
            },
        };
        if let Some(v) = &value {
            let recorded = serde_json::to_value(v).unwrap_or(Value::Null);
            self.run.params.insert(key.to_string(), recorded);
        }
        Ok(value)
    }

    pub fn or<T: DeserializeOwned + Serialize>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError> {
        match self.get(key, flag)? {
            Some(v) => Ok(v),
            None => {
                let recorded = serde_json::to_value(&default).unwrap_or(Value::Null);
                self.run.params.insert(key.to_string(), recorded);
                Ok(default)
            }
        }
    }

    pub fn require<T: DeserializeOwned + Serialize>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<T, CliError> {
        self.get(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing required parameter --{key}")))
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(&self.run).unwrap_or(Value::Null)
    }
}
