//! Service configuration: a TOML file, then `GRAPHVIEW_*` environment
//! overrides.

use std::path::{Path, PathBuf};

use graphview_core::EdgeMode;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid value for {var}: {value}")]
    Env { var: &'static str, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bind: String,
    pub undirected_mode: bool,
    /// Entry L_C for sessions that do not name their own.
    pub entry_l_c: Vec<String>,
    /// Entry L_B for sessions that do not name their own.
    pub entry_l_b: Vec<String>,
    /// Graphs and session histories are persisted here when set.
    pub data_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            bind: "127.0.0.1:8080".into(),
            undirected_mode: true,
            entry_l_c: Vec::new(),
            entry_l_b: Vec::new(),
            data_dir: None,
        }
    }
}

fn split_labels(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Reads `path` if given, then applies process environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read {
                    path: p.to_path_buf(),
                    source,
                })?;
                Self::from_toml(&text)?
            }
            None => Config::default(),
        };
        config.apply_env(|k| std::env::var(k).ok())?;
        Ok(config)
    }

    pub fn apply_env(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(v) = var("GRAPHVIEW_BIND") {
            self.bind = v;
        }
        if let Some(v) = var("GRAPHVIEW_UNDIRECTED_MODE") {
            self.undirected_mode = match v.to_ascii_lowercase().as_str() {
                "1" | "true" | "yes" => true,
                "0" | "false" | "no" => false,
                _ => {
                    return Err(ConfigError::Env {
                        var: "GRAPHVIEW_UNDIRECTED_MODE",
                        value: v,
                    })
                }
            };
        }
        if let Some(v) = var("GRAPHVIEW_ENTRY_LC") {
            self.entry_l_c = split_labels(&v);
        }
        if let Some(v) = var("GRAPHVIEW_ENTRY_LB") {
            self.entry_l_b = split_labels(&v);
        }
        if let Some(v) = var("GRAPHVIEW_DATA_DIR") {
            self.data_dir = (!v.is_empty()).then(|| PathBuf::from(v));
        }
        Ok(())
    }

    pub fn mode(&self) -> EdgeMode {
        if self.undirected_mode {
            EdgeMode::Undirected
        } else {
            EdgeMode::Directed
        }
    }
}
