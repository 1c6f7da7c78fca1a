//! Optional `.w6hea.toml` defaults.
//!
//! ```toml
//! [analysis]
//! threshold = 1.5
//! seed = 42
//! weights = { owner = 2.0, scope = 0.5 }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

pub const FILE_NAME: &str = ".w6hea.toml";

#[derive(Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub analysis: Analysis,
}

#[derive(Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    pub threshold: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub weights: BTreeMap<String, f64>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        Ok(toml::from_str(text)?)
    }

    /// Reads `explicit` if given, else `.w6hea.toml` in the working
    /// directory if present, else defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Config> {
        let path: PathBuf = match explicit {
            Some(p) => p.to_path_buf(),
            None => {
                let p = PathBuf::from(FILE_NAME);
                if !p.is_file() {
                    return Ok(Config::default());
                }
                p
            }
        };
        let text = fs::read_to_string(&path).with_context(|| format!("cannot read `{}`", path.display()))?;
        Config::parse(&text).with_context(|| format!("invalid config `{}`", path.display()))
    }
}
