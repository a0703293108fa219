//! `key = value` settings files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

/// Environment variable naming a config file used when `--config` is absent.
pub const CONFIG_ENV: &str = "OME_RDF_CONFIG";

/// Keys a config file may set. Each mirrors the long flag of the same name.
pub const KEYS: &[&str] = &[
    "format",
    "instance-base",
    "namespace",
    "offline",
    "parallelism",
    "registry",
    "report-format",
    "shard-size",
    "skip-errors",
    "timeout-secs",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    source: Option<PathBuf>,
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str, source: Option<&Path>) -> Result<Config, CliError> {
        let origin = source.map_or_else(|| "config".to_string(), |p| p.display().to_string());
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("{origin}:{}: expected key = value", n + 1)));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::Usage(format!(
                    "{origin}:{}: unknown key {key:?} (known: {})",
                    n + 1,
                    KEYS.join(", ")
                )));
            }
            if values.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!("{origin}:{}: {key:?} set twice", n + 1)));
            }
        }
        Ok(Config {
            source: source.map(Path::to_path_buf),
            values,
        })
    }

    /// Reads `explicit`, else the file named by [`CONFIG_ENV`], else nothing.
    pub fn load(explicit: Option<&Path>) -> Result<Config, CliError> {
        let path = match explicit {
            Some(p) => p.to_path_buf(),
            None => match std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()) {
                Some(p) => PathBuf::from(p),
                None => return Ok(Config::default()),
            },
        };
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        Config::parse(&text, Some(&path))
    }

    /// The flag value if given, otherwise the parsed config value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        let Some(raw) = self.values.get(key) else {
            return Ok(None);
        };
        raw.parse().map(Some).map_err(|e| {
            let origin = self.source.as_deref().map_or_else(|| "config".into(), |p| p.display().to_string());
            CliError::Usage(format!("{origin}: bad value {raw:?} for {key}: {e}"))
        })
    }

    /// A switch is on when the flag is present or the config says `true`.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        Ok(self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}
