//! Flat key-value experiment manifests with one section per subcommand.
//!
//! ```text
//! # comment
//! [simulate]
//! setting = ic
//! alpha = 1.3333
//! trials = 10000
//! ```
//!
//! Every key can be overridden by the matching command-line flag.

use std::collections::HashMap;
use std::fmt::Display;
use std::str::FromStr;

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: HashMap<(String, String), String>,
}

impl Config {
    pub fn parse(text: &str, path: &str) -> Result<Config, String> {
        let mut values = HashMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| format!("{path}:{}: unterminated section", lineno + 1))?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{path}:{}: expected `key = value`", lineno + 1))?;
            values.insert(
                (section.clone(), key.trim().to_string()),
                value.trim().to_string(),
            );
        }
        Ok(Config { values })
    }

    pub fn load(path: &str) -> Result<Config, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {path}: {e}"))?;
        Config::parse(&text, path)
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .map(|s| s.as_str())
    }

    /// Flag value if given, else config value, else the default.
    pub fn resolve<T>(
        &self,
        flag: Option<T>,
        section: &str,
        key: &str,
        default: Option<T>,
    ) -> Result<T, String>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(raw) = self.raw(section, key) {
            return raw
                .parse::<T>()
                .map_err(|e| format!("config [{section}] {key} = {raw}: {e}"));
        }
        default.ok_or_else(|| format!("missing required value [{section}] {key}"))
    }

    /// Like `resolve` but the value stays optional.
    pub fn resolve_opt<T>(
        &self,
        flag: Option<T>,
        section: &str,
        key: &str,
    ) -> Result<Option<T>, String>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(section, key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| format!("config [{section}] {key} = {raw}: {e}")),
            None => Ok(None),
        }
    }
}
