//! Key=value experiment configuration.
//!
//! Each subcommand declares the keys it understands together with their
//! defaults. Values come from the defaults, then the `--config` file, then
//! positional `key=value` overrides, then the dedicated `--seed`/`--output`
//! flags. Anything not declared is rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Malformed or inconsistent configuration (exit code 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Declared keys of one subcommand with their defaults.
pub type Schema = &'static [(&'static str, &'static str)];

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    command: &'static str,
    values: BTreeMap<&'static str, String>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("config line {}: expected `key = value`, got {raw:?}", idx + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_override(arg: &str) -> Result<(String, String), ConfigError> {
    let (k, v) = arg.split_once('=').ok_or_else(|| ConfigError(format!("override {arg:?} is not of the form key=value")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

impl Config {
    /// Layers `assignments` over the schema defaults, in order.
    pub fn resolve(command: &'static str, schema: Schema, assignments: impl IntoIterator<Item = (String, String)>) -> Result<Self, ConfigError> {
        let mut values: BTreeMap<&'static str, String> = schema.iter().map(|&(k, v)| (k, v.to_string())).collect();
        for (k, v) in assignments {
            let Some(&(key, _)) = schema.iter().find(|(name, _)| *name == k) else {
                let known: Vec<&str> = schema.iter().map(|(k, _)| *k).collect();
                return Err(ConfigError(format!("unknown key {k:?} for `{command}` (known: {})", known.join(", "))));
            };
            values.insert(key, v);
        }
        Ok(Self { command, values })
    }

    pub fn command(&self) -> &'static str {
        self.command
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (*k, v.as_str()))
    }

    pub fn str(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("key {key:?} missing from the `{}` schema", self.command))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        let raw = self.str(key);
        raw.parse().map_err(|e| ConfigError(format!("{key} = {raw:?}: {e}")))
    }

    /// `None` for the literal `auto`.
    pub fn get_auto<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        if self.str(key) == "auto" {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    /// Comma-separated list; empty entries are ignored.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        let items: Vec<T> = self
            .str(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e| ConfigError(format!("{key}: bad entry {s:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        if items.is_empty() {
            return Err(ConfigError(format!("{key} must list at least one value")));
        }
        Ok(items)
    }

    /// Optional path; empty means unset.
    pub fn path(&self, key: &str) -> Option<&Path> {
        let s = self.str(key);
        (!s.is_empty()).then(|| Path::new(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: Schema = &[("seed", "0"), ("n", "10"), ("eps", "0.1,0.2")];

    #[test]
    fn layering_and_types() {
        let file = parse_file("# comment\nn = 20   # trailing\n\n").unwrap();
        let cfg = Config::resolve("t", SCHEMA, file.into_iter().chain([("seed".to_string(), "7".to_string())])).unwrap();
        assert_eq!(cfg.get::<usize>("n").unwrap(), 20);
        assert_eq!(cfg.get::<u64>("seed").unwrap(), 7);
        assert_eq!(cfg.list::<f64>("eps").unwrap(), vec![0.1, 0.2]);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(Config::resolve("t", SCHEMA, [("alpha".to_string(), "1".to_string())]).is_err());
        let cfg = Config::resolve("t", SCHEMA, [("n".to_string(), "ten".to_string())]).unwrap();
        assert!(cfg.get::<usize>("n").is_err());
        assert!(parse_file("just words").is_err());
        assert!(parse_override("n10").is_err());
    }
}
