//! Flat `key = value` run configuration. Command-line flags take precedence
//! over file entries.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Malformed configuration or flag value; exits with status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Every parameter of one run after merging the config file with flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse_file(text: &str, allowed: &[&str]) -> Result<BTreeMap<String, String>, ConfigError> {
        let mut out = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("config line {}: expected key = value", k + 1)))?;
            let key = key.trim().to_string();
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError(format!("config line {}: unknown key {key:?}", k + 1)));
            }
            out.insert(key, value.trim().to_string());
        }
        Ok(out)
    }

    /// Merges file entries and flags for `command`.
    pub fn resolve(
        command: &str,
        file: Option<&Path>,
        allowed: &[&str],
        flags: Vec<(&str, Option<String>)>,
    ) -> Result<Self, ConfigError> {
        let mut values = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
                Self::parse_file(&text, allowed)?
            }
            None => BTreeMap::new(),
        };
        for (key, v) in flags {
            if let Some(v) = v {
                values.insert(key.to_string(), v);
            }
        }
        Ok(RunConfig { command: command.to_string(), values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| ConfigError(format!("invalid value {v:?} for {key}: {e}"))))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim().parse::<T>().map_err(|e| ConfigError(format!("invalid entry {x:?} in {key}: {e}")))
                    })
                    .collect()
            })
            .transpose()
    }

    /// The merged values in config-file syntax.
    pub fn to_file_text(&self) -> String {
        let mut out = format!("# qlink {}\n", self.command);
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.get(key).is_some_and(|v| v != "false")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_entries_and_comments() {
        let m = RunConfig::parse_file("# run\nj = 0.5\nsteps=1, 2 # trailing\n\n", &["j", "steps"]).unwrap();
        assert_eq!(m["j"], "0.5");
        assert_eq!(m["steps"], "1, 2");
        assert!(RunConfig::parse_file("bogus = 1", &["j"]).is_err());
        assert!(RunConfig::parse_file("j 1", &["j"]).is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("qlink-config-{}", std::process::id()));
        std::fs::write(&dir, "j = 0.5\nphi = 0.1,0.2\n").unwrap();
        let rc =
            RunConfig::resolve("x", Some(&dir), &["j", "phi"], vec![("j", Some("2".into())), ("phi", None)]).unwrap();
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(rc.get::<f64>("j").unwrap(), Some(2.0));
        assert_eq!(rc.list::<f64>("phi").unwrap(), Some(vec![0.1, 0.2]));
        assert!(rc.get::<usize>("phi").is_err());
    }
}
