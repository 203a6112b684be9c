//! Flat `key = value` config files merged with command-line flags.
//! A flag always wins over the file; the file wins over the default.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: Vec<(String, String)>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut file = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                anyhow!(
                    "config line {}: expected `key = value`, got {raw:?}",
                    no + 1
                )
            })?;
            let key = key.trim();
            if key.is_empty() {
                bail!("config line {}: empty key", no + 1);
            }
            if file
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                bail!("config key `{key}` given twice");
            }
        }
        Ok(Self {
            file,
            ..Self::default()
        })
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                Self::parse(&text)
            }
        }
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.file.get(key).cloned()
    }

    fn record(&mut self, key: &str, value: String) {
        self.resolved.push((key.to_string(), value));
    }

    fn parse_value<T: FromStr>(key: &str, text: &str) -> Result<T> {
        text.parse()
            .map_err(|_| anyhow!("invalid value {text:?} for config key `{key}`"))
    }

    pub fn get<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T> {
        let value = match (flag, self.raw(key)) {
            (Some(v), _) => v,
            (None, Some(text)) => Self::parse_value(key, &text)?,
            (None, None) => default,
        };
        self.record(key, value.to_string());
        Ok(value)
    }

    pub fn get_opt<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>> {
        let value = match (flag, self.raw(key)) {
            (Some(v), _) => Some(v),
            (None, Some(text)) => Some(Self::parse_value(key, &text)?),
            (None, None) => None,
        };
        if let Some(v) = &value {
            self.record(key, v.to_string());
        }
        Ok(value)
    }

    /// Comma-separated list; `flag` is the unparsed flag text.
    pub fn get_list<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<String>,
        default: Vec<T>,
    ) -> Result<Vec<T>> {
        let text = flag.or_else(|| self.raw(key));
        let values = match text {
            None => default,
            Some(text) => text
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| Self::parse_value(key, s))
                .collect::<Result<Vec<T>>>()?,
        };
        let shown: Vec<String> = values.iter().map(ToString::to_string).collect();
        self.record(key, shown.join(","));
        Ok(values)
    }

    /// Reject keys in the file that the command never asked for.
    pub fn finish(&self) -> Result<()> {
        if let Some(key) = self.file.keys().find(|k| !self.used.contains(*k)) {
            bail!("unknown config key `{key}`");
        }
        Ok(())
    }

    /// Comment lines recording the tool version, the command and every
    /// resolved setting.
    pub fn header(&self, command: &str) -> String {
        let mut out = format!("# honeycomb {} {command}\n", env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.resolved {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.resolved
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect(),
        )
    }
}
