//! Parameter resolution: command-line flag, then config file, then default.

use std::collections::BTreeMap;
use std::path::Path;

use super::CliError;

/// Where a resolved value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Flag,
    Config,
    Default,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Flag => "flag",
            Source::Config => "config",
            Source::Default => "default",
        }
    }
}

/// Resolved key/value parameters for one command, kept in insertion order.
#[derive(Debug, Clone, Default)]
pub struct Params {
    entries: Vec<(&'static str, String, Source)>,
}

/// Flat `key = value` config document. Values may be strings, numbers,
/// booleans or arrays of numbers; arrays become comma lists.
pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
    let mut out = BTreeMap::new();
    for (k, v) in table {
        out.insert(k.clone(), value_to_string(&k, &v)?);
    }
    Ok(out)
}

fn value_to_string(key: &str, v: &toml::Value) -> Result<String, String> {
    use toml::Value;
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Ok(format!("{f:?}")),
        Value::Boolean(b) => Ok(b.to_string()),
        Value::Array(items) => items
            .iter()
            .map(|item| match item {
                Value::Integer(_) | Value::Float(_) => value_to_string(key, item),
                _ => Err(format!("key `{key}`: arrays may only hold numbers")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|parts| parts.join(",")),
        _ => Err(format!("key `{key}`: nested tables are not supported")),
    }
}

impl Params {
    /// Resolves every `(key, default)` pair; `flags` holds values given on
    /// the command line. Unknown config keys are rejected.
    pub fn resolve(
        defaults: &[(&'static str, &str)],
        flags: &BTreeMap<&'static str, String>,
        config: &BTreeMap<String, String>,
    ) -> Result<Self, CliError> {
        if let Some(unknown) = config.keys().find(|k| !defaults.iter().any(|(name, _)| name == k)) {
            return Err(CliError::Usage(format!("unknown config key `{unknown}`")));
        }
        let entries = defaults
            .iter()
            .map(|&(key, default)| {
                if let Some(v) = flags.get(key) {
                    (key, v.clone(), Source::Flag)
                } else if let Some(v) = config.get(key) {
                    (key, v.clone(), Source::Config)
                } else {
                    (key, default.to_string(), Source::Default)
                }
            })
            .collect();
        Ok(Params { entries })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&'static str, &str, Source)> {
        self.entries.iter().map(|(k, v, s)| (*k, v.as_str(), *s))
    }

    pub fn raw(&self, key: &str) -> &str {
        self.entries
            .iter()
            .find(|(k, _, _)| *k == key)
            .map(|(_, v, _)| v.as_str())
            .unwrap_or_else(|| panic!("parameter `{key}` not declared"))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        parse_f64(self.raw(key)).map_err(|e| CliError::Usage(format!("--{}: {e}", flag_name(key))))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        parse_count(self.raw(key)).map_err(|e| CliError::Usage(format!("--{}: {e}", flag_name(key))))
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        self.raw(key)
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--{}: expected an unsigned integer", flag_name(key))))
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        match self.raw(key).trim() {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(CliError::Usage(format!("--{}: expected true/false, got `{other}`", flag_name(key)))),
        }
    }

    pub fn grid(&self, key: &str) -> Result<Vec<f64>, CliError> {
        parse_grid(self.raw(key)).map_err(|e| CliError::Usage(format!("--{}: {e}", flag_name(key))))
    }

    /// Grid whose entries must be positive integers.
    pub fn count_grid(&self, key: &str) -> Result<Vec<usize>, CliError> {
        self.grid(key)?
            .into_iter()
            .map(|v| {
                let r = v.round();
                if (v - r).abs() > 1e-9 || r < 1.0 {
                    Err(CliError::Usage(format!("--{}: `{v}` is not a positive integer", flag_name(key))))
                } else {
                    Ok(r as usize)
                }
            })
            .collect()
    }
}

pub fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if !v.is_finite() {
        return Err(format!("`{}` is not finite", s.trim()));
    }
    Ok(v)
}

fn parse_count(s: &str) -> Result<usize, String> {
    let v = parse_f64(s)?;
    if v < 0.0 || v.fract() != 0.0 || v > usize::MAX as f64 {
        return Err(format!("`{}` is not a nonnegative integer", s.trim()));
    }
    Ok(v as usize)
}

/// Grid syntax: comma-separated segments, each a single number, a linear
/// range `start:stop:count` (inclusive) or a log range
/// `log:start:stop:count`. Example: `0,log:1e-4:0.99:200`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty grid".into());
    }
    let mut out = Vec::new();
    for segment in s.split(',') {
        out.extend(parse_segment(segment.trim())?);
    }
    Ok(out)
}

fn parse_segment(s: &str) -> Result<Vec<f64>, String> {
    let (log, body) = match s.strip_prefix("log:") {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    if !body.contains(':') {
        if log {
            return Err(format!("log range `{s}` must be log:start:stop:count"));
        }
        return Ok(vec![parse_f64(body)?]);
    }
    let parts: Vec<&str> = body.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range `{s}` must be start:stop:count"));
    }
    let start = parse_f64(parts[0])?;
    let stop = parse_f64(parts[1])?;
    let count = parse_count(parts[2])?;
    if count == 0 {
        return Err(format!("range `{s}` has zero points"));
    }
    if log {
        if start <= 0.0 || stop <= 0.0 {
            return Err(format!("log range `{s}` needs positive endpoints"));
        }
        return Ok(crate::sumrate::log_grid(start, stop, count));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
        .collect())
}
