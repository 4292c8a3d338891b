//! Plain `key=value` configuration files. Flags always override file values.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

const KNOWN_KEYS: &[&str] = &[
    "protocol",
    "n",
    "xi",
    "threshold",
    "t-max",
    "t-step",
    "n-list",
    "xi-list",
    "vs",
    "n-max",
    "times",
    "seed",
    "jobs",
    "out",
    "senders",
    "receivers",
];

/// Parsed config file: a flat string map shared by all subcommands.
#[derive(Debug, Default, Clone)]
pub struct ConfigMap {
    values: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", lineno + 1))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(format!("line {}: unknown key '{key}'", lineno + 1));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(ConfigMap { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Flag value if given, else config-file value (parsed), else the default.
pub fn resolve<T, F>(
    flag: Option<T>,
    cfg: &ConfigMap,
    key: &str,
    parse: F,
    default: Option<T>,
) -> Result<T, CliError>
where
    F: FnOnce(&str) -> Result<T, String>,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(raw) = cfg.get(key) {
        return parse(raw).map_err(|e| CliError::usage(format!("config key '{key}': {e}")));
    }
    default.ok_or_else(|| CliError::usage(format!("missing required option --{key}")))
}

/// Like [`resolve`] for options whose flag arrives as a raw string needing
/// the same parse as the config value (comma lists).
pub fn resolve_str<T, F>(
    flag: Option<&str>,
    cfg: &ConfigMap,
    key: &str,
    parse: F,
    default: Option<T>,
) -> Result<T, CliError>
where
    F: Fn(&str) -> Result<T, String>,
{
    if let Some(raw) = flag {
        return parse(raw).map_err(|e| CliError::usage(format!("--{key}: {e}")));
    }
    if let Some(raw) = cfg.get(key) {
        return parse(raw).map_err(|e| CliError::usage(format!("config key '{key}': {e}")));
    }
    default.ok_or_else(|| CliError::usage(format!("missing required option --{key}")))
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|e| e.to_string())
}

pub fn parse_usize(s: &str) -> Result<usize, String> {
    s.parse::<usize>().map_err(|e| e.to_string())
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    s.parse::<u64>().map_err(|e| e.to_string())
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect()
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let cfg =
            ConfigMap::parse("# header\nprotocol = weak-block-2q\nn=24 # inline\n\nxi=0.001\n")
                .unwrap();
        assert_eq!(cfg.get("protocol"), Some("weak-block-2q"));
        assert_eq!(cfg.get("n"), Some("24"));
        assert_eq!(cfg.get("xi"), Some("0.001"));
        assert_eq!(cfg.get("threshold"), None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(ConfigMap::parse("bogus=1").is_err());
        assert!(ConfigMap::parse("just a line").is_err());
    }

    #[test]
    fn resolve_precedence() {
        let cfg = ConfigMap::parse("n=24").unwrap();
        let v = resolve(Some(12usize), &cfg, "n", parse_usize, None).unwrap();
        assert_eq!(v, 12);
        let v = resolve(None, &cfg, "n", parse_usize, Some(6)).unwrap();
        assert_eq!(v, 24);
        let v = resolve(None, &cfg, "threshold", parse_f64, Some(0.97)).unwrap();
        assert!((v - 0.97).abs() < 1e-15);
        assert!(resolve::<usize, _>(None, &cfg, "times", parse_usize, None).is_err());
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_usize_list("12, 18,24").unwrap(), vec![12, 18, 24]);
        assert_eq!(parse_f64_list("0.01,0.005").unwrap(), vec![0.01, 0.005]);
        assert!(parse_usize_list("a,b").is_err());
        assert!(parse_f64_list("").unwrap().is_empty());
    }
}
