//! Flat `key = value` run configuration.
//!
//! Sources are merged in order: preset, `--config` file, inline arguments.
//! Every key must be consumed by the command; leftovers are usage errors.

use std::collections::BTreeMap;
use std::path::Path;

use fwlab::diagnostics::Thresholds;
use fwlab::{Domain, Profile};

use crate::error::CliError;
use crate::presets;

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    raw: BTreeMap<String, String>,
    /// Every key that was read, with the value actually used.
    resolved: BTreeMap<String, String>,
}

/// Parses `key = value` lines. `#` starts a comment; `[section]` headers are
/// ignored.
pub fn parse_text(text: &str, origin: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let (k, v) = parse_pair(line)
            .ok_or_else(|| CliError::Usage(format!("{origin}:{}: expected key=value, got `{line}`", lineno + 1)))?;
        out.insert(k, v);
    }
    Ok(out)
}

fn parse_pair(s: &str) -> Option<(String, String)> {
    let (k, v) = s.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return None;
    }
    Some((k.to_string(), v.to_string()))
}

impl RunConfig {
    pub fn load(command: &str, preset: Option<&str>, file: Option<&Path>, inline: &[String]) -> Result<Self, CliError> {
        let mut raw = BTreeMap::new();
        if let Some(name) = preset {
            let text = presets::get(name).ok_or_else(|| {
                CliError::Usage(format!("unknown preset `{name}`; available: {}", presets::names().join(", ")))
            })?;
            raw.extend(parse_text(text, &format!("preset {name}"))?);
        }
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            raw.extend(parse_text(&text, &path.display().to_string())?);
        }
        for arg in inline {
            let (k, v) = parse_pair(arg).ok_or_else(|| CliError::Usage(format!("expected key=value, got `{arg}`")))?;
            raw.insert(k, v);
        }
        let mut cfg = Self { raw, resolved: BTreeMap::new() };
        if let Some(c) = cfg.opt_str("command") {
            if c != command {
                return Err(CliError::Usage(format!("configuration is for `{c}`, not `{command}`")));
            }
        }
        Ok(cfg)
    }

    #[cfg(test)]
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        Self { raw: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(), resolved: BTreeMap::new() }
    }

    fn note(&mut self, key: &str, value: String) {
        self.resolved.insert(key.to_string(), value);
    }

    pub fn opt_str(&mut self, key: &str) -> Option<String> {
        let v = self.raw.get(key).cloned()?;
        self.note(key, v.clone());
        Some(v)
    }

    pub fn str(&mut self, key: &str, default: &str) -> String {
        let v = self.raw.get(key).cloned().unwrap_or_else(|| default.to_string());
        self.note(key, v.clone());
        v
    }

    pub fn required_str(&mut self, key: &str) -> Result<String, CliError> {
        self.opt_str(key).ok_or_else(|| CliError::Usage(format!("missing required key `{key}`")))
    }

    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.raw.get(key).cloned() {
            None => Ok(None),
            Some(s) => {
                let v: f64 = s.parse().map_err(|_| bad(key, &s, "a number"))?;
                if !v.is_finite() {
                    return Err(bad(key, &s, "a finite number"));
                }
                self.note(key, format_f64(v));
                Ok(Some(v))
            }
        }
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.opt_f64(key)?.unwrap_or(default);
        self.note(key, format_f64(v));
        Ok(v)
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        let v = match self.raw.get(key).cloned() {
            None => default,
            Some(s) => s.parse().map_err(|_| bad(key, &s, "a non-negative integer"))?,
        };
        self.note(key, v.to_string());
        Ok(v)
    }

    pub fn bool(&mut self, key: &str, default: bool) -> Result<bool, CliError> {
        let v = match self.raw.get(key).map(|s| s.to_ascii_lowercase()) {
            None => default,
            Some(s) => match s.as_str() {
                "true" | "yes" | "on" | "1" => true,
                "false" | "no" | "off" | "0" => false,
                _ => return Err(bad(key, &s, "a boolean")),
            },
        };
        self.note(key, v.to_string());
        Ok(v)
    }

    pub fn f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let v = match self.raw.get(key).cloned() {
            None => default.to_vec(),
            Some(s) => s
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|_| bad(key, &s, "a comma-separated list of numbers")))
                .collect::<Result<Vec<_>, _>>()?,
        };
        self.note(key, v.iter().map(|x| format_f64(*x)).collect::<Vec<_>>().join(","));
        Ok(v)
    }

    pub fn usize_list(&mut self, key: &str, default: &[usize]) -> Result<Vec<usize>, CliError> {
        let v = match self.raw.get(key).cloned() {
            None => default.to_vec(),
            Some(s) => s
                .split(',')
                .map(|p| p.trim().parse::<usize>().map_err(|_| bad(key, &s, "a comma-separated list of integers")))
                .collect::<Result<Vec<_>, _>>()?,
        };
        self.note(key, v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        Ok(v)
    }

    /// Reads `name` from a fixed set of choices.
    pub fn choice<'a>(&mut self, key: &str, default: &'a str, choices: &[&'a str]) -> Result<String, CliError> {
        let v = self.str(key, default).to_ascii_lowercase().replace('-', "_");
        if !choices.contains(&v.as_str()) {
            return Err(CliError::Usage(format!("{key} must be one of {}, got `{v}`", choices.join(", "))));
        }
        Ok(v)
    }

    /// The profile named by `profile`, with its parameters read from keys of
    /// the same name.
    pub fn profile(&mut self, default: Option<&str>) -> Result<Profile, CliError> {
        let name = match default {
            Some(d) => self.str("profile", d),
            None => self.required_str("profile")?,
        };
        let defaults = Profile::from_name(&name, &BTreeMap::new())?;
        let mut params = BTreeMap::new();
        for (key, default) in defaults.params() {
            params.insert(key.to_string(), self.f64(key, default)?);
        }
        Ok(Profile::from_name(&name, &params)?)
    }

    /// `domain = torus | line` with window `xmin`, `xmax`.
    pub fn domain(&mut self, default_torus: bool) -> Result<Domain, CliError> {
        let which = self.choice("domain", if default_torus { "torus" } else { "line" }, &["torus", "line"])?;
        if which == "torus" {
            return Ok(Domain::Torus);
        }
        let a = self.f64("xmin", -20.0)?;
        let b = self.f64("xmax", 20.0)?;
        Ok(Domain::line(a, b)?)
    }

    /// Default thresholds overridden by any `tol.<field>` keys.
    pub fn thresholds(&mut self) -> Result<Thresholds, CliError> {
        let mut value = serde_json::to_value(Thresholds::default()).expect("thresholds serialize");
        let fields: Vec<String> = value.as_object().unwrap().keys().cloned().collect();
        for key in self.raw.keys().filter(|k| k.starts_with("tol.")).cloned().collect::<Vec<_>>() {
            let field = &key[4..];
            if !fields.iter().any(|f| f == field) {
                return Err(CliError::Usage(format!("unknown tolerance `{key}`")));
            }
            let v = self.f64(&key, 0.0)?;
            value[field] = serde_json::json!(v);
        }
        Ok(serde_json::from_value(value).expect("thresholds deserialize"))
    }

    /// Fails on keys nobody read.
    pub fn finish(&self) -> Result<(), CliError> {
        let unused: Vec<&str> =
            self.raw.keys().filter(|k| !self.resolved.contains_key(*k)).map(String::as_str).collect();
        if unused.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!("unrecognised keys: {}", unused.join(", "))))
        }
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

fn bad(key: &str, value: &str, what: &str) -> CliError {
    CliError::Usage(format!("{key} must be {what}, got `{value}`"))
}

/// Shortest round-tripping decimal form.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_sections() {
        let m = parse_text("# head\n[run]\nn = 64 # cells\n\nT=1\n", "t").unwrap();
        assert_eq!(m["n"], "64");
        assert_eq!(m["T"], "1");
        assert!(parse_text("novalue\n", "t").is_err());
        assert!(parse_text("k =\n", "t").is_err());
    }

    #[test]
    fn typed_reads_and_leftovers() {
        let mut c = RunConfig::from_pairs(&[("n", "64"), ("dt", "1e-3"), ("x", "1"), ("flag", "yes")]);
        assert_eq!(c.usize("n", 1).unwrap(), 64);
        assert_eq!(c.f64("dt", 1.0).unwrap(), 1e-3);
        assert!(c.bool("flag", false).unwrap());
        assert_eq!(c.f64("T", 2.0).unwrap(), 2.0);
        assert!(c.finish().is_err());
        assert_eq!(c.resolved()["T"], "2.0");
        let mut c = RunConfig::from_pairs(&[("n", "-3"), ("dt", "nan")]);
        assert!(c.usize("n", 1).is_err());
        assert!(c.f64("dt", 1.0).is_err());
    }

    #[test]
    fn profile_keys_are_consumed() {
        let mut c = RunConfig::from_pairs(&[("profile", "gaussian_derivative"), ("beta", "3")]);
        let p = c.profile(None).unwrap();
        assert_eq!(p, Profile::GaussianDerivative { beta: 3.0 });
        c.finish().unwrap();
        let mut c = RunConfig::from_pairs(&[("profile", "peakon"), ("beta", "3")]);
        c.profile(None).unwrap();
        assert!(c.finish().is_err());
        let mut c = RunConfig::default();
        assert!(matches!(c.profile(None), Err(CliError::Usage(_))));
    }

    #[test]
    fn tolerance_overrides() {
        let mut c = RunConfig::from_pairs(&[("tol.mass_drift", "1e-9")]);
        assert_eq!(c.thresholds().unwrap().mass_drift, 1e-9);
        let mut c = RunConfig::from_pairs(&[("tol.nope", "1")]);
        assert!(c.thresholds().is_err());
    }

    #[test]
    fn lists_and_choices() {
        let mut c = RunConfig::from_pairs(&[("eps", "1e-2, 5e-3"), ("solver", "FV")]);
        assert_eq!(c.f64_list("eps", &[]).unwrap(), vec![1e-2, 5e-3]);
        assert_eq!(c.choice("solver", "strong", &["strong", "fv"]).unwrap(), "fv");
        assert!(c.choice("other", "x", &["strong"]).is_err());
    }
}
