//! Flat key-value run configuration, merged from an optional file and flags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum)]
pub enum CommandName {
    Simulate,
    TransformCheck,
    Hamiltonian,
    Branches,
    Spectrum,
    Perturb,
    Compare,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Simulate => "simulate",
            CommandName::TransformCheck => "transform-check",
            CommandName::Hamiltonian => "hamiltonian",
            CommandName::Branches => "branches",
            CommandName::Spectrum => "spectrum",
            CommandName::Perturb => "perturb",
            CommandName::Compare => "compare",
        }
    }
}

impl fmt::Display for CommandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every key any command understands.
pub const KNOWN_KEYS: &[&str] = &[
    "k",
    "lambda",
    "s",
    "m",
    "delta",
    "branch",
    "n",
    "order",
    "grid.n_points",
    "grid.r_max",
    "basis.size",
    "tol",
    "t_end",
    "x0",
    "v0",
    "p",
    "count",
    "method",
    "model",
    "no_linear_term",
    "out",
    "format",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: CommandName,
    pub params: BTreeMap<String, String>,
}

impl RunConfig {
    /// Builds a config, rejecting unknown keys. Later pairs override earlier ones.
    pub fn new<I>(command: CommandName, pairs: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut params = BTreeMap::new();
        for (key, value) in pairs {
            let key = canonical_key(&key);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("unknown key `{key}`")));
            }
            params.insert(key, value.trim().to_string());
        }
        Ok(Self { command, params })
    }

    pub fn reader(&self) -> ParamReader {
        ParamReader {
            command: self.command,
            map: self.params.clone(),
            used: BTreeSet::new(),
            echo: BTreeMap::new(),
        }
    }
}

/// `t-end` and `t_end` name the same key, as do `grid-n-points` and `grid.n_points`.
pub fn canonical_key(key: &str) -> String {
    let key = key.trim().replace('-', "_");
    match key.as_str() {
        "grid_n_points" => "grid.n_points".into(),
        "grid_r_max" => "grid.r_max".into(),
        "basis_size" => "basis.size".into(),
        _ => key,
    }
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "config line {}: expected key=value, got `{line}`",
                lineno + 1
            )));
        };
        out.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Typed access to a config. Every key read is recorded with its resolved
/// value; [`ParamReader::finish`] rejects keys the command never read.
#[derive(Debug)]
pub struct ParamReader {
    command: CommandName,
    map: BTreeMap<String, String>,
    used: BTreeSet<String>,
    echo: BTreeMap<String, String>,
}

impl ParamReader {
    fn raw(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.map.get(key).cloned()
    }

    fn parse<T: FromStr>(&self, key: &str, value: &str) -> Result<T, CliError> {
        value
            .parse()
            .map_err(|_| CliError::Config(format!("cannot parse `{value}` for key `{key}`")))
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = match self.raw(key) {
            Some(s) => self.parse::<f64>(key, &s)?,
            None => default,
        };
        if !v.is_finite() {
            return Err(CliError::Config(format!("key `{key}` must be finite")));
        }
        self.echo.insert(key.into(), format!("{v:?}"));
        Ok(v)
    }

    /// Optional real; `auto` or absence gives `None`.
    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        let v = match self.raw(key) {
            Some(s) if s != "auto" => Some(self.parse::<f64>(key, &s)?),
            _ => None,
        };
        self.echo
            .insert(key.into(), v.map_or("auto".into(), |x| format!("{x:?}")));
        Ok(v)
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        let v = match self.raw(key) {
            Some(s) => self.parse::<usize>(key, &s)?,
            None => default,
        };
        self.echo.insert(key.into(), v.to_string());
        Ok(v)
    }

    pub fn flag(&mut self, key: &str) -> Result<bool, CliError> {
        let v = match self.raw(key).as_deref() {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") | Some("") => true,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "key `{key}` expects true or false, got `{other}`"
                )))
            }
        };
        self.echo.insert(key.into(), v.to_string());
        Ok(v)
    }

    pub fn choice(
        &mut self,
        key: &str,
        default: &str,
        allowed: &[&str],
    ) -> Result<String, CliError> {
        let v = self
            .raw(key)
            .unwrap_or_else(|| default.to_string())
            .to_lowercase();
        if !allowed.contains(&v.as_str()) {
            return Err(CliError::Config(format!(
                "key `{key}` must be one of {}, got `{v}`",
                allowed.join(", ")
            )));
        }
        self.echo.insert(key.into(), v.clone());
        Ok(v)
    }

    /// Output path; read but not echoed, so reruns to different files stay identical.
    pub fn out(&mut self) -> Option<String> {
        self.raw("out")
    }

    /// Resolved values, after checking that every supplied key was used.
    pub fn finish(self) -> Result<BTreeMap<String, String>, CliError> {
        if let Some(key) = self.map.keys().find(|k| !self.used.contains(*k)) {
            return Err(CliError::Config(format!(
                "key `{key}` does not apply to `{}` with these settings",
                self.command
            )));
        }
        Ok(self.echo)
    }
}
