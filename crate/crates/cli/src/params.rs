//! Flat `key=value` parameters merged from a config file and command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use rectdim::{Anchor, CantorAxisSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] rectdim::Error),
    #[error("missing parameter `{0}`")]
    Missing(String),
    #[error("bad value for `{key}`: {msg}")]
    Param { key: String, msg: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Missing(_) => "missing_parameter",
            CliError::Param { .. } => "invalid_parameter",
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => "io_error",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.class() {
                rectdim::ErrorClass::Validation => 2,
                rectdim::ErrorClass::Verification => 3,
                rectdim::ErrorClass::Budget => 4,
            },
            CliError::Missing(_) | CliError::Param { .. } => 2,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn bad(key: &str, msg: impl Into<String>) -> CliError {
    CliError::Param {
        key: key.to_string(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse_config(text: &str) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad("config", format!("line {} is not key=value", i + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        Self::parse_config(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn merge(&mut self, other: Params) {
        self.0.extend(other.0);
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.0
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .filter(|s| !s.is_empty())
    }

    pub fn has(&self, key: &str) -> bool {
        self.raw(key).is_some()
    }

    pub fn str(&self, key: &str) -> CliResult<&str> {
        self.raw(key)
            .ok_or_else(|| CliError::Missing(key.to_string()))
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> CliResult<T> {
        let s = self.str(key)?;
        s.parse()
            .map_err(|_| bad(key, format!("cannot parse `{s}`")))
    }

    pub fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        if self.has(key) {
            self.parse(key)
        } else {
            Ok(default)
        }
    }

    pub fn opt<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.has(key).then(|| self.parse(key)).transpose()
    }

    pub fn list(&self, key: &str) -> CliResult<Vec<f64>> {
        parse_list(key, self.str(key)?)
    }

    pub fn list_or(&self, key: &str, default: Vec<f64>) -> CliResult<Vec<f64>> {
        self.raw(key).map_or(Ok(default), |s| parse_list(key, s))
    }

    /// Cantor axes from `bases=2,3` and `digits=full;0,2`.
    pub fn axes(&self) -> CliResult<Vec<CantorAxisSpec>> {
        let bases: Vec<u32> = split(self.str("bases")?, ',')
            .map(|s| {
                s.parse()
                    .map_err(|_| bad("bases", format!("`{s}` is not a base")))
            })
            .collect::<CliResult<_>>()?;
        let digits: Vec<&str> = match self.raw("digits") {
            Some(d) => split(d, ';').collect(),
            None => vec!["full"; bases.len()],
        };
        if digits.len() != bases.len() {
            return Err(bad(
                "digits",
                format!("{} digit sets for {} bases", digits.len(), bases.len()),
            ));
        }
        bases
            .iter()
            .zip(digits)
            .map(|(&b, d)| axis(b, d, "digits"))
            .collect()
    }

    /// Anchor prefixes from `anchors=;2,0` (empty entry means the default anchor).
    pub fn anchors(&self, axes: &[CantorAxisSpec]) -> CliResult<Vec<Anchor>> {
        let Some(raw) = self.raw("anchors") else {
            return Ok(vec![Anchor::tail_only(); axes.len()]);
        };
        let parts: Vec<&str> = raw.split(';').map(str::trim).collect();
        if parts.len() != axes.len() {
            return Err(bad(
                "anchors",
                format!("{} anchors for {} axes", parts.len(), axes.len()),
            ));
        }
        parts
            .iter()
            .zip(axes)
            .map(|(p, ax)| {
                let digits = split(p, ',')
                    .map(|s| {
                        s.parse::<u32>()
                            .map_err(|_| bad("anchors", format!("`{s}` is not a digit")))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                Ok(Anchor::new(digits, ax)?)
            })
            .collect()
    }
}

pub fn axis(base: u32, digits: &str, key: &str) -> CliResult<CantorAxisSpec> {
    if digits.eq_ignore_ascii_case("full") {
        return Ok(CantorAxisSpec::full(base)?);
    }
    let ds = split(digits, ',')
        .map(|s| {
            s.parse::<u32>()
                .map_err(|_| bad(key, format!("`{s}` is not a digit")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(CantorAxisSpec::new(base, ds)?)
}

fn split(s: &str, sep: char) -> impl Iterator<Item = &str> {
    s.split(sep).map(str::trim).filter(|x| !x.is_empty())
}

pub fn parse_list(key: &str, s: &str) -> CliResult<Vec<f64>> {
    let out = split(s, ',')
        .map(|x| {
            x.parse::<f64>()
                .map_err(|_| bad(key, format!("`{x}` is not a number")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if out.is_empty() {
        return Err(bad(key, "empty list"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_and_override() {
        let mut p = Params::parse_config("# c\ntau = 2,1\nseed=4\n\n").unwrap();
        assert_eq!(p.list("tau").unwrap(), vec![2.0, 1.0]);
        let mut flags = Params::default();
        flags.set("tau", "3");
        p.merge(flags);
        assert_eq!(p.list("tau").unwrap(), vec![3.0]);
        assert!(Params::parse_config("novalue").is_err());
    }

    #[test]
    fn axes_from_strings() {
        let mut p = Params::default();
        p.set("bases", "2,3");
        p.set("digits", "full;0,2");
        let axes = p.axes().unwrap();
        assert!(axes[0].is_full() && axes[1].digits() == [0, 2]);
        p.set("anchors", ";2");
        assert_eq!(p.anchors(&axes).unwrap()[1].prefix(), &[2]);
        p.set("digits", "full");
        assert_eq!(p.axes().unwrap_err().exit_code(), 2);
    }
}
