//! Flat `key=value` configuration files and their merge with command-line
//! flags. Flags always override file values; diagnostics name the offending
//! field and line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use geodescent::ManifoldKind;

use crate::error::{CliError, Result};

/// Step-rule selector as it appears in configs and on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleToken {
    Exogenous,
    Polyak,
}

impl fmt::Display for RuleToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleToken::Exogenous => "exogenous",
            RuleToken::Polyak => "polyak",
        })
    }
}

impl FromStr for RuleToken {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exogenous" => Ok(RuleToken::Exogenous),
            "polyak" => Ok(RuleToken::Polyak),
            other => Err(format!("expected `exogenous` or `polyak`, got `{other}`")),
        }
    }
}

pub fn parse_manifold(s: &str) -> std::result::Result<ManifoldKind, String> {
    match s {
        "sphere" => Ok(ManifoldKind::Sphere),
        "spd" => Ok(ManifoldKind::Spd),
        other => Err(format!("expected `sphere` or `spd`, got `{other}`")),
    }
}

/// Every setting a subcommand can take, each optional until resolution.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub manifold: Option<ManifoldKind>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub r: Option<f64>,
    pub eps: Option<f64>,
    pub seed: Option<u64>,
    pub lambda: Option<f64>,
    pub rule: Option<RuleToken>,
    pub alpha_factor: Option<f64>,
    pub kappa: Option<f64>,
    pub max_iter: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Settings {
    /// Fills every unset field from `file`.
    pub fn or_from_file(mut self, file: &FileConfig) -> Result<Settings> {
        if self.manifold.is_none() {
            self.manifold = file.parse_with("manifold", parse_manifold)?;
        }
        if self.n.is_none() {
            self.n = file.parse_field::<usize>("n")?;
        }
        if self.m.is_none() {
            self.m = file.parse_field::<usize>("m")?;
        }
        if self.r.is_none() {
            self.r = file.parse_field::<f64>("r")?;
        }
        if self.eps.is_none() {
            self.eps = file.parse_field::<f64>("eps")?;
        }
        if self.seed.is_none() {
            self.seed = file.parse_field::<u64>("seed")?;
        }
        if self.lambda.is_none() {
            self.lambda = file.parse_field::<f64>("lambda")?;
        }
        if self.rule.is_none() {
            self.rule = file.parse_with("rule", RuleToken::from_str)?;
        }
        if self.alpha_factor.is_none() {
            self.alpha_factor = file.parse_field::<f64>("alpha-factor")?;
        }
        if self.kappa.is_none() {
            self.kappa = file.parse_field::<f64>("kappa")?;
        }
        if self.max_iter.is_none() {
            self.max_iter = file.parse_field::<usize>("max-iter")?;
        }
        if self.out.is_none() {
            self.out = file.get("out").map(|(_, v)| PathBuf::from(v));
        }
        Ok(self)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "manifold",
    "n",
    "m",
    "r",
    "eps",
    "seed",
    "lambda",
    "rule",
    "alpha-factor",
    "kappa",
    "max-iter",
    "out",
];

/// A parsed `key=value` file: blank lines and `#` comments are skipped, keys
/// must be known and unique.
#[derive(Clone, Debug)]
pub struct FileConfig {
    path: PathBuf,
    values: BTreeMap<String, (usize, String)>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let mut values = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!("expected `key=value`, got `{line}`"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!(
                        "unknown field `{key}` (known fields: {})",
                        KNOWN_KEYS.join(", ")
                    ),
                });
            }
            if values.insert(key.clone(), (line_no, value)).is_some() {
                return Err(CliError::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!("duplicate field `{key}`"),
                });
            }
        }
        Ok(FileConfig {
            path: path.to_path_buf(),
            values,
        })
    }

    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.values.get(key).map(|(line, v)| (*line, v.as_str()))
    }

    fn parse_field<T: FromStr>(&self, key: &'static str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.parse_with(key, |raw| raw.parse::<T>().map_err(|e| e.to_string()))
    }

    fn parse_with<T>(
        &self,
        key: &'static str,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some((line, raw)) => parse(raw).map(Some).map_err(|message| CliError::Parse {
                path: self.path.clone(),
                line,
                message: format!("field `{key}`: {message}"),
            }),
        }
    }
}

/// Resolves an optional setting to a value, naming the field when absent.
pub fn require<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| {
        CliError::usage(format!(
            "missing required setting `{field}` (pass --{field} or set it in the config file)"
        ))
    })
}
