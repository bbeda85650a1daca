//! Run configuration: command-line flags over a `key=value` file over the
//! `PTDOUBLET_OUT` environment variable over built-in defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use crate::cli::Overrides;
use crate::error::CliError;

pub const OUT_ENV: &str = "PTDOUBLET_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Natanzon,
    Eckart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileArg {
    Constant,
    Decaying,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    #[value(alias = "contour-implicit")]
    Contour,
    Liouville,
    Residual,
    PtDefect,
    Nodes,
    NumericMatch,
}

impl Check {
    pub const ALL: [Check; 6] =
        [Check::Contour, Check::Liouville, Check::Residual, Check::PtDefect, Check::Nodes, Check::NumericMatch];

    pub fn name(self) -> &'static str {
        match self {
            Check::Contour => "contour",
            Check::Liouville => "liouville",
            Check::Residual => "residual",
            Check::PtDefect => "pt-defect",
            Check::Nodes => "nodes",
            Check::NumericMatch => "numeric-match",
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: ModelKind,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    pub beta: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub nmax: u32,
    #[serde(rename = "N")]
    pub n: Option<u32>,
    pub branch: Option<BranchArg>,
    pub profile: ProfileArg,
    pub eps0: f64,
    #[serde(rename = "T")]
    pub t_max: f64,
    pub points: usize,
    /// Arch amplitude used by the finite-difference oracle.
    pub numeric_eps0: f64,
    pub checks: Vec<Check>,
    /// Replaces the Natanzon energy in the Liouville check.
    pub ed_override: Option<f64>,
    #[serde(skip)]
    pub out: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Natanzon,
            a: None,
            beta: 1.0,
            c: 10.0,
            nmax: 1,
            n: None,
            branch: None,
            profile: ProfileArg::Decaying,
            eps0: 0.25,
            t_max: 12.0,
            points: 2001,
            numeric_eps0: 1.0,
            checks: Check::ALL.to_vec(),
            ed_override: None,
            out: PathBuf::from("ptdoublet-out"),
            format: Format::Json,
        }
    }
}

/// Parses a flat `key=value` file. Blank lines and lines starting with `#`
/// are ignored; keys are case-sensitive and match the long flag names.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", k + 1)))?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| CliError::Config(format!("config key {key}: cannot parse {value:?}")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value, true).map_err(|_| CliError::Config(format!("config key {key}: unknown value {value:?}")))
}

fn parse_checks(key: &str, value: &str) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for part in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if part == "all" {
            checks.extend(Check::ALL);
        } else {
            checks.push(parse_enum(key, part)?);
        }
    }
    checks.sort();
    checks.dedup();
    if checks.is_empty() {
        return Err(CliError::Config("no checks selected".into()));
    }
    Ok(checks)
}

impl RunConfig {
    fn apply_file(&mut self, map: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (key, value) in map {
            let v = value.as_str();
            match key.as_str() {
                "model" => self.model = parse_enum(key, v)?,
                "A" => self.a = Some(parse(key, v)?),
                "beta" => self.beta = parse(key, v)?,
                "C" => self.c = parse(key, v)?,
                "nmax" => self.nmax = parse(key, v)?,
                "N" => self.n = Some(parse(key, v)?),
                "branch" => self.branch = Some(parse_enum(key, v)?),
                "profile" => self.profile = parse_enum(key, v)?,
                "eps0" => self.eps0 = parse(key, v)?,
                "T" => self.t_max = parse(key, v)?,
                "n" => self.points = parse(key, v)?,
                "numeric_eps0" => self.numeric_eps0 = parse(key, v)?,
                "checks" => self.checks = parse_checks(key, v)?,
                "ed_override" => self.ed_override = Some(parse(key, v)?),
                "out" => self.out = PathBuf::from(v),
                "format" => self.format = parse_enum(key, v)?,
                _ => return Err(CliError::Config(format!("unknown config key {key:?}"))),
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, o: &Overrides) -> Result<(), CliError> {
        macro_rules! take {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = o.$field.clone() { $target = v; })*
            };
        }
        take!(model => self.model, beta => self.beta, c => self.c, nmax => self.nmax, profile => self.profile,
              eps0 => self.eps0, t_max => self.t_max, points => self.points, numeric_eps0 => self.numeric_eps0,
              out => self.out, format => self.format);
        if o.a.is_some() {
            self.a = o.a;
        }
        if o.n.is_some() {
            self.n = o.n;
        }
        if o.branch.is_some() {
            self.branch = o.branch;
        }
        if o.ed_override.is_some() {
            self.ed_override = o.ed_override;
        }
        if let Some(list) = &o.checks {
            self.checks = parse_checks("checks", list)?;
        }
        Ok(())
    }

    /// Resolves the configuration. `env_out` is the value of [`OUT_ENV`], if set.
    pub fn resolve(flags: &Overrides, env_out: Option<&str>) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(dir) = env_out.filter(|s| !s.is_empty()) {
            cfg.out = PathBuf::from(dir);
        }
        if let Some(path) = &flags.config {
            cfg.apply_file(&parse_file(&read_config(path)?)?)?;
        }
        cfg.apply_flags(flags)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let finite = [self.beta, self.c, self.eps0, self.t_max, self.numeric_eps0];
        if finite.iter().any(|x| !x.is_finite()) || self.a.is_some_and(|a| !a.is_finite()) {
            return Err(CliError::Config("parameters must be finite".into()));
        }
        if self.beta < 0.0 {
            return Err(CliError::Config("beta must be non-negative".into()));
        }
        if self.t_max <= 0.0 {
            return Err(CliError::Config("T must be positive".into()));
        }
        if self.model == ModelKind::Eckart && self.a.is_none() {
            return Err(CliError::Config("the eckart model needs --A".into()));
        }
        Ok(())
    }
}

fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing_skips_comments_and_trims() {
        let m = parse_file("# grid\n n = 801 \n\nbeta=2\n").unwrap();
        assert_eq!(m.get("n").map(String::as_str), Some("801"));
        assert_eq!(m.get("beta").map(String::as_str), Some("2"));
        assert!(parse_file("beta 2").is_err());
    }

    #[test]
    fn checks_list() {
        assert_eq!(parse_checks("checks", "nodes, liouville").unwrap(), vec![Check::Liouville, Check::Nodes]);
        assert_eq!(parse_checks("checks", "contour-implicit").unwrap(), vec![Check::Contour]);
        assert_eq!(parse_checks("checks", "all").unwrap(), Check::ALL.to_vec());
        assert!(parse_checks("checks", "bogus").is_err());
    }

    #[test]
    fn precedence_flags_over_file_over_env_over_defaults() {
        let dir = std::env::temp_dir().join(format!("ptdoublet-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("run.cfg");
        std::fs::write(&file, "beta=2\nC=20\nout=from-file\n").unwrap();
        let flags = Overrides { config: Some(file.clone()), c: Some(30.0), ..Overrides::default() };
        let cfg = RunConfig::resolve(&flags, Some("from-env")).unwrap();
        assert_eq!((cfg.beta, cfg.c), (2.0, 30.0));
        assert_eq!(cfg.out, PathBuf::from("from-file"));
        assert_eq!(cfg.eps0, 0.25);

        let cfg = RunConfig::resolve(&Overrides::default(), Some("from-env")).unwrap();
        assert_eq!(cfg.out, PathBuf::from("from-env"));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut cfg = RunConfig::default();
        let map = parse_file("colour=blue").unwrap();
        assert!(matches!(cfg.apply_file(&map), Err(CliError::Config(_))));
    }
}
