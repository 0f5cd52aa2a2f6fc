//! Flat `key = value` run configuration.

use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;
use udw_core::harvest::Method;
use udw_core::model::{DimensionlessParams, Scenario};
use udw_core::quad::Tolerance;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("expected key=value, got {0:?}")]
    MalformedAssignment(String),
    #[error("unknown key {key:?}")]
    UnknownKey { key: String },
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("cannot read {path}: {reason}")]
    Unreadable { path: String, reason: String },
    #[error("invalid scenario: {0}")]
    Scenario(String),
}

/// What `compute` evaluates; `All` runs every method and reports the
/// deviations between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    One(Method),
    All,
}

impl FromStr for MethodChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closed" => Ok(Self::One(Method::Closed)),
            "identity" => Ok(Self::One(Method::Identity)),
            "oracle" => Ok(Self::One(Method::Oracle)),
            "all" => Ok(Self::All),
            _ => Err("expected closed, identity, oracle or all".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Alpha => "alpha",
            SweepAxis::Beta => "beta",
            SweepAxis::Gamma => "gamma",
            SweepAxis::Delta => "delta",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "alpha" => Ok(Self::Alpha),
            "beta" => Ok(Self::Beta),
            "gamma" => Ok(Self::Gamma),
            "delta" => Ok(Self::Delta),
            _ => Err("expected alpha, beta, gamma or delta".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    /// Defaults to `alpha`.
    pub alpha_b: Option<f64>,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Defaults to `delta`.
    pub delta_b: Option<f64>,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub switch_width: f64,
    pub mass: f64,
    /// Base regulator of the double-time references, in units of the
    /// switching width.
    pub epsilon: f64,
    pub method: MethodChoice,
    pub sweep_axis: SweepAxis,
    pub sweep_start: f64,
    pub sweep_stop: f64,
    pub sweep_count: usize,
    pub abs_tol: f64,
    /// Unset: 1e-12 for the single integrals, 1e-3 as the comparison target.
    pub rel_tol: Option<f64>,
    /// Unset: 2e6 for the single integrals, 5e7 for the references.
    pub max_evaluations: Option<usize>,
    pub out: Option<PathBuf>,
    /// Reserved; every computation is deterministic.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            alpha_b: None,
            beta: 5.0,
            gamma: 0.0,
            delta: 0.0,
            delta_b: None,
            lambda_a: 1.0,
            lambda_b: 1.0,
            switch_width: 1.0,
            mass: 0.0,
            epsilon: udw_core::model::DEFAULT_REGULATOR,
            method: MethodChoice::One(Method::Closed),
            sweep_axis: SweepAxis::Gamma,
            sweep_start: 0.0,
            sweep_stop: 20.0,
            sweep_count: 201,
            abs_tol: 1e-300,
            rel_tol: None,
            max_evaluations: None,
            out: None,
            seed: 0,
        }
    }
}

pub const KEYS: [&str; 21] = [
    "alpha",
    "alpha_b",
    "beta",
    "gamma",
    "delta",
    "delta_b",
    "lambda_a",
    "lambda_b",
    "switch_width",
    "mass",
    "epsilon",
    "method",
    "sweep_axis",
    "sweep_start",
    "sweep_stop",
    "sweep_count",
    "abs_tol",
    "rel_tol",
    "max_evaluations",
    "out",
    "seed",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn parse_finite(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse(key, value)?;
    if !v.is_finite() {
        return Err(ConfigError::InvalidValue { key: key.into(), value: value.into(), reason: "not finite".into() });
    }
    Ok(v)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let f = |v: &str| parse_finite(key, v);
        match key {
            "alpha" => self.alpha = f(value)?,
            "alpha_b" => self.alpha_b = Some(f(value)?),
            "beta" => self.beta = f(value)?,
            "gamma" => self.gamma = f(value)?,
            "delta" => self.delta = f(value)?,
            "delta_b" => self.delta_b = Some(f(value)?),
            "lambda_a" => self.lambda_a = f(value)?,
            "lambda_b" => self.lambda_b = f(value)?,
            "switch_width" => self.switch_width = f(value)?,
            "mass" => self.mass = f(value)?,
            "epsilon" => self.epsilon = f(value)?,
            "method" => self.method = parse(key, value)?,
            "sweep_axis" => self.sweep_axis = parse(key, value)?,
            "sweep_start" => self.sweep_start = f(value)?,
            "sweep_stop" => self.sweep_stop = f(value)?,
            "sweep_count" => self.sweep_count = parse(key, value)?,
            "abs_tol" => self.abs_tol = f(value)?,
            "rel_tol" => self.rel_tol = Some(f(value)?),
            "max_evaluations" => self.max_evaluations = Some(parse(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "seed" => self.seed = parse(key, value)?,
            _ => return Err(ConfigError::UnknownKey { key: key.to_string() }),
        }
        Ok(())
    }

    /// Applies a `key=value` assignment, as given to `--set`.
    pub fn apply(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::MalformedAssignment(assignment.to_string()))?;
        self.set(key.trim(), value.trim())
    }

    /// Reads a config file: one `key = value` per line, `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| ConfigError::Malformed { line: i + 1, text: raw.to_string() })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Unreadable { path: path.display().to_string(), reason: e.to_string() })?;
        Self::parse_text(&text)
    }

    pub fn params(&self) -> DimensionlessParams {
        DimensionlessParams {
            alpha_a: self.alpha,
            alpha_b: self.alpha_b.unwrap_or(self.alpha),
            beta: self.beta,
            gamma: self.gamma,
            delta_a: self.delta,
            delta_b: self.delta_b.unwrap_or(self.delta),
            lambda_a: self.lambda_a,
            lambda_b: self.lambda_b,
            mass: self.mass,
            switch_width: self.switch_width,
        }
    }

    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        Scenario::from_dimensionless(&self.params())
            .and_then(|s| s.with_regulator(self.epsilon * self.switch_width))
            .map_err(|e| ConfigError::Scenario(e.to_string()))
    }

    /// The config with one sweep coordinate replaced.
    pub fn at(&self, axis: SweepAxis, value: f64) -> Self {
        let mut c = self.clone();
        match axis {
            SweepAxis::Alpha => c.alpha = value,
            SweepAxis::Beta => c.beta = value,
            SweepAxis::Gamma => c.gamma = value,
            SweepAxis::Delta => c.delta = value,
        }
        c
    }

    /// Evenly spaced sweep coordinates, endpoints included.
    pub fn sweep_grid(&self) -> Result<Vec<f64>, ConfigError> {
        let n = self.sweep_count;
        if n == 0 {
            return Err(ConfigError::InvalidValue {
                key: "sweep_count".into(),
                value: "0".into(),
                reason: "need at least one point".into(),
            });
        }
        if n == 1 {
            return Ok(vec![self.sweep_start]);
        }
        let step = (self.sweep_stop - self.sweep_start) / (n - 1) as f64;
        Ok((0..n).map(|i| if i == n - 1 { self.sweep_stop } else { self.sweep_start + step * i as f64 }).collect())
    }

    fn tolerance(&self, rel: f64, budget: usize) -> Result<Tolerance, ConfigError> {
        Tolerance::new(self.abs_tol, rel, self.max_evaluations.unwrap_or(budget)).map_err(|e| {
            ConfigError::InvalidValue { key: "abs_tol/rel_tol".into(), value: format!("{}/{rel}", self.abs_tol), reason: e.to_string() }
        })
    }

    /// Tolerance of the single wavenumber and light-cone integrals.
    pub fn fast_tolerance(&self) -> Result<Tolerance, ConfigError> {
        self.tolerance(self.rel_tol.unwrap_or(1e-12), 2_000_000)
    }

    /// Tolerance of the double-time references; never tighter than 1e-7,
    /// which the regulator extrapolation cannot use anyway.
    pub fn oracle_tolerance(&self) -> Result<Tolerance, ConfigError> {
        self.tolerance(self.rel_tol.unwrap_or(1e-7).max(1e-7), 50_000_000)
    }

    /// Target accuracy and budget of `compare`.
    pub fn comparison_tolerance(&self) -> Result<Tolerance, ConfigError> {
        self.tolerance(self.rel_tol.unwrap_or(1e-3), 50_000_000)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let c = RunConfig::parse_text("# scenario\nalpha = 2\n\nbeta=3 # spacelike\nmethod = identity\n").unwrap();
        assert_eq!(c.alpha, 2.0);
        assert_eq!(c.beta, 3.0);
        assert_eq!(c.method, MethodChoice::One(Method::Identity));
        assert_eq!(c.params().alpha_b, 2.0);
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = RunConfig::parse_text("bta=5").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { key: "bta".into() });
        assert!(err.to_string().contains("bta"));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(RunConfig::parse_text("beta=five"), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(RunConfig::parse_text("beta=inf"), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(RunConfig::parse_text("method=fast"), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(RunConfig::parse_text("just words"), Err(ConfigError::Malformed { line: 1, .. })));
        let c = RunConfig::parse_text("beta=-1").unwrap();
        assert!(matches!(c.scenario(), Err(ConfigError::Scenario(_))));
    }

    #[test]
    fn every_documented_key_is_accepted() {
        let mut c = RunConfig::default();
        for key in KEYS {
            let value = match key {
                "method" => "all",
                "sweep_axis" => "beta",
                "out" => "x.csv",
                "sweep_count" | "max_evaluations" | "seed" => "3",
                _ => "0.5",
            };
            c.set(key, value).unwrap();
        }
    }

    #[test]
    fn grid_includes_endpoints() {
        let c = RunConfig { sweep_start: -1.0, sweep_stop: 1.0, sweep_count: 5, ..RunConfig::default() };
        assert_eq!(c.sweep_grid().unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let g = RunConfig::default().sweep_grid().unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g[200], 20.0);
    }
}
