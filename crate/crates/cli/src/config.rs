//! Scenario configuration: JSON files, `key=value` overrides and per-scenario defaults.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest grid any scenario accepts.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    Fringe,
    Hom,
    HeraldGc,
    HeraldLkd,
    LossSweep,
    OpaVisibility,
    Sensitivity,
    Limits,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Fringe,
        Scenario::Hom,
        Scenario::HeraldGc,
        Scenario::HeraldLkd,
        Scenario::LossSweep,
        Scenario::OpaVisibility,
        Scenario::Sensitivity,
        Scenario::Limits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fringe => "fringe",
            Scenario::Hom => "hom",
            Scenario::HeraldGc => "herald-gc",
            Scenario::HeraldLkd => "herald-lkd",
            Scenario::LossSweep => "loss-sweep",
            Scenario::OpaVisibility => "opa-visibility",
            Scenario::Sensitivity => "sensitivity",
            Scenario::Limits => "limits",
        }
    }

    /// Parameter keys the scenario reads. Anything else is rejected.
    pub fn parameter_keys(self) -> &'static [&'static str] {
        match self {
            Scenario::Fringe => &[
                "input",
                "N",
                "alpha",
                "observable",
                "gamma",
                "layout",
                "photon_cap",
            ],
            Scenario::Hom => &["m", "theta", "photon_cap"],
            Scenario::HeraldGc => &["N", "chi", "photon_cap"],
            Scenario::HeraldLkd => &[
                "tap_theta",
                "objective",
                "theta_min",
                "theta_max",
                "mirror_arm",
            ],
            Scenario::LossSweep => &["N", "n_coherent", "gamma_max", "gamma_steps", "gammas"],
            Scenario::OpaVisibility => &["r_min", "r_max", "r_steps", "photon_cap"],
            Scenario::Sensitivity => &[
                "input",
                "N",
                "alpha",
                "observable",
                "gamma",
                "layout",
                "photon_cap",
            ],
            Scenario::Limits => &["n", "wavelength", "N"],
        }
    }

    /// Default `(phi_min, phi_max, steps)`.
    fn default_grid(self) -> (f64, f64, usize) {
        match self {
            Scenario::OpaVisibility => (0.0, PI, 9),
            Scenario::Sensitivity => (0.1, 0.9, 5),
            _ => (0.0, 2.0 * PI, 361),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Scenario::ALL.iter().map(|sc| sc.name()).collect();
                ConfigError(format!(
                    "unknown scenario '{s}'; valid scenarios: {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(ConfigError(format!(
                "unknown format '{other}'; expected csv or json"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Number(x) => write!(f, "{x}"),
            Scalar::Text(s) => f.write_str(s),
        }
    }
}

/// Everything a config file may set. Absent fields fall back to scenario defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, Scalar>,
    pub phi_min: Option<f64>,
    pub phi_max: Option<f64>,
    pub steps: Option<usize>,
    pub output_format: Option<OutputFormat>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid config: {e}")))
    }

    /// Applies one `key=value` override. The grid keys `phi_min`, `phi_max`
    /// and `steps` set the top-level fields; other keys go to `parameters`.
    pub fn apply_param(&mut self, key: String, value: Scalar) -> Result<(), ConfigError> {
        match key.as_str() {
            "phi_min" => self.phi_min = Some(number_value(&key, &value)?),
            "phi_max" => self.phi_max = Some(number_value(&key, &value)?),
            "steps" => {
                let x = number_value(&key, &value)?;
                if !(x >= 0.0 && x.fract() == 0.0 && x <= MAX_GRID_POINTS as f64) {
                    return Err(ConfigError(format!(
                        "steps must be a whole number up to {MAX_GRID_POINTS}, got {x}"
                    )));
                }
                self.steps = Some(x as usize);
            }
            _ => {
                self.parameters.insert(key, value);
            }
        }
        Ok(())
    }
}

fn number_value(key: &str, value: &Scalar) -> Result<f64, ConfigError> {
    match value {
        Scalar::Number(x) => Ok(*x),
        Scalar::Text(s) => Err(ConfigError(format!(
            "parameter '{key}' must be a number, got '{s}'"
        ))),
    }
}

/// Splits `key=value`. Values that read as finite numbers become
/// [`Scalar::Number`]; anything else is kept as text.
pub fn parse_param(pair: &str) -> Result<(String, Scalar), ConfigError> {
    let (key, value) = pair
        .split_once('=')
        .ok_or_else(|| ConfigError(format!("expected key=value, got '{pair}'")))?;
    let (key, value) = (key.trim(), value.trim());
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(ConfigError(format!("invalid parameter name '{key}'")));
    }
    if value.is_empty() {
        return Err(ConfigError(format!("parameter '{key}' has no value")));
    }
    let scalar = match value.parse::<f64>() {
        Ok(x) if x.is_finite() => Scalar::Number(x),
        _ => Scalar::Text(value.to_string()),
    };
    Ok((key.to_string(), scalar))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub parameters: BTreeMap<String, Scalar>,
    pub phi_min: f64,
    pub phi_max: f64,
    pub steps: usize,
    pub output_format: OutputFormat,
}

impl ScenarioConfig {
    /// Fills in defaults for `scenario` and validates the result.
    pub fn resolve(scenario: Scenario, file: ConfigFile) -> Result<Self, ConfigError> {
        let allowed = scenario.parameter_keys();
        if let Some(key) = file
            .parameters
            .keys()
            .find(|k| !allowed.contains(&k.as_str()))
        {
            return Err(ConfigError(format!(
                "scenario {scenario} does not take parameter '{key}' (accepted: {})",
                allowed.join(", ")
            )));
        }
        let (lo, hi, steps) = scenario.default_grid();
        let config = Self {
            scenario,
            parameters: file.parameters,
            phi_min: file.phi_min.unwrap_or(lo),
            phi_max: file.phi_max.unwrap_or(hi),
            steps: file.steps.unwrap_or(steps),
            output_format: file.output_format.unwrap_or_default(),
        };
        if !(config.phi_min.is_finite()
            && config.phi_max.is_finite()
            && config.phi_min < config.phi_max)
        {
            return Err(ConfigError(format!(
                "phi_min ({}) must be below phi_max ({})",
                config.phi_min, config.phi_max
            )));
        }
        if !(2..=MAX_GRID_POINTS).contains(&config.steps) {
            return Err(ConfigError(format!(
                "steps must lie in 2..={MAX_GRID_POINTS}, got {}",
                config.steps
            )));
        }
        Ok(config)
    }

    pub fn number(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.parameters.get(key) {
            None => Ok(default),
            Some(v) => number_value(key, v),
        }
    }

    pub fn optional_number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.parameters
            .get(key)
            .map(|v| number_value(key, v))
            .transpose()
    }

    /// A non-negative whole-number parameter.
    pub fn count(&self, key: &str, default: u32) -> Result<u32, ConfigError> {
        match self.optional_count(key)? {
            Some(n) => Ok(n),
            None => Ok(default),
        }
    }

    pub fn optional_count(&self, key: &str) -> Result<Option<u32>, ConfigError> {
        let Some(x) = self.optional_number(key)? else {
            return Ok(None);
        };
        if x >= 0.0 && x.fract() == 0.0 && x <= f64::from(u32::MAX) {
            Ok(Some(x as u32))
        } else {
            Err(ConfigError(format!(
                "parameter '{key}' must be a whole number, got {x}"
            )))
        }
    }

    pub fn text<'a>(&'a self, key: &str, default: &'a str) -> Result<&'a str, ConfigError> {
        match self.parameters.get(key) {
            None => Ok(default),
            Some(Scalar::Text(s)) => Ok(s),
            Some(Scalar::Number(x)) => Err(ConfigError(format!(
                "parameter '{key}' must be text, got {x}"
            ))),
        }
    }

    pub fn optional_text(&self, key: &str) -> Result<Option<&str>, ConfigError> {
        match self.parameters.get(key) {
            None => Ok(None),
            Some(_) => self.text(key, "").map(Some),
        }
    }

    pub fn phase_grid(&self) -> Vec<f64> {
        let span = self.phi_max - self.phi_min;
        let last = self.steps - 1;
        (0..self.steps)
            .map(|k| {
                if k == last {
                    self.phi_max
                } else {
                    self.phi_min + span * k as f64 / last as f64
                }
            })
            .collect()
    }
}

/// Builds a resolved config from the command-line pieces. `config_text` is
/// the content of `--config`; `params` and `format` override it.
pub fn build_config(
    scenario: &str,
    config_text: Option<&str>,
    params: &[String],
    format: Option<&str>,
) -> Result<ScenarioConfig, ConfigError> {
    let scenario: Scenario = scenario.parse()?;
    let mut file = match config_text {
        Some(text) => ConfigFile::from_json(text)?,
        None => ConfigFile::default(),
    };
    if let Some(named) = &file.scenario {
        let named: Scenario = named.parse()?;
        if named != scenario {
            return Err(ConfigError(format!(
                "config file is for scenario {named}, but {scenario} was requested"
            )));
        }
    }
    for pair in params {
        let (key, value) = parse_param(pair)?;
        file.apply_param(key, value)?;
    }
    if let Some(format) = format {
        file.output_format = Some(format.parse()?);
    }
    ScenarioConfig::resolve(scenario, file)
}
