//! JSON scenario files and the built-in examples.
//!
//! ```json
//! {
//!   "name": "example1",
//!   "system": { "c3": "1", "c2": "t + 1", "c1": "(t^2 + 2*t)/3", "c0": "(t^3 + 3*t^2 + 9)/27",
//!               "t0": 1, "y0": 1, "dy0": "auto", "ddy0": "auto" },
//!   "constants": { "e2": 1, "e1": 1, "e0": -1 },
//!   "input": { "kind": "sinusoid", "amplitude": 10, "bias": -5, "frequency": 3, "unit": "hz" },
//!   "noise": { "signal": { "kind": "pulse", "amplitude": 4, "duty_percent": 50, "bias": -2.3, "period": 1 },
//!              "apply_to": ["ab", "ba"] },
//!   "simulation": { "t0": 1, "t_end": 10, "step": 0.01 },
//!   "tolerances": { "residual": 1e-6, "trajectory": 1e-3, "initial": 1e-9 }
//! }
//! ```
//!
//! Only `system` is required. `"auto"` initial derivatives are filled in from
//! `y0` so that the cascades can reproduce them.

use crate::cascade::Ordering;
use crate::expr::Expr;
use crate::sim::{Signal, SimConfig};
use crate::systems::{DecompositionConstants, ThirdOrderSystem};
use crate::verify::Tolerances;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Width of the coefficient sampling window when no simulation block is given.
pub const DEFAULT_WINDOW: f64 = 10.0;

pub const BUILTIN_SCENARIOS: &[(&str, &str)] = &[
    ("example1", include_str!("../../scenarios/example1.json")),
    ("example2", include_str!("../../scenarios/example2.json")),
    ("example3", include_str!("../../scenarios/example3.json")),
    (
        "example3-zero-input",
        include_str!("../../scenarios/example3-zero-input.json"),
    ),
    ("example4", include_str!("../../scenarios/example4.json")),
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {source}")]
    Json {
        origin: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{origin}: field `{field}`: {message}")]
    Field {
        origin: String,
        field: &'static str,
        message: String,
    },
    #[error("unknown scenario `{0}` (built-in: {})", builtin_names().join(", "))]
    UnknownScenario(String),
}

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN_SCENARIOS.iter().map(|(n, _)| *n).collect()
}

/// A number or the literal `"auto"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialValue {
    Value(f64),
    Keyword(String),
}

impl Default for InitialValue {
    fn default() -> Self {
        InitialValue::Value(0.0)
    }
}

impl InitialValue {
    pub fn auto() -> Self {
        InitialValue::Keyword("auto".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub c3: String,
    pub c2: String,
    pub c1: String,
    pub c0: String,
    pub t0: f64,
    #[serde(default)]
    pub y0: f64,
    #[serde(default)]
    pub dy0: InitialValue,
    #[serde(default)]
    pub ddy0: InitialValue,
}

fn both_orderings() -> Vec<Ordering> {
    vec![Ordering::Ab, Ordering::Ba]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    pub signal: Signal,
    #[serde(default = "both_orderings")]
    pub apply_to: Vec<Ordering>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub system: SystemBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<DecompositionConstants>,
    #[serde(default = "zero_signal")]
    pub input: Signal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn zero_signal() -> Signal {
    Signal::Zero
}

/// Initial derivative after resolving `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    Given(f64),
    Auto,
}

/// The system block with coefficients parsed.
#[derive(Debug, Clone)]
pub struct ParsedSystem {
    /// `dy0` and `ddy0` are zero where the config says `"auto"`.
    pub system: ThirdOrderSystem,
    pub dy0: Initial,
    pub ddy0: Initial,
}

impl ParsedSystem {
    pub fn needs_auto(&self) -> bool {
        self.dy0 == Initial::Auto || self.ddy0 == Initial::Auto
    }

    /// Fills `"auto"` entries from the required values.
    pub fn resolved(&self, required_dy0: f64, required_ddy0: f64) -> ThirdOrderSystem {
        let mut c = self.system.clone();
        if self.dy0 == Initial::Auto {
            c.dy0 = required_dy0;
        }
        if self.ddy0 == Initial::Auto {
            c.ddy0 = required_ddy0;
        }
        c
    }
}

impl Config {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|source| ConfigError::Json {
            origin: origin.into(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn builtin(name: &str) -> Result<Self, ConfigError> {
        let (_, text) = BUILTIN_SCENARIOS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| ConfigError::UnknownScenario(name.into()))?;
        Self::from_json(text, &format!("scenario {name}"))
    }

    pub fn origin(&self) -> String {
        self.name.clone().unwrap_or_else(|| "config".into())
    }

    fn field_error(&self, field: &'static str, message: impl Into<String>) -> ConfigError {
        ConfigError::Field {
            origin: self.origin(),
            field,
            message: message.into(),
        }
    }

    pub fn parse_system(&self) -> Result<ParsedSystem, ConfigError> {
        let s = &self.system;
        let coefficient = |field: &'static str, text: &str| {
            Expr::parse(text).map_err(|e| self.field_error(field, e.to_string()))
        };
        let initial = |field: &'static str, v: &InitialValue| match v {
            InitialValue::Value(x) if x.is_finite() => Ok(Initial::Given(*x)),
            InitialValue::Value(x) => {
                Err(self.field_error(field, format!("must be finite, got {x}")))
            }
            InitialValue::Keyword(k) if k == "auto" => Ok(Initial::Auto),
            InitialValue::Keyword(k) => {
                Err(self.field_error(field, format!("expected a number or \"auto\", got \"{k}\"")))
            }
        };
        if !s.t0.is_finite() || !s.y0.is_finite() {
            return Err(self.field_error("system.t0", "t0 and y0 must be finite"));
        }
        let dy0 = initial("system.dy0", &s.dy0)?;
        let ddy0 = initial("system.ddy0", &s.ddy0)?;
        let value = |i: Initial| match i {
            Initial::Given(x) => x,
            Initial::Auto => 0.0,
        };
        let system = ThirdOrderSystem::new(
            coefficient("system.c3", &s.c3)?,
            coefficient("system.c2", &s.c2)?,
            coefficient("system.c1", &s.c1)?,
            coefficient("system.c0", &s.c0)?,
            s.t0,
        )
        .with_initial(s.y0, value(dy0), value(ddy0));
        Ok(ParsedSystem { system, dy0, ddy0 })
    }

    /// Window over which coefficients are sampled: the simulation window, or
    /// `[t0, t0 + 10]`.
    pub fn window(&self) -> (f64, f64) {
        match &self.simulation {
            Some(sim) => (sim.t0, sim.t_end),
            None => (self.system.t0, self.system.t0 + DEFAULT_WINDOW),
        }
    }

    pub fn simulation(&self) -> Result<SimConfig, ConfigError> {
        let sim = self
            .simulation
            .ok_or_else(|| self.field_error("simulation", "a simulation block is required"))?;
        sim.validate()
            .map_err(|e| self.field_error("simulation", e.to_string()))?;
        if (sim.t0 - self.system.t0).abs() > 1e-12 * (1.0 + sim.t0.abs()) {
            return Err(self.field_error(
                "simulation.t0",
                format!("must equal system.t0 ({}), got {}", self.system.t0, sim.t0),
            ));
        }
        Ok(sim)
    }

    pub fn validate_signals(&self) -> Result<(), ConfigError> {
        self.input
            .validate()
            .map_err(|e| self.field_error("input", e.to_string()))?;
        if let Some(noise) = &self.noise {
            noise
                .signal
                .validate()
                .map_err(|e| self.field_error("noise.signal", e.to_string()))?;
        }
        let t = &self.tolerances;
        if ![t.residual, t.trajectory, t.initial]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0)
        {
            return Err(
                self.field_error("tolerances", "tolerances must be finite and non-negative")
            );
        }
        Ok(())
    }

    /// Switches every sinusoid to rad/s.
    pub fn use_rad_per_sec(&mut self) {
        self.input = std::mem::replace(&mut self.input, Signal::Zero).in_rad_per_sec();
        if let Some(noise) = &mut self.noise {
            noise.signal = std::mem::replace(&mut noise.signal, Signal::Zero).in_rad_per_sec();
        }
    }

    pub fn noise(&self) -> (Signal, Vec<Ordering>) {
        match &self.noise {
            Some(n) => (n.signal.clone(), n.apply_to.clone()),
            None => (Signal::Zero, Vec::new()),
        }
    }
}
