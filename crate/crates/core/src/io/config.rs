//! JSON run configuration.
//!
//! ```json
//! {
//!   "params": {"a": 0.2, "b": 0.006, "c": 0.002, "d": 0.008, "e": 0.002, "f": 0},
//!   "alpha": 0.01,
//!   "P0": [3, 5],
//!   "R0": [7, 10],
//!   "steps": 70000,
//!   "transient": 35000,
//!   "tolerances": {"massEps": 1e-12, "zEps": 1e-12, "tolFixed": 1e-8, "tolCycle": 1e-3, "newtonTol": 1e-10},
//!   "outputs": {"trajectory": "run.csv", "svg": "run.svg", "atlas": "atlas.jsonl"}
//! }
//! ```
//!
//! `transient` defaults to half of `steps`. Every tolerance and every output
//! path is optional.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analysis::{ClassifyOptions, NewtonOptions};
use crate::dynamics::{ConflictAlpha, CoupledState, Epsilons, ModelParams, RegionState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct Tolerances {
    pub mass_eps: f64,
    pub z_eps: f64,
    pub tol_fixed: f64,
    pub tol_cycle: f64,
    pub newton_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let classify = ClassifyOptions::default();
        let eps = Epsilons::default();
        Tolerances {
            mass_eps: eps.mass,
            z_eps: eps.z,
            tol_fixed: classify.tol_fixed,
            tol_cycle: classify.tol_cycle,
            newton_tol: NewtonOptions::default().tol,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atlas: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams,
    pub alpha: f64,
    #[serde(rename = "P0")]
    pub p0: Vec<f64>,
    #[serde(rename = "R0")]
    pub r0: Vec<f64>,
    pub steps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transient: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub outputs: Outputs,
}

fn config_err(key: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        reason: reason.into(),
    }
}

/// Parses and validates a JSON configuration document.
pub fn parse_config(document: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let msg = inner.to_string();
        config_err(offending_key(&path, &msg), msg)
    })?;
    config.validate()?;
    Ok(config)
}

/// Missing fields are reported at the parent's path with the field name quoted
/// in the message; unknown fields already carry their own path.
fn offending_key(path: &str, msg: &str) -> String {
    let named = ["missing field `", "unknown field `"]
        .iter()
        .find_map(|prefix| msg.strip_prefix(prefix))
        .and_then(|rest| rest.split('`').next());
    match (named, path) {
        (Some(field), p) if p == field || p.ends_with(&format!(".{field}")) => p.to_string(),
        (Some(field), "." | "") => field.to_string(),
        (Some(field), parent) => format!("{parent}.{field}"),
        (None, ".") => "<document>".to_string(),
        (None, p) => p.to_string(),
    }
}

impl RunConfig {
    /// The reference configuration of the limit-cycle experiment.
    pub fn reference() -> Self {
        RunConfig {
            params: ModelParams::STANDARD,
            alpha: 0.01,
            p0: vec![3.0, 5.0],
            r0: vec![7.0, 10.0],
            steps: 70_000,
            transient: None,
            tolerances: Tolerances::default(),
            outputs: Outputs::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(|e| match e {
            Error::Invalid { what, reason } => config_err(what, reason),
            other => other,
        })?;
        ConflictAlpha::new(self.alpha)
            .map_err(|_| config_err("alpha", format!("must lie in [-1, 1], got {}", self.alpha)))?;
        if self.p0.len() != self.r0.len() {
            return Err(config_err(
                "R0",
                format!(
                    "length {} differs from P0 length {}",
                    self.r0.len(),
                    self.p0.len()
                ),
            ));
        }
        for (key, v) in [("P0", &self.p0), ("R0", &self.r0)] {
            if v.len() != 2 {
                return Err(config_err(
                    key,
                    format!("needs 2 entries (prey, predator), got {}", v.len()),
                ));
            }
            RegionState::new(v.clone()).map_err(|e| config_err(key, e.to_string()))?;
        }
        if self.steps < 1 {
            return Err(config_err("steps", "must be at least 1"));
        }
        if let Some(t) = self.transient {
            if t >= self.steps {
                return Err(config_err(
                    "transient",
                    format!("must be below steps ({}), got {t}", self.steps),
                ));
            }
        }
        let t = &self.tolerances;
        for (key, v) in [
            ("tolerances.massEps", t.mass_eps),
            ("tolerances.zEps", t.z_eps),
            ("tolerances.tolFixed", t.tol_fixed),
            ("tolerances.tolCycle", t.tol_cycle),
            ("tolerances.newtonTol", t.newton_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(key, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn alpha(&self) -> ConflictAlpha {
        ConflictAlpha::new(self.alpha).expect("validated")
    }

    pub fn initial_state(&self) -> Result<CoupledState> {
        CoupledState::new(
            RegionState::new(self.p0.clone())?,
            RegionState::new(self.r0.clone())?,
        )
    }

    pub fn transient_steps(&self) -> u64 {
        self.transient.unwrap_or(self.steps / 2)
    }

    pub fn epsilons(&self) -> Epsilons {
        Epsilons {
            mass: self.tolerances.mass_eps,
            z: self.tolerances.z_eps,
        }
    }

    pub fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions {
            total_steps: self.steps,
            transient: Some(self.transient_steps()),
            tol_fixed: self.tolerances.tol_fixed,
            tol_cycle: self.tolerances.tol_cycle,
            eps: self.epsilons(),
            ..ClassifyOptions::default()
        }
    }

    pub fn newton_options(&self) -> NewtonOptions {
        NewtonOptions {
            tol: self.tolerances.newton_tol,
            eps: self.epsilons(),
            ..NewtonOptions::default()
        }
    }
}
