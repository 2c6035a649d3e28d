//! Run configuration: one JSON document, optionally overridden by flags.

use std::path::{Path, PathBuf};

use nalgebra::Matrix3;
use nullcurve::dynamics::PhaseState;
use nullcurve::e21::GroupElement;
use nullcurve::mink3::MinkVector;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Quadrature,
    Both,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Quadrature => "quadrature",
            Method::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub k: f64,
    pub l4: f64,
    pub l5: f64,
}

/// Initial frame: translation `q` and the rows of the SO(2,1) block `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    pub q: [f64; 3],
    pub a: [[f64; 3]; 3],
}

impl FrameConfig {
    pub fn to_group(&self) -> GroupElement {
        GroupElement { q: MinkVector::from_array(self.q), a: Matrix3::from_fn(|i, j| self.a[i][j]) }
    }
}

fn default_dt_max() -> f64 {
    0.01
}

fn default_method() -> Method {
    Method::Direct
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: f64,
    pub initial: Initial,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0: Option<FrameConfig>,
    #[serde(rename = "T")]
    pub t_end: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    pub tol: f64,
    #[serde(default = "default_method")]
    pub method: Method,
    pub outputs: PathBuf,
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub m: Option<f64>,
    pub k: Option<f64>,
    pub l4: Option<f64>,
    pub l5: Option<f64>,
    pub t_end: Option<f64>,
    pub dt_max: Option<f64>,
    pub tol: Option<f64>,
    pub method: Option<Method>,
    pub outputs: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str, ov: &Overrides) -> LabResult<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        let Value::Object(mut obj) = value else {
            return Err(LabError::Config("config must be a JSON object".into()));
        };
        apply_overrides(&mut obj, ov);
        let cfg: RunConfig = serde_json::from_value(Value::Object(obj)).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, ov: &Overrides) -> LabResult<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| LabError::Config(format!("cannot read {}: {e}", p.display())))?,
            None => "{}".to_string(),
        };
        Self::from_json(&text, ov)
    }

    pub fn validate(&self) -> LabResult<()> {
        let finite = [self.m, self.initial.k, self.initial.l4, self.initial.l5, self.t_end, self.dt_max, self.tol];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(LabError::Config("all numeric fields must be finite".into()));
        }
        if self.m == 0.0 {
            return Err(LabError::Config("field `m` must be nonzero".into()));
        }
        if !(self.t_end > 0.0) {
            return Err(LabError::Config("field `T` must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(LabError::Config("field `tol` must be positive".into()));
        }
        if !(self.dt_max > 0.0) {
            return Err(LabError::Config("field `dt_max` must be positive".into()));
        }
        if let Some(g) = &self.g0 {
            if !g.to_group().is_valid(1e-9) {
                return Err(LabError::Config("field `g0` is not an element of E(2,1)".into()));
            }
        }
        Ok(())
    }

    pub fn state(&self) -> PhaseState {
        PhaseState { m: self.m, k: self.initial.k, l4: self.initial.l4, l5: self.initial.l5 }
    }

    pub fn g0(&self) -> GroupElement {
        self.g0.map(|g| g.to_group()).unwrap_or_else(GroupElement::identity)
    }
}

fn apply_overrides(obj: &mut Map<String, Value>, ov: &Overrides) {
    let mut set = |key: &str, v: Option<Value>| {
        if let Some(v) = v {
            obj.insert(key.to_string(), v);
        }
    };
    set("m", ov.m.map(Value::from));
    set("T", ov.t_end.map(Value::from));
    set("dt_max", ov.dt_max.map(Value::from));
    set("tol", ov.tol.map(Value::from));
    set("method", ov.method.map(|m| Value::from(m.label())));
    set("outputs", ov.outputs.as_ref().map(|p| Value::from(p.to_string_lossy().into_owned())));
    let fiber = [("k", ov.k), ("l4", ov.l4), ("l5", ov.l5)];
    if fiber.iter().any(|(_, v)| v.is_some()) {
        let entry = obj.entry("initial").or_insert_with(|| Value::Object(Map::new()));
        if let Value::Object(init) = entry {
            for (key, v) in fiber {
                if let Some(v) = v {
                    init.insert(key.to_string(), Value::from(v));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{"m": 1.0, "initial": {"k": 0.0, "l4": 1.0, "l5": 0.0},
        "T": 20.0, "dt_max": 0.01, "tol": 1e-10, "method": "direct", "outputs": "out"}"#;

    #[test]
    fn parses_full_config() {
        let c = RunConfig::from_json(FULL, &Overrides::default()).unwrap();
        assert_eq!(c.m, 1.0);
        assert_eq!(c.t_end, 20.0);
        assert_eq!(c.method, Method::Direct);
        assert_eq!(c.g0(), GroupElement::identity());
    }

    #[test]
    fn missing_field_is_named() {
        let err = RunConfig::from_json(r#"{"initial": {"k": 0, "l4": 1, "l5": 0}, "T": 1, "tol": 1e-8, "outputs": "o"}"#, &Overrides::default())
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("`m`"), "{err}");
    }

    #[test]
    fn flags_override_file() {
        let ov = Overrides { m: Some(2.0), l5: Some(0.5), method: Some(Method::Both), ..Default::default() };
        let c = RunConfig::from_json(FULL, &ov).unwrap();
        assert_eq!((c.m, c.initial.l5, c.initial.l4, c.method), (2.0, 0.5, 1.0, Method::Both));
    }

    #[test]
    fn rejects_invalid_values() {
        for bad in [("m", 0.0), ("T", -1.0), ("tol", 0.0)] {
            let mut v: Value = serde_json::from_str(FULL).unwrap();
            v[bad.0] = Value::from(bad.1);
            let err = RunConfig::from_json(&v.to_string(), &Overrides::default()).unwrap_err();
            assert!(err.to_string().contains(bad.0), "{err}");
        }
    }
}
