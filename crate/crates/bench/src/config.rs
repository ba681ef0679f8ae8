use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ancf14_core::{DeformationMode, Joint};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkName {
    Spring,
    Princeton,
    Shaft,
    Buckling,
    Custom,
}

impl BenchmarkName {
    pub const PRESETS: [BenchmarkName; 4] =
        [BenchmarkName::Spring, BenchmarkName::Princeton, BenchmarkName::Shaft, BenchmarkName::Buckling];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkName::Spring => "spring",
            BenchmarkName::Princeton => "princeton",
            BenchmarkName::Shaft => "shaft",
            BenchmarkName::Buckling => "buckling",
            BenchmarkName::Custom => "custom",
        }
    }

    pub fn is_dynamic(self) -> bool {
        matches!(self, BenchmarkName::Shaft | BenchmarkName::Buckling)
    }
}

impl fmt::Display for BenchmarkName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchmarkName {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| BenchError::Config(format!("unknown benchmark {s:?} (spring, princeton, shaft, buckling, custom)")))
    }
}

/// Benchmark run description. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub name: BenchmarkName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_elements: Option<usize>,
    #[serde(default)]
    pub deformation_mode: DeformationMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub no_torsion: bool,
    /// Benchmark-specific numeric parameters; each runner rejects keys it does not know.
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<CustomModel>,
}

impl BenchmarkConfig {
    pub fn preset(name: BenchmarkName) -> Self {
        Self {
            name,
            n_elements: None,
            deformation_mode: DeformationMode::Large,
            dt_s: None,
            load_steps: None,
            output_dir: None,
            no_torsion: false,
            overrides: BTreeMap::new(),
            model: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.to_owned(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BenchError::Config(m.to_owned()));
        if self.n_elements == Some(0) {
            return bad("n_elements must be at least 1");
        }
        if let Some(dt) = self.dt_s {
            if !(dt.is_finite() && dt > 0.0) {
                return bad("dt_s must be positive");
            }
        }
        if self.load_steps == Some(0) {
            return bad("load_steps must be at least 1");
        }
        if let Some((k, _)) = self.overrides.iter().find(|(_, v)| !v.is_finite()) {
            return Err(BenchError::Config(format!("override {k} is not finite")));
        }
        match (self.name, &self.model) {
            (BenchmarkName::Custom, None) => bad("custom benchmark needs a model"),
            (BenchmarkName::Custom, Some(_)) => Ok(()),
            (_, Some(_)) => bad("model is only accepted for the custom benchmark"),
            _ => Ok(()),
        }
    }
}

/// Overrides consumed by a runner; leftovers are reported as unknown.
pub(crate) struct Overrides {
    map: BTreeMap<String, f64>,
    used: BTreeSet<String>,
}

impl Overrides {
    pub fn new(map: &BTreeMap<String, f64>) -> Self {
        Self { map: map.clone(), used: BTreeSet::new() }
    }

    pub fn get(&mut self, key: &str, default: f64) -> f64 {
        self.used.insert(key.to_owned());
        self.map.get(key).copied().unwrap_or(default)
    }

    pub fn finish(self) -> Result<()> {
        let unknown: Vec<&String> = self.map.keys().filter(|k| !self.used.contains(*k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(BenchError::Config(format!("unknown overrides {unknown:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialInput {
    pub youngs_modulus_pa: f64,
    pub poisson_ratio: f64,
    pub density_kg_m3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SectionInput {
    /// `width_m` along the section `y` axis, `height_m` along `z`.
    Rectangle { width_m: f64, height_m: f64 },
    Tube {
        outer_radius_m: f64,
        #[serde(default)]
        inner_radius_m: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeInput {
    pub position_m: [f64; 3],
    pub slope: [f64; 3],
    #[serde(default)]
    pub theta_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamInput {
    pub nodes: Vec<usize>,
    pub material: MaterialInput,
    pub section: SectionInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_constant_m4: Option<f64>,
    /// Hint for the section `y` axis at the first node.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section_y: Option<[f64; 3]>,
    /// Take the initial geometry as stress-free instead of straight.
    #[serde(default)]
    pub stress_free_initial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeldInput {
    pub node: usize,
    /// Body centre in the node's section frame.
    pub offset_m: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyInput {
    pub mass_kg: f64,
    /// Principal moments about the body axes.
    pub inertia_kg_m2: [f64; 3],
    #[serde(default)]
    pub position_m: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weld: Option<WeldInput>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadInput {
    pub node: usize,
    pub force_n: [f64; 3],
    #[serde(default)]
    pub torque_n_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisInput {
    Static,
    Dynamic { end_time_s: f64 },
    Modal,
}

/// Model ingested by the custom benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomModel {
    pub nodes: Vec<NodeInput>,
    pub beams: Vec<BeamInput>,
    #[serde(default)]
    pub bodies: Vec<BodyInput>,
    #[serde(default)]
    pub joints: Vec<Joint>,
    #[serde(default)]
    pub loads: Vec<LoadInput>,
    #[serde(default)]
    pub gravity_m_s2: [f64; 3],
    pub analysis: AnalysisInput,
    /// Nodes whose coordinates are written to the output series.
    #[serde(default)]
    pub probes: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = BenchmarkConfig::from_json(r#"{"name": "spring"}"#).unwrap();
        assert_eq!(cfg, BenchmarkConfig::preset(BenchmarkName::Spring));
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(BenchmarkConfig::from_json(r#"{"name": "spring", "dt": 0.1}"#).is_err());
        assert!(BenchmarkConfig::from_json(r#"{"name": "shaft", "dt_s": 0.0}"#).is_err());
        assert!(BenchmarkConfig::from_json(r#"{"name": "shaft", "n_elements": 0}"#).is_err());
        assert!(BenchmarkConfig::from_json(r#"{"name": "custom"}"#).is_err());
        assert!(BenchmarkConfig::from_json(r#"{"name": "tower"}"#).is_err());
    }

    #[test]
    fn config_roundtrips_through_json() {
        let mut cfg = BenchmarkConfig::preset(BenchmarkName::Shaft);
        cfg.dt_s = Some(5e-4);
        cfg.deformation_mode = DeformationMode::Small;
        cfg.overrides.insert("end_time_s".into(), 1.0);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(BenchmarkConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn names_parse() {
        for n in BenchmarkName::PRESETS {
            assert_eq!(n.as_str().parse::<BenchmarkName>().unwrap(), n);
        }
    }

    #[test]
    fn overrides_report_unknown_keys() {
        let map = BTreeMap::from([("a".to_owned(), 1.0), ("b".to_owned(), 2.0)]);
        let mut o = Overrides::new(&map);
        assert_eq!(o.get("a", 0.0), 1.0);
        assert_eq!(o.get("c", 3.0), 3.0);
        assert!(o.finish().is_err());
    }
}
