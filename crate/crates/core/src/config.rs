//! TOML run configuration. Every key names its unit; every block is optional
//! and falls back to the shipped defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::engine::{default_conditions, Engine, EngineConfig, RigidObjectSpec, TestCondition};
use crate::geometry::FingertipGeometry;
use crate::joint::{fit_model, ingest_calibration_log, read_calibration_file, JointStiffnessModel};
use crate::montecarlo::{default_objects, pressure_grid, CompareCampaign, StochasticParams, SweepCampaign};
use crate::sheet::SheetSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config: {0}")]
    Invalid(String),
}

fn invalid<T>(m: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(m.into()))
}

/// Ring model source: a calibration log or inline coefficients, not both.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointBlock {
    pub calibration_csv: Option<PathBuf>,
    pub k0_nmm_per_rad: Option<f64>,
    pub k1_nmm_per_rad_per_kpa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareBlock {
    /// Keys into the condition table.
    pub conditions: Vec<String>,
    /// Extra or replacement conditions.
    pub condition_table: Vec<TestCondition>,
    pub closures_mm: Vec<f64>,
    pub pressure_kpa: f64,
}

impl Default for CompareBlock {
    fn default() -> Self {
        let c = CompareCampaign::default();
        Self {
            conditions: c.conditions.iter().map(|c| c.key.clone()).collect(),
            condition_table: Vec::new(),
            closures_mm: c.closures_mm,
            pressure_kpa: c.pressure_kpa,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObjectsBlock {
    pub pressures_kpa: Vec<f64>,
    pub items: Vec<RigidObjectSpec>,
}

impl Default for ObjectsBlock {
    fn default() -> Self {
        Self {
            pressures_kpa: pressure_grid(150, 10),
            items: default_objects(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub n_trials: u64,
    pub out_dir: PathBuf,
    pub geometry: FingertipGeometry,
    pub joint: Option<JointBlock>,
    pub sheet: SheetSpec,
    pub stochastic: StochasticBlock,
    pub engine: EngineConfig,
    pub sweep: SweepCampaign,
    pub compare: CompareBlock,
    pub objects: ObjectsBlock,
}

/// Stochastic ranges; the seed lives at the top level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StochasticBlock {
    pub mu_tip_range: (f64, f64),
    pub mu_surface_range: (f64, f64),
    pub initial_deflection_range_mm: (f64, f64),
    pub press_force_jitter: f64,
}

impl Default for StochasticBlock {
    fn default() -> Self {
        let s = StochasticParams::default();
        Self {
            mu_tip_range: s.mu_tip_range,
            mu_surface_range: s.mu_surface_range,
            initial_deflection_range_mm: s.initial_deflection_range_mm,
            press_force_jitter: s.press_force_jitter,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_trials: 1000,
            out_dir: PathBuf::from("out"),
            geometry: FingertipGeometry::default(),
            joint: None,
            sheet: SheetSpec::default(),
            stochastic: StochasticBlock::default(),
            engine: EngineConfig::default(),
            sweep: SweepCampaign::default(),
            compare: CompareBlock::default(),
            objects: ObjectsBlock::default(),
        }
    }
}

/// Everything a campaign needs, resolved and validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub engine: Engine,
    pub stochastic: StochasticParams,
    pub conditions: Vec<TestCondition>,
    /// Canonical JSON of the effective configuration.
    pub canonical_json: String,
    pub config_sha256: String,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml_str(&text)?;
        // calibration paths are relative to the config file
        if let Some(JointBlock {
            calibration_csv: Some(p),
            ..
        }) = cfg.joint.as_mut()
        {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn stochastic_params(&self) -> StochasticParams {
        StochasticParams {
            mu_tip_range: self.stochastic.mu_tip_range,
            mu_surface_range: self.stochastic.mu_surface_range,
            initial_deflection_range_mm: self.stochastic.initial_deflection_range_mm,
            press_force_jitter: self.stochastic.press_force_jitter,
            seed: self.seed,
        }
    }

    fn joint_model(&self) -> Result<(JointStiffnessModel, Option<String>), ConfigError> {
        let Some(block) = &self.joint else {
            return Ok((JointStiffnessModel::default(), None));
        };
        let inline = block.k0_nmm_per_rad.is_some() || block.k1_nmm_per_rad_per_kpa.is_some();
        match (&block.calibration_csv, inline) {
            (Some(_), true) => invalid("joint: give either calibration_csv or inline coefficients, not both"),
            (None, false) => invalid("joint: needs calibration_csv or k0_nmm_per_rad and k1_nmm_per_rad_per_kpa"),
            (None, true) => match (block.k0_nmm_per_rad, block.k1_nmm_per_rad_per_kpa) {
                (Some(k0), Some(k1)) => {
                    let m = JointStiffnessModel::new(k0, k1);
                    m.validate().map_err(|e| ConfigError::Invalid(format!("joint: {e}")))?;
                    Ok((m, None))
                }
                _ => invalid("joint: inline model needs both k0_nmm_per_rad and k1_nmm_per_rad_per_kpa"),
            },
            (Some(path), false) => {
                let bytes = std::fs::read(path).map_err(|e| {
                    ConfigError::Invalid(format!("joint: calibration_csv {}: {e}", path.display()))
                })?;
                let rows = read_calibration_file(path)
                    .map_err(|e| ConfigError::Invalid(format!("joint: {}: {e}", path.display())))?;
                let grid = ingest_calibration_log(&rows, self.geometry.a1_mm)
                    .map_err(|e| ConfigError::Invalid(format!("joint: {}: {e}", path.display())))?;
                let mut model =
                    fit_model(&grid).map_err(|e| ConfigError::Invalid(format!("joint: {}: {e}", path.display())))?;
                model.source = format!("fit of {}", path.display());
                Ok((model, Some(hex::encode(Sha256::digest(&bytes)))))
            }
        }
    }

    fn conditions(&self) -> Result<Vec<TestCondition>, ConfigError> {
        let mut table = default_conditions();
        for c in &self.compare.condition_table {
            match table.iter_mut().find(|t| t.key == c.key) {
                Some(t) => *t = c.clone(),
                None => table.push(c.clone()),
            }
        }
        let mut out = Vec::new();
        for key in &self.compare.conditions {
            match table.iter().find(|t| &t.key == key) {
                Some(t) => out.push(t.clone()),
                None => return invalid(format!("compare: unknown condition key `{key}`")),
            }
        }
        if out.is_empty() {
            return invalid("compare: condition list is empty");
        }
        for c in &out {
            c.finger_separation(&self.geometry)
                .map_err(|e| ConfigError::Invalid(format!("compare: condition `{}`: {e}", c.key)))?;
        }
        Ok(out)
    }

    /// Validate and build the engine. The hash covers the effective config
    /// with overrides applied, the resolved ring model and the calibration
    /// log digest, but not the output directory.
    pub fn resolve(self) -> Result<Resolved, ConfigError> {
        if self.n_trials == 0 {
            return invalid("n_trials must be at least 1");
        }
        self.geometry
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("geometry: {e}")))?;
        self.sheet
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("sheet: {e}")))?;
        let stochastic = self.stochastic_params();
        stochastic
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("stochastic: {e}")))?;
        let (model, log_digest) = self.joint_model()?;
        let engine = Engine::new(self.geometry, model.clone(), self.engine)
            .map_err(|e| ConfigError::Invalid(format!("engine: {e}")))?;
        let conditions = self.conditions()?;
        for o in &self.objects.items {
            o.validate(&self.geometry)
                .map_err(|e| ConfigError::Invalid(format!("objects: {e}")))?;
        }
        for (name, v) in [
            ("sweep.pressures_kpa", &self.sweep.pressures_kpa),
            ("objects.pressures_kpa", &self.objects.pressures_kpa),
        ] {
            if v.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return invalid(format!("{name} must be finite and non-negative"));
            }
        }
        if self.compare.closures_mm.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return invalid("compare.closures_mm must be finite and non-negative");
        }

        let mut value = serde_json::to_value(&self).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let serde_json::Value::Object(map) = &mut value {
            map.remove("out_dir");
            map.insert(
                "resolved_joint_model".into(),
                serde_json::to_value(&model).map_err(|e| ConfigError::Invalid(e.to_string()))?,
            );
            if let Some(d) = log_digest {
                map.insert("calibration_csv_sha256".into(), d.into());
            }
        }
        let canonical_json = serde_json::to_string(&value).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let config_sha256 = hex::encode(Sha256::digest(canonical_json.as_bytes()));
        Ok(Resolved {
            config: self,
            engine,
            stochastic,
            conditions,
            canonical_json,
            config_sha256,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        let r = c.resolve().unwrap();
        assert_eq!(r.conditions.len(), 3);
        assert_eq!(r.config_sha256.len(), 64);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml_str("sead = 3").is_err());
        assert!(RunConfig::from_toml_str("[geometry]\nd1 = 31").is_err());
    }

    #[test]
    fn joint_block_exclusive() {
        let both = "[joint]\ncalibration_csv = \"x.csv\"\nk0_nmm_per_rad = 1.0\nk1_nmm_per_rad_per_kpa = 1.0";
        assert!(RunConfig::from_toml_str(both).unwrap().resolve().is_err());
        let none = "[joint]\n";
        assert!(RunConfig::from_toml_str(none).unwrap().resolve().is_err());
        let inline = "[joint]\nk0_nmm_per_rad = 100.0\nk1_nmm_per_rad_per_kpa = 2.0";
        let r = RunConfig::from_toml_str(inline).unwrap().resolve().unwrap();
        assert_eq!(r.engine.joint.k0_nmm_per_rad, 100.0);
        let missing = "[joint]\ncalibration_csv = \"/nonexistent/log.csv\"";
        assert!(RunConfig::from_toml_str(missing).unwrap().resolve().is_err());
    }

    #[test]
    fn unknown_condition_rejected() {
        let c = RunConfig::from_toml_str("[compare]\nconditions = [\"c9\"]").unwrap();
        assert!(matches!(c.resolve(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn hash_tracks_seed_not_out_dir() {
        let a = RunConfig::default().resolve().unwrap().config_sha256;
        let b = RunConfig {
            out_dir: "elsewhere".into(),
            ..RunConfig::default()
        }
        .resolve()
        .unwrap()
        .config_sha256;
        let c = RunConfig {
            seed: 7,
            ..RunConfig::default()
        }
        .resolve()
        .unwrap()
        .config_sha256;
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
