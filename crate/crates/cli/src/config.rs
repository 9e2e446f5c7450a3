//! Run configuration: a strict TOML schema with units spelled out in the key
//! names. Unknown keys are rejected, defaults are filled at parse time, and a
//! validated config serializes back to an equivalent document.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use headwave::experiments::{
    SweepPlan, TumorScenario, DEFAULT_TUMOR_TISSUE, SUPPORTED_BAND_HZ,
};
use headwave::fdtd::SourceKind;

/// Total thickness of the layered head model, mm. Inclusion placement must
/// stay inside it.
const STACK_DEPTH_MM: f64 = 50.0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{key}: {reason}")]
    Invalid { key: &'static str, reason: String },
}

fn invalid(key: &'static str, reason: String) -> ConfigError {
    ConfigError::Invalid { key, reason }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    #[serde(rename = "penetration")]
    Penetration,
    #[serde(rename = "detection")]
    Detection,
    #[serde(rename = "sweep")]
    Sweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Penetration => "penetration",
            ExperimentKind::Detection => "detection",
            ExperimentKind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "vivaldi-like")]
    VivaldiLike,
    #[serde(rename = "patch-like")]
    PatchLike,
}

impl Preset {
    pub fn to_kind(self) -> SourceKind {
        match self {
            Preset::VivaldiLike => SourceKind::VivaldiLike,
            Preset::PatchLike => SourceKind::PatchLike,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub db_path: Option<PathBuf>,
    #[serde(default = "defaults::preset")]
    pub preset: Preset,
    /// Profile frequencies for penetration runs, GHz.
    #[serde(default = "defaults::frequencies_ghz")]
    pub frequencies_ghz: Vec<f64>,
    /// Base source amplitude before preset scaling, V/m.
    #[serde(default = "defaults::amplitude")]
    pub amplitude_v_per_m: f64,
    #[serde(default = "defaults::sar_limit")]
    pub sar_limit_w_per_kg: f64,
    #[serde(default = "defaults::output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub tumor: TumorConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

mod defaults {
    use super::Preset;
    use std::path::PathBuf;

    pub fn preset() -> Preset {
        Preset::VivaldiLike
    }
    pub fn frequencies_ghz() -> Vec<f64> {
        vec![2.45, 4.5]
    }
    pub fn amplitude() -> f64 {
        1.0
    }
    pub fn sar_limit() -> f64 {
        2.0
    }
    pub fn output_dir() -> PathBuf {
        PathBuf::from("out")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TumorConfig {
    /// Database name of the inclusion material.
    pub tissue: String,
    pub center_depth_mm: f64,
    /// Slab half-thickness; zero disables the inclusion.
    pub radius_mm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_s_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_r: Option<f64>,
}

impl Default for TumorConfig {
    fn default() -> Self {
        TumorConfig {
            tissue: DEFAULT_TUMOR_TISSUE.to_string(),
            center_depth_mm: 8.41,
            radius_mm: 5.0,
            sigma_s_per_m: None,
            eps_r: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Cell size override, mm; must be no coarser than the automatic choice.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dz_mm: Option<f64>,
    /// Simulated duration override, ns.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ns: Option<f64>,
    /// Air gap between the source/probes and the stack faces, mm.
    pub standoff_mm: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            dz_mm: None,
            duration_ns: None,
            standoff_mm: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "frequency")]
    Frequency,
    #[serde(rename = "tumor_radius")]
    TumorRadius,
    #[serde(rename = "tumor_depth")]
    TumorDepth,
    #[serde(rename = "tumor_sigma")]
    TumorSigma,
    #[serde(rename = "preset")]
    Preset,
}

/// One swept axis with its value list. Exactly the list matching `axis` may
/// be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies_ghz: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii_mm: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depths_mm: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas_s_per_m: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presets: Option<Vec<Preset>>,
}

/// Parse and validate a config document, filling defaults.
pub fn parse_config(doc: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig =
        toml::from_str(doc).map_err(|e| ConfigError::Parse(one_line(&e.to_string())))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
    let doc = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&doc)
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn check_band(key: &'static str, values_ghz: &[f64]) -> Result<(), ConfigError> {
    let (lo, hi) = SUPPORTED_BAND_HZ;
    if values_ghz.is_empty() {
        return Err(invalid(key, "must list at least one frequency".into()));
    }
    for &g in values_ghz {
        let f = g * 1e9;
        if !f.is_finite() || f < lo || f > hi {
            return Err(invalid(
                key,
                format!(
                    "{g} GHz is outside the supported band [{}, {}] GHz",
                    lo / 1e9,
                    hi / 1e9
                ),
            ));
        }
    }
    Ok(())
}

fn check_positive(key: &'static str, v: f64) -> Result<(), ConfigError> {
    if !v.is_finite() || v <= 0.0 {
        return Err(invalid(key, format!("must be a positive number, got {v}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        check_band("frequencies_ghz", &self.frequencies_ghz)?;
        check_positive("amplitude_v_per_m", self.amplitude_v_per_m)?;
        check_positive("sar_limit_w_per_kg", self.sar_limit_w_per_kg)?;
        if self.output_dir.as_os_str().is_empty() {
            return Err(invalid("output_dir", "must be non-empty".into()));
        }
        self.tumor.validate()?;
        self.grid.validate()?;
        match (self.experiment, &self.sweep) {
            (ExperimentKind::Sweep, Some(sweep)) => sweep.validate()?,
            (ExperimentKind::Sweep, None) => {
                return Err(invalid(
                    "sweep",
                    "experiment \"sweep\" requires a [sweep] table".into(),
                ));
            }
            (other, Some(_)) => {
                return Err(invalid(
                    "sweep",
                    format!(
                        "a [sweep] table is only valid with experiment = \"sweep\", not \"{}\"",
                        other.name()
                    ),
                ));
            }
            (_, None) => {}
        }
        Ok(())
    }

    pub fn frequencies_hz(&self) -> Vec<f64> {
        self.frequencies_ghz.iter().map(|g| g * 1e9).collect()
    }

    /// Differential-run parameters with all units converted to SI.
    pub fn scenario(&self) -> TumorScenario {
        TumorScenario {
            preset: self.preset.to_kind(),
            base_amplitude: self.amplitude_v_per_m,
            center_depth: self.tumor.center_depth_mm * 1e-3,
            thickness: 2.0 * self.tumor.radius_mm * 1e-3,
            tissue: self.tumor.tissue.clone(),
            sigma_override: self.tumor.sigma_s_per_m,
            eps_override: self.tumor.eps_r,
            standoff: self.grid.standoff_mm * 1e-3,
            dz_override: self.grid.dz_mm.map(|v| v * 1e-3),
            duration_override: self.grid.duration_ns.map(|v| v * 1e-9),
        }
    }

    /// The swept axis as an experiment plan. `None` unless this is a
    /// validated sweep config.
    pub fn sweep_plan(&self) -> Option<SweepPlan> {
        let sweep = self.sweep.as_ref()?;
        match sweep.axis {
            SweepAxis::Frequency => sweep
                .frequencies_ghz
                .as_ref()
                .map(|v| SweepPlan::Frequency(v.iter().map(|g| g * 1e9).collect())),
            SweepAxis::TumorRadius => sweep
                .radii_mm
                .as_ref()
                .map(|v| SweepPlan::TumorRadius(v.iter().map(|r| r * 1e-3).collect())),
            SweepAxis::TumorDepth => sweep
                .depths_mm
                .as_ref()
                .map(|v| SweepPlan::TumorDepth(v.iter().map(|d| d * 1e-3).collect())),
            SweepAxis::TumorSigma => sweep
                .sigmas_s_per_m
                .as_ref()
                .map(|v| SweepPlan::TumorSigma(v.clone())),
            SweepAxis::Preset => sweep
                .presets
                .as_ref()
                .map(|v| SweepPlan::Preset(v.iter().map(|p| p.to_kind()).collect())),
        }
    }

    #[cfg(test)]
    pub fn to_toml_string(&self) -> Result<String, ConfigError> {
        toml::to_string(self).map_err(|e| ConfigError::Parse(one_line(&e.to_string())))
    }
}

impl TumorConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.tissue.trim().is_empty() {
            return Err(invalid("tumor.tissue", "must name a database tissue".into()));
        }
        if !self.radius_mm.is_finite() || self.radius_mm < 0.0 {
            return Err(invalid(
                "tumor.radius_mm",
                format!("must be zero or positive, got {}", self.radius_mm),
            ));
        }
        if !self.center_depth_mm.is_finite() {
            return Err(invalid(
                "tumor.center_depth_mm",
                format!("must be a number, got {}", self.center_depth_mm),
            ));
        }
        if self.radius_mm > 0.0 {
            let lo = self.center_depth_mm - self.radius_mm;
            let hi = self.center_depth_mm + self.radius_mm;
            if lo < 0.0 || hi > STACK_DEPTH_MM {
                return Err(invalid(
                    "tumor.center_depth_mm",
                    format!(
                        "inclusion [{lo}, {hi}] mm must sit inside the {STACK_DEPTH_MM} mm stack"
                    ),
                ));
            }
        }
        if let Some(s) = self.sigma_s_per_m {
            if !s.is_finite() || s < 0.0 {
                return Err(invalid(
                    "tumor.sigma_s_per_m",
                    format!("must be zero or positive, got {s}"),
                ));
            }
        }
        if let Some(e) = self.eps_r {
            if !e.is_finite() || e < 1.0 {
                return Err(invalid(
                    "tumor.eps_r",
                    format!("must be at least 1, got {e}"),
                ));
            }
        }
        Ok(())
    }
}

impl GridConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        if let Some(dz) = self.dz_mm {
            check_positive("grid.dz_mm", dz)?;
        }
        if let Some(d) = self.duration_ns {
            check_positive("grid.duration_ns", d)?;
        }
        if !self.standoff_mm.is_finite() || self.standoff_mm < 0.0 {
            return Err(invalid(
                "grid.standoff_mm",
                format!("must be zero or positive, got {}", self.standoff_mm),
            ));
        }
        Ok(())
    }
}

impl SweepConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        let lists: [(&'static str, bool); 5] = [
            ("sweep.frequencies_ghz", self.frequencies_ghz.is_some()),
            ("sweep.radii_mm", self.radii_mm.is_some()),
            ("sweep.depths_mm", self.depths_mm.is_some()),
            ("sweep.sigmas_s_per_m", self.sigmas_s_per_m.is_some()),
            ("sweep.presets", self.presets.is_some()),
        ];
        let (expected, axis_name) = match self.axis {
            SweepAxis::Frequency => (0, "frequency"),
            SweepAxis::TumorRadius => (1, "tumor_radius"),
            SweepAxis::TumorDepth => (2, "tumor_depth"),
            SweepAxis::TumorSigma => (3, "tumor_sigma"),
            SweepAxis::Preset => (4, "preset"),
        };
        for (i, (key, present)) in lists.iter().enumerate() {
            if i != expected && *present {
                return Err(invalid(
                    key,
                    format!("does not belong to sweep axis \"{axis_name}\""),
                ));
            }
        }
        if !lists[expected].1 {
            return Err(invalid(
                lists[expected].0,
                format!("axis \"{axis_name}\" requires this value list"),
            ));
        }

        match self.axis {
            SweepAxis::Frequency => {
                check_band("sweep.frequencies_ghz", self.frequencies_ghz.as_ref().unwrap())?;
            }
            SweepAxis::TumorRadius => {
                let radii = self.radii_mm.as_ref().unwrap();
                if radii.is_empty() {
                    return Err(invalid("sweep.radii_mm", "must list at least one radius".into()));
                }
                for &r in radii {
                    if !r.is_finite() || r < 0.0 {
                        return Err(invalid(
                            "sweep.radii_mm",
                            format!("must be zero or positive, got {r}"),
                        ));
                    }
                }
            }
            SweepAxis::TumorDepth => {
                let depths = self.depths_mm.as_ref().unwrap();
                if depths.is_empty() {
                    return Err(invalid("sweep.depths_mm", "must list at least one depth".into()));
                }
                // The depth sweep keeps the default 5 mm radius.
                let r = TumorScenario::default().thickness * 1e3 / 2.0;
                for &d in depths {
                    if !d.is_finite() || d - r < 0.0 || d + r > STACK_DEPTH_MM {
                        return Err(invalid(
                            "sweep.depths_mm",
                            format!(
                                "{d} mm puts the default {r} mm-radius inclusion outside the {STACK_DEPTH_MM} mm stack"
                            ),
                        ));
                    }
                }
            }
            SweepAxis::TumorSigma => {
                let sigmas = self.sigmas_s_per_m.as_ref().unwrap();
                if sigmas.is_empty() {
                    return Err(invalid(
                        "sweep.sigmas_s_per_m",
                        "must list at least one conductivity".into(),
                    ));
                }
                for &s in sigmas {
                    if !s.is_finite() || s < 0.0 {
                        return Err(invalid(
                            "sweep.sigmas_s_per_m",
                            format!("must be zero or positive, got {s}"),
                        ));
                    }
                }
            }
            SweepAxis::Preset => {
                if self.presets.as_ref().unwrap().is_empty() {
                    return Err(invalid("sweep.presets", "must list at least one preset".into()));
                }
            }
        }
        Ok(())
    }
}
