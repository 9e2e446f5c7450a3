//! Tissue dielectric models, the tissue database, and layered geometry.
//!
//! Complex permittivity follows the engineering time convention e^{+jwt}:
//! passive (lossy) materials have a non-positive imaginary part. Two
//! dispersion laws are supported: a static pair (constant `eps_r`, constant
//! `sigma`) and the fractional-pole relaxation model
//!
//! ```text
//! eps(w) = eps_inf + sum_n delta_eps_n / (1 + (j w tau_n)^(1 - alpha_n))
//!          + sigma_static / (j w EPS0)
//! ```
//!
//! A relaxation spec with no poles evaluates identically to the static pair
//! with `eps_r = eps_inf`, `sigma = sigma_static`.
//!
//! Geometry is a planar stratified slab: an ordered list of homogeneous
//! layers along the propagation axis, bounded by a semi-infinite medium
//! (free space by default) on both sides. The default head cross-section is
//! seven layers totalling 50 mm; contrast material is inserted by carving an
//! interval out of the host layers so total thickness is preserved.

use num_complex::Complex64;
use serde::Deserialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::constants::EPS0;

/// Slices thinner than this (meters) are treated as degenerate when carving
/// an inclusion interval out of host layers. Sub-picometer scraps only arise
/// when an inclusion boundary lands exactly on a host boundary.
const SLIVER_M: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DielectricsError {
    #[error("frequency must be positive, got {0} Hz")]
    NonPositiveFrequency(f64),
    #[error("tissue `{name}`: {reason}")]
    InvalidTissue { name: String, reason: String },
    #[error("duplicate tissue name `{0}` in database")]
    DuplicateTissue(String),
    #[error("tissue `{0}` not found in database")]
    UnknownTissue(String),
    #[error("tissue database: {0}")]
    Parse(String),
    #[error("layer {index} has non-positive thickness {thickness_m} m")]
    BadThickness { index: usize, thickness_m: f64 },
    #[error(
        "inclusion interval [{lo_m}, {hi_m}] m falls outside the stack extent [0, {total_m}] m"
    )]
    InclusionOutOfBounds { lo_m: f64, hi_m: f64, total_m: f64 },
}

/// One fractional relaxation pole: `delta_eps / (1 + (jw tau)^(1-alpha))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationPole {
    pub delta_eps: f64,
    /// Relaxation time, seconds.
    pub tau: f64,
    /// Pole broadening exponent in [0, 1); 0 reduces to a Debye pole.
    pub alpha: f64,
}

/// A tissue's complex-permittivity law.
#[derive(Debug, Clone, PartialEq)]
pub enum DispersionSpec {
    /// Constant relative permittivity and conductivity.
    Static { eps_r: f64, sigma: f64 },
    /// Fractional-pole relaxation plus a static conductivity term.
    ColeCole {
        eps_inf: f64,
        poles: Vec<RelaxationPole>,
        sigma_static: f64,
    },
}

impl DispersionSpec {
    /// Complex relative permittivity at frequency `f` (Hz), e^{+jwt} sign
    /// convention.
    pub fn complex_permittivity(&self, f: f64) -> Result<Complex64, DielectricsError> {
        if !(f > 0.0) {
            return Err(DielectricsError::NonPositiveFrequency(f));
        }
        let w = 2.0 * PI * f;
        match self {
            DispersionSpec::Static { eps_r, sigma } => {
                Ok(Complex64::new(*eps_r, -sigma / (w * EPS0)))
            }
            DispersionSpec::ColeCole {
                eps_inf,
                poles,
                sigma_static,
            } => {
                let mut eps = Complex64::new(*eps_inf, 0.0);
                for p in poles {
                    let jwt = Complex64::new(0.0, w * p.tau);
                    eps += p.delta_eps / (Complex64::new(1.0, 0.0) + jwt.powf(1.0 - p.alpha));
                }
                eps.im -= sigma_static / (w * EPS0);
                Ok(eps)
            }
        }
    }

    /// Real permittivity in the high-frequency limit of the conductivity
    /// term; used for wavelength and transit-time estimates.
    pub fn eps_r_nominal(&self) -> f64 {
        match self {
            DispersionSpec::Static { eps_r, .. } => *eps_r,
            DispersionSpec::ColeCole { eps_inf, poles, .. } => {
                eps_inf + poles.iter().map(|p| p.delta_eps).sum::<f64>()
            }
        }
    }

    /// Conductivity of the static/DC term, S/m.
    pub fn sigma_static(&self) -> f64 {
        match self {
            DispersionSpec::Static { sigma, .. } => *sigma,
            DispersionSpec::ColeCole { sigma_static, .. } => *sigma_static,
        }
    }

    pub(crate) fn check(&self, name: &str) -> Result<(), DielectricsError> {
        let fail = |reason: String| DielectricsError::InvalidTissue {
            name: name.to_string(),
            reason,
        };
        match self {
            DispersionSpec::Static { eps_r, sigma } => {
                if !eps_r.is_finite() || *eps_r < 1.0 {
                    return Err(fail(format!("eps_r must be >= 1, got {eps_r}")));
                }
                if !sigma.is_finite() || *sigma < 0.0 {
                    return Err(fail(format!("sigma must be >= 0, got {sigma}")));
                }
            }
            DispersionSpec::ColeCole {
                eps_inf,
                poles,
                sigma_static,
            } => {
                if !eps_inf.is_finite() || *eps_inf < 1.0 {
                    return Err(fail(format!("eps_inf must be >= 1, got {eps_inf}")));
                }
                if !sigma_static.is_finite() || *sigma_static < 0.0 {
                    return Err(fail(format!("sigma_static must be >= 0, got {sigma_static}")));
                }
                for (i, p) in poles.iter().enumerate() {
                    if !p.delta_eps.is_finite() || p.delta_eps <= 0.0 {
                        return Err(fail(format!("pole {i}: delta_eps must be > 0")));
                    }
                    if !p.tau.is_finite() || p.tau <= 0.0 {
                        return Err(fail(format!("pole {i}: tau must be > 0 seconds")));
                    }
                    if !p.alpha.is_finite() || !(0.0..1.0).contains(&p.alpha) {
                        return Err(fail(format!("pole {i}: alpha must lie in [0, 1)")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A named material: dispersion law plus mass density (and optional shell
/// radius carried through from the source geometry as metadata).
#[derive(Debug, Clone, PartialEq)]
pub struct TissueRecord {
    pub name: String,
    pub dispersion: DispersionSpec,
    /// Mass density, kg/m^3.
    pub density: f64,
    /// Outer shell radius in the source geometry, mm. Metadata only; no
    /// computation reads it.
    pub radius_mm: Option<f64>,
}

impl TissueRecord {
    pub fn complex_permittivity(&self, f: f64) -> Result<Complex64, DielectricsError> {
        self.dispersion.complex_permittivity(f)
    }

    fn check(&self) -> Result<(), DielectricsError> {
        if self.name.trim().is_empty() {
            return Err(DielectricsError::InvalidTissue {
                name: self.name.clone(),
                reason: "name must be non-empty".into(),
            });
        }
        self.dispersion.check(&self.name)?;
        if !self.density.is_finite() || self.density <= 0.0 {
            return Err(DielectricsError::InvalidTissue {
                name: self.name.clone(),
                reason: format!("density must be > 0 kg/m^3, got {}", self.density),
            });
        }
        Ok(())
    }
}

/// The surrounding medium: vacuum-equivalent air. Density is sea-level air;
/// it never enters any result because sigma = 0 forces zero absorption.
pub fn free_space() -> TissueRecord {
    TissueRecord {
        name: "Free Space".to_string(),
        dispersion: DispersionSpec::Static {
            eps_r: 1.0,
            sigma: 0.0,
        },
        density: 1.204,
        radius_mm: None,
    }
}

// ---------------------------------------------------------------------------
// Tissue database
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPole {
    delta_eps: f64,
    tau: f64,
    alpha: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTissue {
    name: String,
    model: String,
    eps_r: Option<f64>,
    sigma: Option<f64>,
    eps_inf: Option<f64>,
    sigma_static: Option<f64>,
    #[serde(default)]
    poles: Vec<RawPole>,
    density: f64,
    radius_mm: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawDb {
    #[serde(default)]
    tissue: Vec<RawTissue>,
}

/// An ordered collection of uniquely named tissue records.
#[derive(Debug, Clone)]
pub struct TissueDb {
    records: Vec<TissueRecord>,
}

impl TissueDb {
    /// Parse a database document (TOML, `[[tissue]]` records). Rejects
    /// unknown keys, duplicate names, and out-of-range parameters.
    pub fn from_toml_str(doc: &str) -> Result<Self, DielectricsError> {
        let raw: RawDb =
            toml::from_str(doc).map_err(|e| DielectricsError::Parse(e.to_string()))?;
        let mut records = Vec::with_capacity(raw.tissue.len());
        for rt in raw.tissue {
            let dispersion = match rt.model.as_str() {
                "static" => {
                    let eps_r = rt.eps_r.ok_or_else(|| DielectricsError::InvalidTissue {
                        name: rt.name.clone(),
                        reason: "static model requires eps_r".into(),
                    })?;
                    let sigma = rt.sigma.ok_or_else(|| DielectricsError::InvalidTissue {
                        name: rt.name.clone(),
                        reason: "static model requires sigma".into(),
                    })?;
                    if rt.eps_inf.is_some() || rt.sigma_static.is_some() || !rt.poles.is_empty() {
                        return Err(DielectricsError::InvalidTissue {
                            name: rt.name.clone(),
                            reason: "static model must not carry cole-cole fields".into(),
                        });
                    }
                    DispersionSpec::Static { eps_r, sigma }
                }
                "cole-cole" => {
                    let eps_inf = rt.eps_inf.ok_or_else(|| DielectricsError::InvalidTissue {
                        name: rt.name.clone(),
                        reason: "cole-cole model requires eps_inf".into(),
                    })?;
                    let sigma_static =
                        rt.sigma_static
                            .ok_or_else(|| DielectricsError::InvalidTissue {
                                name: rt.name.clone(),
                                reason: "cole-cole model requires sigma_static".into(),
                            })?;
                    if rt.eps_r.is_some() || rt.sigma.is_some() {
                        return Err(DielectricsError::InvalidTissue {
                            name: rt.name.clone(),
                            reason: "cole-cole model must not carry static fields".into(),
                        });
                    }
                    DispersionSpec::ColeCole {
                        eps_inf,
                        poles: rt
                            .poles
                            .into_iter()
                            .map(|p| RelaxationPole {
                                delta_eps: p.delta_eps,
                                tau: p.tau,
                                alpha: p.alpha,
                            })
                            .collect(),
                        sigma_static,
                    }
                }
                other => {
                    return Err(DielectricsError::InvalidTissue {
                        name: rt.name.clone(),
                        reason: format!("unknown model `{other}` (expected static or cole-cole)"),
                    })
                }
            };
            records.push(TissueRecord {
                name: rt.name,
                dispersion,
                density: rt.density,
                radius_mm: rt.radius_mm,
            });
        }
        Self::from_records(records)
    }

    /// Build from in-memory records, enforcing validity and unique names.
    pub fn from_records(records: Vec<TissueRecord>) -> Result<Self, DielectricsError> {
        for r in &records {
            r.check()?;
        }
        for (i, r) in records.iter().enumerate() {
            if records[..i].iter().any(|p| p.name == r.name) {
                return Err(DielectricsError::DuplicateTissue(r.name.clone()));
            }
        }
        Ok(TissueDb { records })
    }

    /// The database shipped with the crate: the seven head tissues plus the
    /// tumour contrast material.
    pub fn builtin() -> Self {
        Self::from_toml_str(include_str!("../data/tissues.toml"))
            .expect("shipped tissue database must be valid")
    }

    pub fn get(&self, name: &str) -> Option<&TissueRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&TissueRecord, DielectricsError> {
        self.get(name)
            .ok_or_else(|| DielectricsError::UnknownTissue(name.to_string()))
    }

    pub fn records(&self) -> &[TissueRecord] {
        &self.records
    }
}

// ---------------------------------------------------------------------------
// Layered geometry
// ---------------------------------------------------------------------------

/// One homogeneous slab.
#[derive(Debug, Clone)]
pub struct Layer {
    pub tissue: TissueRecord,
    /// Thickness along the propagation axis, meters.
    pub thickness: f64,
}

/// An ordered stratification of layers, bounded on both sides by the same
/// semi-infinite medium (free space unless overridden).
#[derive(Debug, Clone)]
pub struct LayerStack {
    pub layers: Vec<Layer>,
    pub bounding: TissueRecord,
}

impl LayerStack {
    /// Stack in free space. Every thickness must be strictly positive.
    pub fn in_free_space(layers: Vec<Layer>) -> Result<Self, DielectricsError> {
        Self::new(layers, free_space())
    }

    pub fn new(layers: Vec<Layer>, bounding: TissueRecord) -> Result<Self, DielectricsError> {
        for (index, l) in layers.iter().enumerate() {
            if !l.thickness.is_finite() || l.thickness <= 0.0 {
                return Err(DielectricsError::BadThickness {
                    index,
                    thickness_m: l.thickness,
                });
            }
            l.tissue.check()?;
        }
        bounding.check()?;
        Ok(LayerStack { layers, bounding })
    }

    /// Total thickness, meters.
    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    /// Depth of each interface from the front face, meters; length is
    /// `layers.len() + 1` (starts at 0, ends at the total thickness).
    pub fn interface_depths(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.layers.len() + 1);
        let mut z = 0.0;
        out.push(z);
        for l in &self.layers {
            z += l.thickness;
            out.push(z);
        }
        out
    }

    /// Index of the layer containing depth `z` (meters from the front face).
    /// Interfaces belong to the deeper layer; the back face belongs to the
    /// last layer. `None` when `z` is outside `[0, total]` or the stack is
    /// empty.
    pub fn layer_index_at(&self, z: f64) -> Option<usize> {
        if self.layers.is_empty() || z < 0.0 {
            return None;
        }
        let mut z0 = 0.0;
        for (i, l) in self.layers.iter().enumerate() {
            if z < z0 + l.thickness {
                return Some(i);
            }
            z0 += l.thickness;
        }
        // Half-open scan leaves exactly the back face (and fp dust above it).
        if z <= z0 * (1.0 + 1e-12) {
            Some(self.layers.len() - 1)
        } else {
            None
        }
    }
}

/// Layer order and thicknesses of the default head cross-section. The last
/// layer's thickness closes the model at 50 mm total depth.
const HEAD_LAYERS_MM: [(&str, f64); 7] = [
    ("Skin", 1.35),
    ("Fat", 1.4),
    ("Skull", 5.3),
    ("Dura Mater", 0.36),
    ("CSF", 2.1),
    ("Gray Matter", 3.37),
    ("White Matter", 36.12),
];

/// Build the seven-layer head cross-section from `db`, front (skin) to back
/// (white matter), in free space. Fails if any of the seven tissue names is
/// missing from the database.
pub fn build_head_stack(db: &TissueDb) -> Result<LayerStack, DielectricsError> {
    let mut layers = Vec::with_capacity(HEAD_LAYERS_MM.len());
    for (name, mm) in HEAD_LAYERS_MM {
        layers.push(Layer {
            tissue: db.require(name)?.clone(),
            thickness: mm * 1e-3,
        });
    }
    LayerStack::in_free_space(layers)
}

/// A contrast slab to carve into a host stack.
#[derive(Debug, Clone)]
pub struct Inclusion {
    pub tissue: TissueRecord,
    /// Center of the slab, meters from the front face.
    pub center_depth: f64,
    /// Extent along the propagation axis, meters.
    pub thickness: f64,
}

/// Replace the interval `[center - t/2, center + t/2]` of `stack` with the
/// inclusion material. Host layers overlapping the interval are shortened or
/// split; hosts fully inside it are consumed. Total thickness and the
/// depth-to-tissue map outside the interval are preserved.
pub fn insert_inclusion(
    stack: &LayerStack,
    inc: &Inclusion,
) -> Result<LayerStack, DielectricsError> {
    if !inc.thickness.is_finite() || inc.thickness <= 0.0 {
        return Err(DielectricsError::BadThickness {
            index: 0,
            thickness_m: inc.thickness,
        });
    }
    inc.tissue.check()?;
    let total = stack.total_thickness();
    let lo = inc.center_depth - inc.thickness / 2.0;
    let hi = inc.center_depth + inc.thickness / 2.0;
    if lo < -SLIVER_M || hi > total + SLIVER_M {
        return Err(DielectricsError::InclusionOutOfBounds {
            lo_m: lo,
            hi_m: hi,
            total_m: total,
        });
    }

    let mut out: Vec<Layer> = Vec::with_capacity(stack.layers.len() + 2);
    let mut z0 = 0.0;
    let mut inserted = false;
    for l in &stack.layers {
        let (a, b) = (z0, z0 + l.thickness);
        z0 = b;
        if b <= lo + SLIVER_M {
            // Entirely in front of the interval.
            out.push(l.clone());
            continue;
        }
        if a >= hi - SLIVER_M {
            // Entirely behind the interval.
            if !inserted {
                // Interval boundary coincided with a host boundary.
                out.push(Layer {
                    tissue: inc.tissue.clone(),
                    thickness: inc.thickness,
                });
                inserted = true;
            }
            out.push(l.clone());
            continue;
        }
        // Overlapping: keep the part in front, emit the inclusion once, keep
        // the part behind. Sub-sliver scraps are dropped.
        if lo - a > SLIVER_M {
            out.push(Layer {
                tissue: l.tissue.clone(),
                thickness: lo - a,
            });
        }
        if !inserted {
            out.push(Layer {
                tissue: inc.tissue.clone(),
                thickness: inc.thickness,
            });
            inserted = true;
        }
        if b - hi > SLIVER_M {
            out.push(Layer {
                tissue: l.tissue.clone(),
                thickness: b - hi,
            });
        }
    }
    if !inserted {
        // Interval hugging the back face: every host ended in front of it.
        out.push(Layer {
            tissue: inc.tissue.clone(),
            thickness: inc.thickness,
        });
    }
    LayerStack::new(out, stack.bounding.clone())
}
