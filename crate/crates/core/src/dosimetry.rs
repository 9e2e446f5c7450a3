//! Specific absorption rate (SAR) along the depth axis.
//!
//! For a peak field envelope `E(z)` (V/m) in tissue with effective
//! conductivity `sigma` (S/m) and mass density `rho` (kg/m^3),
//!
//! ```text
//! SAR(z) = sigma(z) |E(z)|^2 / (2 rho(z))      [W/kg]
//! ```
//!
//! The factor 2 converts the peak envelope to an RMS value for sinusoidal
//! steady state. Samples outside the slab (air) absorb nothing and carry
//! zero SAR.

use thiserror::Error;

use crate::constants::EPS0;
use crate::dielectrics::{DielectricsError, LayerStack};
use crate::tmm::FieldProfile;

#[derive(Debug, Error)]
pub enum DosimetryError {
    #[error(transparent)]
    Dielectrics(#[from] DielectricsError),
    #[error("depth and envelope arrays differ in length ({z} vs {e})")]
    MismatchedLengths { z: usize, e: usize },
    #[error("SAR limit must be positive and finite, got {0} W/kg")]
    BadLimit(f64),
    #[error("depth samples must be strictly increasing (index {0})")]
    UnsortedDepths(usize),
}

/// Depth-sampled SAR with the tissue each sample falls in.
#[derive(Debug, Clone)]
pub struct SarProfile {
    /// Sample depths from the slab front face, m.
    pub z: Vec<f64>,
    /// SAR per sample, W/kg.
    pub sar: Vec<f64>,
    /// Name of the tissue at each sample (bounding medium outside the slab).
    pub tissue: Vec<String>,
}

/// Location and size of the SAR maximum. Ties resolve to the shallowest
/// depth.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSar {
    pub depth_m: f64,
    pub sar_w_per_kg: f64,
    pub tissue: String,
}

/// A maximal contiguous run of samples exceeding a SAR limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplianceInterval {
    /// Depth of the first offending sample, m.
    pub start_m: f64,
    /// Depth of the last offending sample, m.
    pub end_m: f64,
    /// Largest SAR inside the run, W/kg.
    pub peak_w_per_kg: f64,
}

/// SAR from a frequency-domain field profile, using each layer's effective
/// conductivity at the profile frequency (`sigma_eff = -w eps0 Im eps`), so
/// relaxation losses count for dispersive tissues. `amplitude` scales the
/// unit-incident profile to physical V/m; SAR scales with its square.
pub fn sar_profile(
    field: &FieldProfile,
    stack: &LayerStack,
    amplitude: f64,
) -> Result<SarProfile, DosimetryError> {
    let w = 2.0 * std::f64::consts::PI * field.frequency;
    // Per-layer (sigma_eff / 2 rho, name), computed once.
    let mut factors = Vec::with_capacity(stack.layers.len());
    for l in &stack.layers {
        let eps = l.tissue.complex_permittivity(field.frequency)?;
        let sigma_eff = -w * EPS0 * eps.im;
        factors.push((sigma_eff / (2.0 * l.tissue.density), l.tissue.name.clone()));
    }
    let scale = amplitude * amplitude;
    let mut sar = Vec::with_capacity(field.e.len());
    let mut tissue = Vec::with_capacity(field.e.len());
    for (e, &li) in field.e.iter().zip(&field.layer) {
        let (f, name) = &factors[li];
        sar.push(scale * (f * e.norm_sqr()));
        tissue.push(name.clone());
    }
    Ok(SarProfile {
        z: field.z.clone(),
        sar,
        tissue,
    })
}

/// SAR from a time-domain peak envelope sampled at arbitrary depths. Uses
/// each tissue's static conductivity — the loss model of the time-domain
/// engine. Depths outside `[0, total]` are air: zero SAR, bounding name.
pub fn sar_from_envelope(
    z: &[f64],
    e_peak: &[f64],
    stack: &LayerStack,
) -> Result<SarProfile, DosimetryError> {
    if z.len() != e_peak.len() {
        return Err(DosimetryError::MismatchedLengths {
            z: z.len(),
            e: e_peak.len(),
        });
    }
    let mut sar = Vec::with_capacity(z.len());
    let mut tissue = Vec::with_capacity(z.len());
    for (&zi, &ei) in z.iter().zip(e_peak) {
        match stack.layer_index_at(zi) {
            Some(li) => {
                let t = &stack.layers[li].tissue;
                sar.push(t.dispersion.sigma_static() * ei * ei / (2.0 * t.density));
                tissue.push(t.name.clone());
            }
            None => {
                sar.push(0.0);
                tissue.push(stack.bounding.name.clone());
            }
        }
    }
    Ok(SarProfile {
        z: z.to_vec(),
        sar,
        tissue,
    })
}

/// The profile's maximum. `None` for an empty profile. Equal maxima resolve
/// to the smallest depth.
pub fn peak_sar(profile: &SarProfile) -> Option<PeakSar> {
    let mut best: Option<usize> = None;
    for (i, &s) in profile.sar.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if s > profile.sar[b] => best = Some(i),
            _ => {}
        }
    }
    best.map(|i| PeakSar {
        depth_m: profile.z[i],
        sar_w_per_kg: profile.sar[i],
        tissue: profile.tissue[i].clone(),
    })
}

/// Maximal runs of samples with SAR strictly above `limit` (W/kg), in depth
/// order. Requires strictly increasing depths.
pub fn compliance_check(
    profile: &SarProfile,
    limit: f64,
) -> Result<Vec<ComplianceInterval>, DosimetryError> {
    if !limit.is_finite() || limit <= 0.0 {
        return Err(DosimetryError::BadLimit(limit));
    }
    for i in 1..profile.z.len() {
        if profile.z[i] <= profile.z[i - 1] {
            return Err(DosimetryError::UnsortedDepths(i));
        }
    }
    let mut out = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for (i, &s) in profile.sar.iter().enumerate() {
        if s > limit {
            run = Some(match run {
                None => (i, i),
                Some((a, _)) => (a, i),
            });
        } else if let Some((a, b)) = run.take() {
            out.push(make_interval(profile, a, b));
        }
    }
    if let Some((a, b)) = run {
        out.push(make_interval(profile, a, b));
    }
    Ok(out)
}

fn make_interval(profile: &SarProfile, a: usize, b: usize) -> ComplianceInterval {
    let peak = profile.sar[a..=b]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    ComplianceInterval {
        start_m: profile.z[a],
        end_m: profile.z[b],
        peak_w_per_kg: peak,
    }
}
