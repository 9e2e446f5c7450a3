//! Frequency-domain transfer-matrix solver for a plane wave at normal
//! incidence on a layered slab.
//!
//! Fields in every medium are a superposition of a forward and a backward
//! wave, `E(z) = A e^{-jkz} + B e^{+jkz}` with `k = k0 sqrt(eps)` taken on
//! the principal branch (`Re k >= 0`, `Im k <= 0` for passive media).
//! Matching E and H across each interface gives a 2x2 transfer matrix in
//! the `(A, B)` amplitudes; chaining interface and intra-layer propagation
//! matrices yields the complex reflection coefficient at the front face,
//! the transmission coefficient into the back half-space, and — by
//! back-substitution — the amplitude pair inside every layer, from which
//! the standing-wave field profile is reconstructed.
//!
//! Power accounting: with reflectance `R = |gamma|^2` and transmittance
//! `T = |t|^2 Re(1/eta_back) / Re(1/eta_front)`, the absorbed fraction is
//! `A = 1 - R - T`; it is non-negative for passive stacks.

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::{C0, ETA0};
use crate::dielectrics::{DielectricsError, LayerStack};

#[derive(Debug, Error)]
pub enum TmmError {
    #[error(transparent)]
    Dielectrics(#[from] DielectricsError),
    #[error("reflection magnitude {magnitude} exceeds unity; not a passive reflection")]
    ReflectionExceedsUnity { magnitude: f64 },
    #[error("standing-wave ratio is undefined for total reflection (|gamma| = 1)")]
    TotalReflection,
    #[error("profile step {dz_m} m is coarser than a quarter of the thinnest layer ({max_m} m)")]
    StepTooCoarse { dz_m: f64, max_m: f64 },
    #[error("field profile requires at least one layer")]
    EmptyStack,
    #[error("profile step must be positive and finite, got {0} m")]
    BadStep(f64),
}

/// Principal complex refractive index `sqrt(eps)`: `Re >= 0`, and `Im <= 0`
/// whenever the medium is passive.
pub fn refractive_index(eps: Complex64) -> Complex64 {
    eps.sqrt()
}

/// Intrinsic wave impedance `eta0 / sqrt(eps)`, ohms.
pub fn wave_impedance(eps: Complex64) -> Complex64 {
    ETA0 / refractive_index(eps)
}

/// Complex wavenumber `k = (w/c) sqrt(eps)`, rad/m; the forward wave is
/// `e^{-jkz}`, so `Im k <= 0` means decay.
pub fn wavenumber(eps: Complex64, f: f64) -> Complex64 {
    let k0 = 2.0 * std::f64::consts::PI * f / C0;
    k0 * refractive_index(eps)
}

/// Propagation constant `gamma = jk = alpha + j beta`: `alpha` is the
/// attenuation in Np/m (`>= 0` for passive media), `beta` the phase
/// constant in rad/m.
pub fn propagation_constant(eps: Complex64, f: f64) -> Complex64 {
    Complex64::i() * wavenumber(eps, f)
}

/// Return loss in dB for a reflection coefficient. Infinite for a perfect
/// match; magnitudes a hair above 1 (floating-point dust) are clamped,
/// anything further is rejected.
pub fn return_loss(gamma: Complex64) -> Result<f64, TmmError> {
    let m = gamma.norm();
    if m > 1.0 + 1e-9 {
        return Err(TmmError::ReflectionExceedsUnity { magnitude: m });
    }
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-20.0 * m.min(1.0).log10())
}

/// Voltage standing-wave ratio `(1 + |gamma|) / (1 - |gamma|)`. Undefined
/// (error) at total reflection.
pub fn vswr(gamma: Complex64) -> Result<f64, TmmError> {
    let m = gamma.norm();
    if m > 1.0 + 1e-9 {
        return Err(TmmError::ReflectionExceedsUnity { magnitude: m });
    }
    let m = m.min(1.0);
    if m == 1.0 {
        return Err(TmmError::TotalReflection);
    }
    Ok((1.0 + m) / (1.0 - m))
}

/// Wave amplitudes inside one layer, referenced to the layer's front face.
#[derive(Debug, Clone)]
pub struct LayerWave {
    /// Depth of the layer's front face below the stack front face, m.
    pub start: f64,
    /// Layer thickness, m.
    pub thickness: f64,
    /// Complex wavenumber inside the layer, rad/m.
    pub k: Complex64,
    /// Forward amplitude at the front face (unit incident amplitude).
    pub a: Complex64,
    /// Backward amplitude at the front face.
    pub b: Complex64,
}

impl LayerWave {
    /// Field at local depth `zeta` (m) from the layer's front face.
    pub fn field(&self, zeta: f64) -> Complex64 {
        let ph = Complex64::new(0.0, -1.0) * self.k * zeta;
        self.a * ph.exp() + self.b * (-ph).exp()
    }
}

/// Steady-state solution for one frequency: front-face reflection,
/// transmission into the back half-space, and amplitudes in every layer.
#[derive(Debug, Clone)]
pub struct PlaneWaveSolution {
    pub frequency: f64,
    /// Complex reflection coefficient at the front face.
    pub gamma: Complex64,
    /// Complex field transmission into the back bounding medium.
    pub t: Complex64,
    pub layers: Vec<LayerWave>,
    /// Total slab thickness, m.
    pub total_thickness: f64,
    /// Re(1/eta) of the back bounding medium over that of the front; scales
    /// |t|^2 into transmitted power.
    admittance_ratio: f64,
}

impl PlaneWaveSolution {
    /// Reflected power fraction.
    pub fn reflectance(&self) -> f64 {
        self.gamma.norm_sqr()
    }

    /// Transmitted power fraction.
    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr() * self.admittance_ratio
    }

    /// Absorbed power fraction, by conservation.
    pub fn absorbance(&self) -> f64 {
        1.0 - self.reflectance() - self.transmittance()
    }

    /// Sample the complex field on a uniform depth grid across the slab.
    /// `dz` must resolve the thinnest layer with at least four samples so
    /// no layer is skipped.
    pub fn field_profile(&self, dz: f64) -> Result<FieldProfile, TmmError> {
        if self.layers.is_empty() {
            return Err(TmmError::EmptyStack);
        }
        if !dz.is_finite() || dz <= 0.0 {
            return Err(TmmError::BadStep(dz));
        }
        let thinnest = self
            .layers
            .iter()
            .map(|l| l.thickness)
            .fold(f64::INFINITY, f64::min);
        if dz > thinnest / 4.0 {
            return Err(TmmError::StepTooCoarse {
                dz_m: dz,
                max_m: thinnest / 4.0,
            });
        }
        let n = (self.total_thickness / dz + 1e-9).floor() as usize + 1;
        let mut z = Vec::with_capacity(n);
        let mut e = Vec::with_capacity(n);
        let mut layer = Vec::with_capacity(n);
        let mut li = 0usize;
        for i in 0..n {
            let zi = (i as f64 * dz).min(self.total_thickness);
            // Interfaces belong to the deeper layer.
            while li + 1 < self.layers.len()
                && zi >= self.layers[li].start + self.layers[li].thickness
            {
                li += 1;
            }
            let lw = &self.layers[li];
            z.push(zi);
            e.push(lw.field(zi - lw.start));
            layer.push(li);
        }
        Ok(FieldProfile {
            frequency: self.frequency,
            dz,
            z,
            e,
            layer,
        })
    }
}

/// Depth-sampled complex field across the slab at one frequency, with the
/// index of the layer each sample falls in.
#[derive(Debug, Clone)]
pub struct FieldProfile {
    pub frequency: f64,
    pub dz: f64,
    /// Sample depths from the front face, m.
    pub z: Vec<f64>,
    /// Complex field per sample, unit incident amplitude.
    pub e: Vec<Complex64>,
    /// Index into the solved stack's layer list per sample.
    pub layer: Vec<usize>,
}

impl FieldProfile {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.e.iter().map(|c| c.norm()).collect()
    }
}

#[derive(Clone, Copy)]
struct Mat2 {
    m11: Complex64,
    m12: Complex64,
    m21: Complex64,
    m22: Complex64,
}

impl Mat2 {
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2 {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }

    fn apply(self, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
        (
            self.m11 * v.0 + self.m12 * v.1,
            self.m21 * v.0 + self.m22 * v.1,
        )
    }
}

/// Interface matrix taking amplitudes on the `b` side to the `a` side.
fn interface(eta_a: Complex64, eta_b: Complex64) -> Mat2 {
    let p = eta_a / eta_b;
    let half = Complex64::new(0.5, 0.0);
    Mat2 {
        m11: half * (1.0 + p),
        m12: half * (1.0 - p),
        m21: half * (1.0 - p),
        m22: half * (1.0 + p),
    }
}

/// Propagation matrix taking exit-face amplitudes to entry-face amplitudes
/// across thickness `d`.
fn propagation(k: Complex64, d: f64) -> Mat2 {
    let ph = (Complex64::i() * k * d).exp();
    Mat2 {
        m11: ph,
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: 1.0 / ph,
    }
}

/// Solve the stack at frequency `f` (Hz) for unit incident amplitude
/// arriving from the front bounding medium.
pub fn solve_stack(stack: &LayerStack, f: f64) -> Result<PlaneWaveSolution, TmmError> {
    let eps_bound = stack.bounding.complex_permittivity(f)?;
    let eta_bound = wave_impedance(eps_bound);

    let mut etas = Vec::with_capacity(stack.layers.len() + 2);
    let mut ks = Vec::with_capacity(stack.layers.len());
    etas.push(eta_bound);
    for l in &stack.layers {
        let eps = l.tissue.complex_permittivity(f)?;
        etas.push(wave_impedance(eps));
        ks.push(wavenumber(eps, f));
    }
    etas.push(eta_bound);

    // Forward chain for the overall matrix.
    let n = stack.layers.len();
    let mut m = interface(etas[0], etas[1]);
    for i in 0..n {
        m = m
            .mul(propagation(ks[i], stack.layers[i].thickness))
            .mul(interface(etas[i + 1], etas[i + 2]));
    }
    let t = 1.0 / m.m11;
    let gamma = m.m21 / m.m11;

    // Back-substitute for per-layer amplitudes at each layer's front face.
    let mut coeffs = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); n];
    let mut v = (t, Complex64::new(0.0, 0.0));
    for i in (0..n).rev() {
        let exit = interface(etas[i + 1], etas[i + 2]).apply(v);
        v = propagation(ks[i], stack.layers[i].thickness).apply(exit);
        coeffs[i] = v;
    }

    let starts = stack.interface_depths();
    let layers = stack
        .layers
        .iter()
        .enumerate()
        .map(|(i, l)| LayerWave {
            start: starts[i],
            thickness: l.thickness,
            k: ks[i],
            a: coeffs[i].0,
            b: coeffs[i].1,
        })
        .collect();

    // Same bounding medium on both faces, so the admittance ratio is exactly
    // one; kept in the solution so power accounting stays explicit.
    let ratio = (1.0 / etas[n + 1]).re / (1.0 / etas[0]).re;

    Ok(PlaneWaveSolution {
        frequency: f,
        gamma,
        t,
        layers,
        total_thickness: stack.total_thickness(),
        admittance_ratio: ratio,
    })
}
