//! Gaussian-modulated sinusoidal excitation.
//!
//! The waveform is `s(t) = A exp(-((t-t0)/tau)^2) sin(2 pi f0 (t-t0))` with
//! `tau = sqrt(2 ln 10) / (pi B)`, which places the two-sided −10 dB width
//! of the spectral lobe at `B`, and `t0 = 4.5 tau` so the turn-on tail is
//! ~1.6e-9 of the peak. The sine factor is odd about `t0`, so the spectrum
//! has a null at DC.

use crate::fdtd::FdtdError;
use std::f64::consts::PI;

/// Excitation family. The two presets nail down center frequency and
/// bandwidth; `Custom` accepts any band that stays clear of DC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    /// Narrowband resonant-antenna stand-in: 2.45 GHz center, 0.5 GHz band.
    PatchLike,
    /// Full-band travelling-wave stand-in: 2.75 GHz center, 4.5 GHz band
    /// (spanning 0.5–5 GHz).
    VivaldiLike,
    Custom,
}

impl SourceKind {
    /// (f0, bandwidth) in Hz for the presets.
    pub fn preset_parameters(self) -> Option<(f64, f64)> {
        match self {
            SourceKind::PatchLike => Some((2.45e9, 0.5e9)),
            SourceKind::VivaldiLike => Some((2.75e9, 4.5e9)),
            SourceKind::Custom => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SourceKind::PatchLike => "patch-like",
            SourceKind::VivaldiLike => "vivaldi-like",
            SourceKind::Custom => "custom",
        }
    }
}

impl std::str::FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "patch-like" => Ok(SourceKind::PatchLike),
            "vivaldi-like" => Ok(SourceKind::VivaldiLike),
            "custom" => Ok(SourceKind::Custom),
            other => Err(format!(
                "unknown source kind `{other}` (expected patch-like, vivaldi-like, or custom)"
            )),
        }
    }
}

impl std::fmt::Display for SourceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A synthesized excitation: parameters plus the series sampled at the
/// simulation timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceWaveform {
    pub kind: SourceKind,
    /// Center frequency, Hz.
    pub f0: f64,
    /// Two-sided −10 dB bandwidth, Hz.
    pub bandwidth: f64,
    /// Peak field amplitude, V/m.
    pub amplitude: f64,
    /// Sampling step, s.
    pub dt: f64,
    /// Gaussian width, s.
    pub tau: f64,
    /// Envelope center, s; the waveform support is `[0, 2 t0]`.
    pub t0: f64,
    /// `s(k dt)` for `k dt` within the support.
    pub samples: Vec<f64>,
}

impl SourceWaveform {
    /// Analytic waveform value at any time (vanishingly small outside the
    /// sampled support).
    pub fn evaluate(&self, t: f64) -> f64 {
        let u = (t - self.t0) / self.tau;
        self.amplitude * (-u * u).exp() * (2.0 * PI * self.f0 * (t - self.t0)).sin()
    }

    /// Length of the sampled support, s.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    /// Nominal −10 dB band edges (f_lo, f_hi), Hz.
    pub fn band_edges(&self) -> (f64, f64) {
        (self.f0 - self.bandwidth / 2.0, self.f0 + self.bandwidth / 2.0)
    }

    /// Convenience constructor for a preset kind.
    pub fn preset(kind: SourceKind, amplitude: f64, dt: f64) -> Result<Self, FdtdError> {
        let (f0, bw) = kind
            .preset_parameters()
            .expect("preset() requires a preset kind");
        synthesize_source(kind, f0, bw, amplitude, dt)
    }
}

/// Build the excitation. Preset kinds must be called with their own nominal
/// `f0`/`bandwidth` (use [`SourceWaveform::preset`] to fill them in); the
/// band must sit strictly above DC (`f0 > bandwidth/2 > 0`).
pub fn synthesize_source(
    kind: SourceKind,
    f0: f64,
    bandwidth: f64,
    amplitude: f64,
    dt: f64,
) -> Result<SourceWaveform, FdtdError> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(FdtdError::BadTimestep(dt));
    }
    if !amplitude.is_finite() || amplitude < 0.0 {
        return Err(FdtdError::BadAmplitude(amplitude));
    }
    if !f0.is_finite() || !bandwidth.is_finite() || f0 <= 0.0 || bandwidth <= 0.0 || f0 <= bandwidth / 2.0 {
        return Err(FdtdError::BandTouchesDc {
            lo_hz: f0 - bandwidth / 2.0,
            hi_hz: f0 + bandwidth / 2.0,
        });
    }
    if let Some((pf0, pbw)) = kind.preset_parameters() {
        if f0 != pf0 || bandwidth != pbw {
            return Err(FdtdError::PresetParameterMismatch {
                expected_f0_hz: pf0,
                expected_bw_hz: pbw,
                f0_hz: f0,
                bw_hz: bandwidth,
            });
        }
    }
    let tau = (2.0 * 10f64.ln()).sqrt() / (PI * bandwidth);
    let t0 = 4.5 * tau;
    let n = (2.0 * t0 / dt).floor() as usize + 1;
    let mut wf = SourceWaveform {
        kind,
        f0,
        bandwidth,
        amplitude,
        dt,
        tau,
        t0,
        samples: Vec::with_capacity(n),
    };
    for k in 0..n {
        let s = wf.evaluate(k as f64 * dt);
        wf.samples.push(s);
    }
    Ok(wf)
}
