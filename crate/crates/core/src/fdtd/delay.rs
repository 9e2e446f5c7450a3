//! Sub-sample arrival-time estimation.
//!
//! `propagation_delay` cross-correlates two recorded series via FFT and
//! refines the integer-lag peak with a three-point parabolic fit, resolving
//! small fractions of a timestep. `group_delay` differentiates the
//! transmission phase of an extracted spectrum around a chosen frequency.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::fdtd::{FdtdError, SParamResult};

/// Delay of `rx` relative to `tx` in seconds (positive when `rx` lags),
/// estimated from the normalized cross-correlation peak with parabolic
/// sub-sample refinement. Lags past half the padded length are treated as
/// negative, so small leads are reported with their sign.
pub fn propagation_delay(tx: &[f64], rx: &[f64], dt: f64) -> Result<f64, FdtdError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(FdtdError::BadTimestep(dt));
    }
    let e_tx: f64 = tx.iter().map(|v| v * v).sum();
    let e_rx: f64 = rx.iter().map(|v| v * v).sum();
    if !(e_tx > 0.0 && e_rx > 0.0 && e_tx.is_finite() && e_rx.is_finite()) {
        return Err(FdtdError::ZeroEnergyInput);
    }

    let n_fft = (2 * tx.len().max(rx.len())).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n_fft);
    let pad = |s: &[f64]| -> Vec<Complex64> {
        s.iter()
            .map(|&v| Complex64::new(v, 0.0))
            .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
            .take(n_fft)
            .collect()
    };
    let mut sx = pad(tx);
    let mut sy = pad(rx);
    fft.process(&mut sx);
    fft.process(&mut sy);
    let mut cross: Vec<Complex64> = sx
        .iter()
        .zip(&sy)
        .map(|(x, y)| x.conj() * y)
        .collect();
    planner.plan_fft_inverse(n_fft).process(&mut cross);

    let norm = 1.0 / (n_fft as f64 * (e_tx * e_rx).sqrt());
    let corr: Vec<f64> = cross.iter().map(|c| c.re * norm).collect();

    let peak = corr
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(k, _)| k)
        .unwrap();
    let r0 = corr[peak];
    let rm = corr[(peak + n_fft - 1) % n_fft];
    let rp = corr[(peak + 1) % n_fft];
    let denom = rm - 2.0 * r0 + rp;
    let frac = if denom < 0.0 {
        (0.5 * (rm - rp) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };

    let lag = if peak > n_fft / 2 {
        peak as f64 - n_fft as f64
    } else {
        peak as f64
    };
    Ok((lag + frac) * dt)
}

/// Group delay, s, from the transmission phase slope at the stored bin
/// nearest `f_center_hz`: the centered phase difference across the two
/// neighboring bins, wrapped to (-pi, pi], over their angular-frequency
/// spacing. Needs at least three stored bins.
pub fn group_delay(sparams: &SParamResult, f_center_hz: f64) -> Result<f64, FdtdError> {
    let n = sparams.frequencies.len();
    if n < 3 {
        return Err(FdtdError::FrequencyOutOfBand {
            frequency_hz: f_center_hz,
            lo_hz: sparams.band.0,
            hi_hz: sparams.band.1,
        });
    }
    let k = sparams.nearest_index(f_center_hz)?.clamp(1, n - 2);
    let dphi = (sparams.s21[k + 1] * sparams.s21[k - 1].conj()).arg();
    let domega = std::f64::consts::TAU * (sparams.frequencies[k + 1] - sparams.frequencies[k - 1]);
    Ok(-dphi / domega)
}
