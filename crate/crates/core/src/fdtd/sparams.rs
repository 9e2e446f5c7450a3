//! Scattering parameters by spectral division of two runs.
//!
//! A device run (stack in place) and a reference run (same grid with the
//! stack removed) are transformed with a zero-padded FFT. Dividing the
//! reflected-wave spectrum at the Tx probe by the incident-wave spectrum
//! at the Rx probe, then unwinding the probe-to-face air paths, yields the
//! reflection coefficient referenced at the front face of the stack.
//! Dividing the device and reference Rx spectra and unwinding the
//! equal-length vacuum path yields the front-face-to-back-face
//! transmission coefficient, directly comparable to the frequency-domain
//! solver's outputs.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::constants::C0;
use crate::fdtd::{FdtdError, SimulationRun};

const TAU: f64 = std::f64::consts::TAU;
/// Tolerance on the passivity bound: spectral leakage and boundary residue
/// may push a unit magnitude a hair above one.
const PASSIVE_SLACK: f64 = 1e-3;

/// Band-limited reflection and transmission spectra of one device run.
#[derive(Debug, Clone)]
pub struct SParamResult {
    /// Stored bin frequencies, Hz, ascending, all within `band`.
    pub frequencies: Vec<f64>,
    /// Reflection coefficient at the stack's front face.
    pub s11: Vec<Complex64>,
    /// Transmission coefficient, front face to back face.
    pub s21: Vec<Complex64>,
    /// Nominal source band (lower, upper), Hz.
    pub band: (f64, f64),
}

impl SParamResult {
    /// Index of the stored bin nearest to `f_hz`.
    pub fn nearest_index(&self, f_hz: f64) -> Result<usize, FdtdError> {
        if self.frequencies.is_empty() || f_hz < self.band.0 || f_hz > self.band.1 {
            return Err(FdtdError::FrequencyOutOfBand {
                frequency_hz: f_hz,
                lo_hz: self.band.0,
                hi_hz: self.band.1,
            });
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, &f) in self.frequencies.iter().enumerate() {
            let d = (f - f_hz).abs();
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        Ok(best)
    }

    /// The stored bin nearest to `f_hz`: (bin frequency, s11, s21).
    pub fn at(&self, f_hz: f64) -> Result<(f64, Complex64, Complex64), FdtdError> {
        let k = self.nearest_index(f_hz)?;
        Ok((self.frequencies[k], self.s11[k], self.s21[k]))
    }

    /// |s11| in dB at the bin nearest to `f_hz`.
    pub fn s11_db(&self, f_hz: f64) -> Result<f64, FdtdError> {
        let (_, s11, _) = self.at(f_hz)?;
        Ok(20.0 * s11.norm().log10())
    }

    /// |s21| in dB at the bin nearest to `f_hz`.
    pub fn s21_db(&self, f_hz: f64) -> Result<f64, FdtdError> {
        let (_, _, s21) = self.at(f_hz)?;
        Ok(20.0 * s21.norm().log10())
    }
}

fn spectrum(series: &[f64], n_fft: usize, planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = series
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(n_fft)
        .collect();
    planner.plan_fft_forward(n_fft).process(&mut buf);
    buf
}

/// Compute band-limited s11/s21 from a device run and its vacuum reference.
pub fn extract_sparams(
    device: &SimulationRun,
    reference: &SimulationRun,
) -> Result<SParamResult, FdtdError> {
    if !reference.grid.is_vacuum() {
        return Err(FdtdError::ReferenceNotVacuum);
    }
    let (dg, rg) = (&device.grid, &reference.grid);
    if dg.dz != rg.dz || dg.dt != rg.dt {
        return Err(FdtdError::MismatchedRuns(
            "grid step or timestep differ".into(),
        ));
    }
    if dg.node_count() != rg.node_count()
        || dg.source_index != rg.source_index
        || dg.tx_index != rg.tx_index
        || dg.rx_index != rg.rx_index
    {
        return Err(FdtdError::MismatchedRuns(
            "grid extents or probe placement differ".into(),
        ));
    }
    if device.tx.len() != reference.tx.len() {
        return Err(FdtdError::MismatchedRuns(format!(
            "recorded lengths differ ({} vs {} steps)",
            device.tx.len(),
            reference.tx.len()
        )));
    }
    if device.source.samples != reference.source.samples {
        return Err(FdtdError::MismatchedRuns(
            "the two runs used different excitations".into(),
        ));
    }

    let len = device.tx.len();
    let n_fft = (4 * len).next_power_of_two().max(65_536);
    let dt = dg.dt;
    let mut planner = FftPlanner::new();

    let reflected: Vec<f64> = device
        .tx
        .iter()
        .zip(&reference.tx)
        .map(|(&d, &r)| d - r)
        .collect();
    let sp_refl = spectrum(&reflected, n_fft, &mut planner);
    let sp_thru = spectrum(&device.rx, n_fft, &mut planner);
    let sp_inc = spectrum(&reference.rx, n_fft, &mut planner);

    let band = device.source.band_edges();
    let z_tx = dg.node_position(dg.tx_index);
    let z_rx = dg.node_position(dg.rx_index);
    let z_front = dg.node_position(dg.stack_start_index);
    let span = (dg.stack_end_index - dg.stack_start_index) as f64 * dg.dz;

    let mut frequencies = Vec::new();
    let mut s11 = Vec::new();
    let mut s21 = Vec::new();
    for k in 1..n_fft / 2 {
        let f = k as f64 / (n_fft as f64 * dt);
        if f < band.0 || f > band.1 {
            continue;
        }
        let k0 = TAU * f / C0;
        let raw11 = sp_refl[k] / sp_inc[k];
        let raw21 = sp_thru[k] / sp_inc[k];
        let g = raw11 * Complex64::from_polar(1.0, k0 * (2.0 * z_front - z_tx - z_rx));
        let t = raw21 * Complex64::from_polar(1.0, -k0 * span);
        for (which, v) in [("s11", g), ("s21", t)] {
            if v.norm() > 1.0 + PASSIVE_SLACK {
                return Err(FdtdError::NonPhysicalSParams {
                    which,
                    frequency_hz: f,
                    magnitude: v.norm(),
                });
            }
        }
        frequencies.push(f);
        s11.push(g);
        s21.push(t);
    }

    Ok(SParamResult {
        frequencies,
        s11,
        s21,
        band,
    })
}
