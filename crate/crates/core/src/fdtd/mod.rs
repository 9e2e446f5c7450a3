//! 1-D finite-difference time-domain engine: pulsed plane-wave propagation
//! through a discretized layer stack, with S-parameter extraction by
//! spectral division and sub-sample propagation-delay estimation.
//!
//! The solver is a standard staggered-grid scheme (E at integer nodes, H at
//! half nodes) with a conductivity term, a total-field/scattered-field
//! source plane, and first-order absorbing terminations. Media are
//! non-dispersive here — each cell carries a constant `eps_r` and `sigma`;
//! frequency-dependent permittivity is exact only in the frequency-domain
//! solver.

mod delay;
mod engine;
mod grid;
mod source;
mod sparams;

pub use delay::{group_delay, propagation_delay};
pub use engine::{run, GateWindows, SimulationRun};
pub use grid::{
    auto_step, discretize, discretize_with_step, snap_stack, BindingRule, BoundaryKind, Grid1D,
    StepChoice,
};
pub use source::{synthesize_source, SourceKind, SourceWaveform};
pub use sparams::{extract_sparams, SParamResult};

use thiserror::Error;

use crate::dielectrics::DielectricsError;

#[derive(Debug, Error)]
pub enum FdtdError {
    #[error(transparent)]
    Dielectrics(#[from] DielectricsError),
    #[error("source band [{lo_hz}, {hi_hz}] Hz extends to or through DC")]
    BandTouchesDc { lo_hz: f64, hi_hz: f64 },
    #[error(
        "preset expects f0 {expected_f0_hz} Hz / bandwidth {expected_bw_hz} Hz, got {f0_hz} / {bw_hz}"
    )]
    PresetParameterMismatch {
        expected_f0_hz: f64,
        expected_bw_hz: f64,
        f0_hz: f64,
        bw_hz: f64,
    },
    #[error("timestep must be positive and finite, got {0} s")]
    BadTimestep(f64),
    #[error("source amplitude must be non-negative and finite, got {0} V/m")]
    BadAmplitude(f64),
    #[error("standoff must be non-negative and finite, got {0} m")]
    BadStandoff(f64),
    #[error("step override {dz_m} m must be positive and no coarser than the automatic {max_m} m")]
    BadStepOverride { dz_m: f64, max_m: f64 },
    #[error("source sampled at {got_s} s but the grid timestep is {expected_s} s")]
    TimestepMismatch { expected_s: f64, got_s: f64 },
    #[error("layer {index} spans fewer than two cells ({thickness_m} m at dz = {dz_m} m)")]
    LayerTooThin {
        index: usize,
        thickness_m: f64,
        dz_m: f64,
    },
    #[error("duration {got_s} s is shorter than three two-way grid transits ({minimum_s} s)")]
    DurationTooShort { minimum_s: f64, got_s: f64 },
    #[error("timestep {dt_s} s violates the stability bound {limit_s} s")]
    StabilityBound { dt_s: f64, limit_s: f64 },
    #[error("field energy grew past 1.01x its historical peak at step {step}; unstable")]
    Unstable { step: usize },
    #[error("reference run must be the vacuum (stack removed) run")]
    ReferenceNotVacuum,
    #[error("reference and device runs differ: {0}")]
    MismatchedRuns(String),
    #[error("in-band |{which}| = {magnitude} at {frequency_hz} Hz exceeds the passive bound")]
    NonPhysicalSParams {
        which: &'static str,
        frequency_hz: f64,
        magnitude: f64,
    },
    #[error("{frequency_hz} Hz lies outside the stored band [{lo_hz}, {hi_hz}] Hz")]
    FrequencyOutOfBand {
        frequency_hz: f64,
        lo_hz: f64,
        hi_hz: f64,
    },
    #[error("delay estimation requires two series with nonzero energy")]
    ZeroEnergyInput,
}
