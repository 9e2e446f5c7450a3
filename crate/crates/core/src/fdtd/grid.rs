//! Discretization of a layer stack onto a uniform 1-D grid.
//!
//! Cell size comes from the stricter of two rules: twenty cells per
//! shortest in-tissue wavelength at the source's upper −10 dB band edge,
//! and two cells across the thinnest layer. Layer boundaries snap to the
//! nearest cell edge, so the cell count of the slab region depends only on
//! the total thickness — stacks of equal total depth discretize to grids of
//! equal extent.
//!
//! Node layout (E nodes at `i*dz`): 10 boundary-clearance cells, the Tx
//! probe, 10 more cells, the source plane, the standoff gap, the slab, a
//! mirrored standoff gap, the Rx probe, and 10 more clearance cells. The Tx
//! probe sits on the scattered-field side of the source plane so it records
//! only reflections.

use crate::constants::C0;
use crate::dielectrics::LayerStack;
use crate::fdtd::{FdtdError, SourceWaveform};
use crate::tmm::refractive_index;

/// Cells between each absorbing boundary and the nearest probe.
const PAD_CELLS: usize = 10;
/// Cells between the Tx probe and the source plane.
const TX_GAP_CELLS: usize = 10;

/// Which rule fixed the cell size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingRule {
    /// λ_min/20 at the upper band edge.
    WavelengthTwentieth,
    /// Half the thinnest layer.
    ThinnestLayerFloor,
    /// Caller-supplied override.
    Explicit,
}

impl std::fmt::Display for BindingRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BindingRule::WavelengthTwentieth => "wavelength/20",
            BindingRule::ThinnestLayerFloor => "thinnest-layer/2",
            BindingRule::Explicit => "explicit override",
        })
    }
}

/// Termination applied at both grid ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// First-order one-way absorber tuned to the local phase velocity.
    FirstOrderAbsorbing,
}

/// Automatic step selection: cell size, timestep, and the rule that bound.
#[derive(Debug, Clone, Copy)]
pub struct StepChoice {
    pub dz: f64,
    pub dt: f64,
    pub binding: BindingRule,
}

/// Pick dz/dt for a stack and an upper band-edge frequency `f_upper` (Hz).
/// The timestep is pinned at `0.99 dz / c`, which satisfies the stability
/// bound in every cell because tissue only slows the wave down.
pub fn auto_step(stack: &LayerStack, f_upper: f64) -> Result<StepChoice, FdtdError> {
    let mut n_max = refractive_index(stack.bounding.complex_permittivity(f_upper)?).re;
    for l in &stack.layers {
        let n = refractive_index(l.tissue.complex_permittivity(f_upper)?).re;
        n_max = n_max.max(n);
    }
    let lambda_min = C0 / (f_upper * n_max);
    let dz_wave = lambda_min / 20.0;
    let thinnest = stack
        .layers
        .iter()
        .map(|l| l.thickness)
        .fold(f64::INFINITY, f64::min);
    let (dz, binding) = if thinnest / 2.0 < dz_wave {
        (thinnest / 2.0, BindingRule::ThinnestLayerFloor)
    } else {
        (dz_wave, BindingRule::WavelengthTwentieth)
    };
    Ok(StepChoice {
        dz,
        dt: 0.99 * dz / C0,
        binding,
    })
}

/// The discretized scene: uniform cells with per-cell material, plus the
/// node indices of the source plane, probes, and slab faces.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    /// Cell size, m.
    pub dz: f64,
    /// Timestep, s (`0.99 dz / c`).
    pub dt: f64,
    /// Relative permittivity per cell.
    pub eps_r: Vec<f64>,
    /// Conductivity per cell, S/m.
    pub sigma: Vec<f64>,
    /// Mass density per cell, kg/m^3.
    pub mass_density: Vec<f64>,
    /// E node where the incident wave enters the total-field region.
    pub source_index: usize,
    /// E node of the reflection probe (scattered-field side).
    pub tx_index: usize,
    /// E node of the transmission probe (beyond the slab).
    pub rx_index: usize,
    /// E node of the slab front face.
    pub stack_start_index: usize,
    /// E node of the slab back face.
    pub stack_end_index: usize,
    pub binding: BindingRule,
    pub boundary: BoundaryKind,
}

impl Grid1D {
    pub fn cell_count(&self) -> usize {
        self.eps_r.len()
    }

    pub fn node_count(&self) -> usize {
        self.eps_r.len() + 1
    }

    /// Position of E node `i`, m from the left grid end.
    pub fn node_position(&self, i: usize) -> f64 {
        i as f64 * self.dz
    }

    /// Depth of E node `i` below the slab front face, m (negative in front).
    pub fn node_depth(&self, i: usize) -> f64 {
        (i as f64 - self.stack_start_index as f64) * self.dz
    }

    /// Optical two-way transit time of the whole grid, s.
    pub fn two_way_transit(&self) -> f64 {
        let one_way: f64 = self
            .eps_r
            .iter()
            .map(|&er| self.dz * er.sqrt() / C0)
            .sum();
        2.0 * one_way
    }

    /// True when every cell is free space.
    pub fn is_vacuum(&self) -> bool {
        self.eps_r.iter().all(|&e| e == 1.0) && self.sigma.iter().all(|&s| s == 0.0)
    }

    /// The same extents, probes, and steps with the slab removed — the
    /// reference scene for S-parameter extraction.
    pub fn vacuum_reference(&self) -> Grid1D {
        let n = self.cell_count();
        Grid1D {
            eps_r: vec![1.0; n],
            sigma: vec![0.0; n],
            mass_density: vec![1.204; n],
            ..self.clone()
        }
    }
}

/// The stack as the grid actually represents it: every interface moved to
/// the nearest multiple of `dz`. Comparing another solver against a
/// discretized run is only meaningful on this snapped geometry —
/// quantization moves each face by up to `dz/2`, which is a real and
/// separately controlled modeling effect, not solver disagreement.
pub fn snap_stack(stack: &LayerStack, dz: f64) -> Result<LayerStack, FdtdError> {
    if !dz.is_finite() || dz <= 0.0 {
        return Err(FdtdError::BadStepOverride {
            dz_m: dz,
            max_m: f64::INFINITY,
        });
    }
    let depths = stack.interface_depths();
    let snapped: Vec<f64> = depths.iter().map(|&d| (d / dz).round() * dz).collect();
    let layers = stack
        .layers
        .iter()
        .zip(snapped.windows(2))
        .map(|(l, w)| crate::dielectrics::Layer {
            tissue: l.tissue.clone(),
            thickness: w[1] - w[0],
        })
        .collect();
    Ok(LayerStack::new(layers, stack.bounding.clone())?)
}

/// Discretize with the automatic step for this stack and source band.
pub fn discretize(
    stack: &LayerStack,
    source: &SourceWaveform,
    standoff: f64,
) -> Result<Grid1D, FdtdError> {
    let auto = auto_step(stack, source.band_edges().1)?;
    build(stack, source, standoff, auto.dz, auto.binding)
}

/// Discretize with an explicit cell size, which must be no coarser than the
/// automatic choice. The source must be sampled at `0.99 dz / c`.
pub fn discretize_with_step(
    stack: &LayerStack,
    source: &SourceWaveform,
    standoff: f64,
    dz: f64,
) -> Result<Grid1D, FdtdError> {
    let auto = auto_step(stack, source.band_edges().1)?;
    if !dz.is_finite() || dz <= 0.0 || dz > auto.dz * (1.0 + 1e-12) {
        return Err(FdtdError::BadStepOverride {
            dz_m: dz,
            max_m: auto.dz,
        });
    }
    build(stack, source, standoff, dz, BindingRule::Explicit)
}

fn build(
    stack: &LayerStack,
    source: &SourceWaveform,
    standoff: f64,
    dz: f64,
    binding: BindingRule,
) -> Result<Grid1D, FdtdError> {
    if !standoff.is_finite() || standoff < 0.0 {
        return Err(FdtdError::BadStandoff(standoff));
    }
    let dt = 0.99 * dz / C0;
    if (source.dt - dt).abs() > 1e-9 * dt {
        return Err(FdtdError::TimestepMismatch {
            expected_s: dt,
            got_s: source.dt,
        });
    }

    // Snap layer boundaries to cell edges.
    let depths = stack.interface_depths();
    let snapped: Vec<usize> = depths.iter().map(|&d| (d / dz).round() as usize).collect();
    for (index, w) in snapped.windows(2).enumerate() {
        if w[1] - w[0] < 2 {
            return Err(FdtdError::LayerTooThin {
                index,
                thickness_m: stack.layers[index].thickness,
                dz_m: dz,
            });
        }
    }
    let stack_cells = *snapped.last().unwrap_or(&0);

    let standoff_cells = (standoff / dz).round() as usize;
    let tx_index = PAD_CELLS;
    let source_index = tx_index + TX_GAP_CELLS;
    let stack_start_index = source_index + standoff_cells;
    let stack_end_index = stack_start_index + stack_cells;
    let rx_index = stack_end_index + standoff_cells;
    let n_cells = rx_index + PAD_CELLS;

    let bound = &stack.bounding;
    let mut eps_r = vec![bound.dispersion.eps_r_nominal(); n_cells];
    let mut sigma = vec![bound.dispersion.sigma_static(); n_cells];
    let mut mass_density = vec![bound.density; n_cells];
    for (k, l) in stack.layers.iter().enumerate() {
        let (a, b) = (stack_start_index + snapped[k], stack_start_index + snapped[k + 1]);
        for c in a..b {
            eps_r[c] = l.tissue.dispersion.eps_r_nominal();
            sigma[c] = l.tissue.dispersion.sigma_static();
            mass_density[c] = l.tissue.density;
        }
    }

    Ok(Grid1D {
        dz,
        dt,
        eps_r,
        sigma,
        mass_density,
        source_index,
        tx_index,
        rx_index,
        stack_start_index,
        stack_end_index,
        binding,
        boundary: BoundaryKind::FirstOrderAbsorbing,
    })
}
