//! Leapfrog time stepping with a conductivity term.
//!
//! E lives at integer nodes `i*dz` and integer times `n*dt`; H lives at
//! half nodes and half times. The conductive E update is the standard
//! semi-implicit form
//!
//! ```text
//! e[i] <- ca[i] e[i] - cb[i] (h[i] - h[i-1])
//! ca = (1 - s)/(1 + s),  cb = dt/(eps dz) / (1 + s),  s = sigma dt / (2 eps)
//! ```
//!
//! with node material averaged from the two adjacent cells (second-order at
//! layer interfaces). The incident wave enters through a total-field/
//! scattered-field correction at the source plane: everything at and beyond
//! it carries the incident plus scattered field, everything before it only
//! the scattered field, so the Tx probe records reflections alone. Both
//! grid ends terminate in first-order one-way absorbers tuned to the local
//! phase velocity.

use crate::constants::{C0, EPS0, ETA0, MU0};
use crate::fdtd::{FdtdError, Grid1D, SourceWaveform};

/// Times before which each probe is free of absorbing-boundary residue,
/// assuming worst-case (vacuum-speed) travel. Informational: the residue
/// is itself ~0.5% at this boundary order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateWindows {
    pub tx_clean_until_s: f64,
    pub rx_clean_until_s: f64,
}

/// A completed simulation: the scene, the excitation, and everything
/// recorded while stepping.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub grid: Grid1D,
    pub source: SourceWaveform,
    /// Effective duration, s; exactly `tx.len() * grid.dt`.
    pub duration: f64,
    /// E at the Tx probe per step, V/m (reflections only).
    pub tx: Vec<f64>,
    /// E at the Rx probe per step, V/m.
    pub rx: Vec<f64>,
    /// Per-node maximum |E| over the whole run, V/m.
    pub envelope: Vec<f64>,
    /// Total field energy per step, J/m^2.
    pub energy: Vec<f64>,
    pub gates: GateWindows,
    /// Final energy over peak energy; small when the grid has rung down.
    pub final_energy_ratio: f64,
}

/// Step the grid under the excitation for (at least) `duration` seconds.
/// The duration must cover three two-way optical transits so reflections
/// and transmissions settle into the probes.
pub fn run(
    grid: &Grid1D,
    source: &SourceWaveform,
    duration: f64,
) -> Result<SimulationRun, FdtdError> {
    let dz = grid.dz;
    let dt = grid.dt;
    let stability_limit = 0.99 * dz / C0;
    if dt > stability_limit * (1.0 + 1e-12) {
        return Err(FdtdError::StabilityBound {
            dt_s: dt,
            limit_s: stability_limit,
        });
    }
    if (source.dt - dt).abs() > 1e-9 * dt {
        return Err(FdtdError::TimestepMismatch {
            expected_s: dt,
            got_s: source.dt,
        });
    }
    let minimum = 3.0 * grid.two_way_transit();
    if !duration.is_finite() || duration < minimum {
        return Err(FdtdError::DurationTooShort {
            minimum_s: minimum,
            got_s: duration,
        });
    }

    let n_cells = grid.cell_count();
    let n_nodes = grid.node_count();
    let n_steps = (duration / dt - 1e-9).ceil() as usize;

    // Node-centered material: average of the adjacent cells.
    let mut eps_node = vec![0.0; n_nodes];
    let mut ca = vec![1.0; n_nodes];
    let mut cb = vec![0.0; n_nodes];
    for i in 0..n_nodes {
        let (el, er) = (
            grid.eps_r[i.saturating_sub(1).min(n_cells - 1)],
            grid.eps_r[i.min(n_cells - 1)],
        );
        let (sl, sr) = (
            grid.sigma[i.saturating_sub(1).min(n_cells - 1)],
            grid.sigma[i.min(n_cells - 1)],
        );
        let eps = EPS0 * 0.5 * (el + er);
        let sig = 0.5 * (sl + sr);
        let loss = sig * dt / (2.0 * eps);
        eps_node[i] = eps;
        ca[i] = (1.0 - loss) / (1.0 + loss);
        cb[i] = dt / (eps * dz) / (1.0 + loss);
    }

    // One-way absorbers tuned to the boundary cells' phase velocity.
    let mur = |eps_r: f64| {
        let c = C0 / eps_r.sqrt();
        (c * dt - dz) / (c * dt + dz)
    };
    let mur_left = mur(grid.eps_r[0]);
    let mur_right = mur(grid.eps_r[n_cells - 1]);

    // Injection-plane medium (normally the bounding region): the incident H
    // and the half-cell phase offset use its lossless phase velocity.
    let n_src = grid.eps_r[grid.source_index.min(n_cells - 1)].sqrt();
    let eta_src = ETA0 / n_src;
    let half_cell_lead = dz * n_src / (2.0 * C0);

    let hy_coef = dt / (MU0 * dz);
    let i_src = grid.source_index;
    let source_end = source.duration() + 2.0 * dt;

    let mut ex = vec![0.0; n_nodes];
    let mut hy = vec![0.0; n_cells];
    let mut tx = Vec::with_capacity(n_steps);
    let mut rx = Vec::with_capacity(n_steps);
    let mut envelope = vec![0.0; n_nodes];
    let mut energy = Vec::with_capacity(n_steps);
    let mut peak_energy = 0.0f64;

    for n in 0..n_steps {
        let t_e = n as f64 * dt;

        for i in 0..n_cells {
            hy[i] -= hy_coef * (ex[i + 1] - ex[i]);
        }
        if i_src > 0 {
            hy[i_src - 1] += hy_coef * source.evaluate(t_e);
        }

        let (old_e0, old_e1) = (ex[0], ex[1]);
        let (old_en, old_en1) = (ex[n_nodes - 1], ex[n_nodes - 2]);

        for i in 1..n_nodes - 1 {
            ex[i] = ca[i] * ex[i] - cb[i] * (hy[i] - hy[i - 1]);
        }
        ex[i_src] += cb[i_src] * (source.evaluate(t_e + 0.5 * dt + half_cell_lead) / eta_src);

        ex[0] = old_e1 + mur_left * (ex[1] - old_e0);
        ex[n_nodes - 1] = old_en1 + mur_right * (ex[n_nodes - 2] - old_en);

        tx.push(ex[grid.tx_index]);
        rx.push(ex[grid.rx_index]);
        for (env, &e) in envelope.iter_mut().zip(&ex) {
            let a = e.abs();
            if a > *env {
                *env = a;
            }
        }

        let mut u = 0.0;
        for i in 0..n_nodes {
            u += 0.5 * eps_node[i] * ex[i] * ex[i] * dz;
        }
        for &h in &hy {
            u += 0.5 * MU0 * h * h * dz;
        }
        energy.push(u);
        let t_now = (n + 1) as f64 * dt;
        if t_now > source_end && u > 1.01 * peak_energy {
            return Err(FdtdError::Unstable { step: n });
        }
        peak_energy = peak_energy.max(u);
    }

    let z = |i: usize| grid.node_position(i);
    let z_end = z(n_nodes - 1);
    let gates = GateWindows {
        tx_clean_until_s: (2.0 * z(grid.stack_start_index) - z(grid.source_index)
            + z(grid.tx_index))
            / C0,
        rx_clean_until_s: (2.0 * z_end - z(grid.source_index) - z(grid.rx_index)) / C0,
    };
    let final_energy_ratio = if peak_energy > 0.0 {
        energy.last().copied().unwrap_or(0.0) / peak_energy
    } else {
        1.0
    };

    Ok(SimulationRun {
        grid: grid.clone(),
        source: source.clone(),
        duration: n_steps as f64 * dt,
        tx,
        rx,
        envelope,
        energy,
        gates,
        final_energy_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dielectrics::{build_head_stack, DispersionSpec, Layer, LayerStack, TissueDb, TissueRecord};
    use crate::fdtd::{discretize, discretize_with_step, SourceKind};
    use crate::tmm;

    fn vacuum_setup() -> (Grid1D, SourceWaveform) {
        let stack = LayerStack::in_free_space(vec![]).unwrap();
        let step = crate::fdtd::auto_step(&stack, 5.0e9).unwrap();
        let src = SourceWaveform::preset(SourceKind::VivaldiLike, 1.0, step.dt).unwrap();
        let grid = discretize(&stack, &src, 10e-3).unwrap();
        (grid, src)
    }

    #[test]
    fn vacuum_rx_is_a_delayed_copy_of_the_source() {
        let (grid, src) = vacuum_setup();
        let duration = src.duration() + 3.0 * grid.two_way_transit();
        let run = run(&grid, &src, duration).unwrap();
        assert_eq!(run.tx.len(), (run.duration / grid.dt).round() as usize);

        // Arrival time: geometric distance over c, within a couple of steps
        // (the half-step probe/source staggering is below that).
        let expected = (grid.rx_index - grid.source_index) as f64 * grid.dz / C0;
        let measured =
            crate::fdtd::propagation_delay(&src.samples, &run.rx, grid.dt).unwrap();
        assert!(
            (measured - expected).abs() <= 2.0 * grid.dt,
            "measured {measured}, expected {expected}"
        );
        // Amplitude survives free-space travel: the received peak matches
        // the excitation's own peak sample.
        let s_peak: f64 = src.samples.iter().fold(0.0, |m, &v| m.max(v.abs()));
        let peak: f64 = run.rx.iter().fold(0.0, |m, &v| m.max(v.abs()));
        assert!((peak - s_peak).abs() < 0.02 * s_peak, "peak {peak} vs {s_peak}");
        // The scattered-side probe stays quiet but for injection residue.
        let tx_peak: f64 = run.tx.iter().fold(0.0, |m, &v| m.max(v.abs()));
        assert!(tx_peak < 1e-3, "tx leakage {tx_peak}");
    }

    #[test]
    fn head_stack_reflects_more_than_it_transmits() {
        let stack = build_head_stack(&TissueDb::builtin()).unwrap();
        let step = crate::fdtd::auto_step(&stack, 5.0e9).unwrap();
        let src = SourceWaveform::preset(SourceKind::VivaldiLike, 1.0, step.dt).unwrap();
        let grid = discretize(&stack, &src, 10e-3).unwrap();
        let run = run(&grid, &src, src.duration() + 3.0 * grid.two_way_transit()).unwrap();
        let tx_peak: f64 = run.tx.iter().fold(0.0, |m, &v| m.max(v.abs()));
        let rx_peak: f64 = run.rx.iter().fold(0.0, |m, &v| m.max(v.abs()));
        assert!(rx_peak > 0.0, "tissue is penetrable");
        assert!(rx_peak < tx_peak, "rx {rx_peak} vs tx {tx_peak}");
        assert!(run.envelope.iter().all(|&e| e >= 0.0));
        // Lossy grid rings down.
        assert!(
            run.final_energy_ratio < 1e-6,
            "ring-down ratio {}",
            run.final_energy_ratio
        );
    }

    #[test]
    fn lossless_energy_never_exceeds_its_peak_and_rings_down() {
        let (grid, src) = vacuum_setup();
        let run = run(&grid, &src, src.duration() + 3.0 * grid.two_way_transit()).unwrap();
        let peak = run.energy.iter().cloned().fold(0.0, f64::max);
        // The staggered-time sum oscillates a little; 1% is the contract.
        for &u in &run.energy {
            assert!(u <= 1.01 * peak);
        }
        // Everything exits through the absorbers once the source is quiet.
        assert!(
            run.final_energy_ratio < 1e-6,
            "residual {}",
            run.final_energy_ratio
        );
    }

    #[test]
    fn lossy_half_space_decays_at_the_analytic_rate() {
        // A slab much longer than the pulse, so the interior envelope is a
        // clean forward-decaying exponential: its least-squares log-slope
        // must track the frequency-domain attenuation constant at the
        // source center frequency. Tight agreement is the acceptance
        // suite's job; this is a smoke check at 5%.
        let tissue = TissueRecord {
            name: "Phantom".into(),
            dispersion: DispersionSpec::Static {
                eps_r: 10.0,
                sigma: 0.5,
            },
            density: 1000.0,
            radius_mm: None,
        };
        let stack = LayerStack::in_free_space(vec![Layer {
            tissue: tissue.clone(),
            thickness: 150e-3,
        }])
        .unwrap();
        let auto = crate::fdtd::auto_step(&stack, 2.5e9).unwrap();
        let src =
            crate::fdtd::synthesize_source(SourceKind::Custom, 2.0e9, 1.0e9, 1.0, auto.dt)
                .unwrap();
        let grid = discretize(&stack, &src, 10e-3).unwrap();
        let run = run(&grid, &src, src.duration() + 3.0 * grid.two_way_transit()).unwrap();

        let alpha_ref =
            tmm::propagation_constant(tissue.complex_permittivity(2.0e9).unwrap(), 2.0e9).re;
        // Least-squares slope of ln(envelope) over 30..80 mm depth.
        let node_at = |depth: f64| grid.stack_start_index + (depth / grid.dz).round() as usize;
        let (i1, i2) = (node_at(30e-3), node_at(80e-3));
        let pts: Vec<(f64, f64)> = (i1..=i2)
            .map(|i| (grid.node_depth(i), run.envelope[i].ln()))
            .collect();
        let n = pts.len() as f64;
        let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (sxx, sxy): (f64, f64) = pts
            .iter()
            .fold((0.0, 0.0), |a, p| (a.0 + p.0 * p.0, a.1 + p.0 * p.1));
        let alpha_meas = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
        let rel = (alpha_meas - alpha_ref).abs() / alpha_ref;
        assert!(rel < 0.05, "alpha {alpha_meas} vs {alpha_ref} ({rel:.3} rel)");
    }

    #[test]
    fn stability_bound_is_asserted_at_run_time() {
        let (mut grid, _) = vacuum_setup();
        grid.dt = 1.2 * grid.dz / C0;
        let src = SourceWaveform::preset(SourceKind::VivaldiLike, 1.0, grid.dt).unwrap();
        assert!(matches!(
            run(&grid, &src, 1.0),
            Err(FdtdError::StabilityBound { .. })
        ));
    }

    #[test]
    fn short_durations_are_rejected() {
        let (grid, src) = vacuum_setup();
        let too_short = 2.9 * grid.two_way_transit();
        assert!(matches!(
            run(&grid, &src, too_short),
            Err(FdtdError::DurationTooShort { .. })
        ));
    }

    #[test]
    fn mismatched_source_timestep_is_rejected() {
        let (grid, _) = vacuum_setup();
        let src = SourceWaveform::preset(SourceKind::VivaldiLike, 1.0, grid.dt * 2.0).unwrap();
        assert!(matches!(
            run(&grid, &src, 1.0),
            Err(FdtdError::TimestepMismatch { .. })
        ));
    }

    #[test]
    fn gate_windows_precede_the_duration_and_order_sensibly() {
        // On the head grid the slab sits well before the far boundary, so
        // the front-face ghost returns to Tx before the far-end ghost
        // reaches Rx.
        let stack = build_head_stack(&TissueDb::builtin()).unwrap();
        let step = crate::fdtd::auto_step(&stack, 5.0e9).unwrap();
        let src = SourceWaveform::preset(SourceKind::VivaldiLike, 1.0, step.dt).unwrap();
        let grid = discretize(&stack, &src, 10e-3).unwrap();
        let run = run(&grid, &src, src.duration() + 3.0 * grid.two_way_transit()).unwrap();
        assert!(run.gates.tx_clean_until_s > 0.0);
        assert!(run.gates.rx_clean_until_s > run.gates.tx_clean_until_s);
        assert!(run.gates.rx_clean_until_s < run.duration);
    }
}
