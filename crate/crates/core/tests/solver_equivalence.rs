//! The time-domain engine and the frequency-domain solver must agree once
//! they are given the same (cell-aligned) geometry.

mod common;

use headwave::dielectrics::{build_head_stack, LayerStack, TissueDb};
use headwave::fdtd::{self, SParamResult, SourceKind, SourceWaveform};
use headwave::tmm;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PROBES_HZ: [f64; 4] = [1.0e9, 2.45e9, 3.5e9, 4.5e9];

fn full_band_sparams(stack: &LayerStack, dz_override: Option<f64>) -> (SParamResult, LayerStack) {
    let (f0, bw) = SourceKind::VivaldiLike.preset_parameters().unwrap();
    let auto = fdtd::auto_step(stack, f0 + bw / 2.0).unwrap();
    let dz = dz_override.unwrap_or(auto.dz);
    let dt = 0.99 * dz / headwave::constants::C0;
    let src = SourceWaveform::preset(SourceKind::VivaldiLike, 1.0, dt).unwrap();
    let grid = fdtd::discretize_with_step(stack, &src, 10e-3, dz).unwrap();
    let vacuum = grid.vacuum_reference();
    let duration = src.duration() + 4.0 * grid.two_way_transit();
    let device = fdtd::run(&grid, &src, duration).unwrap();
    let reference = fdtd::run(&vacuum, &src, duration).unwrap();
    let sp = fdtd::extract_sparams(&device, &reference).unwrap();
    let snapped = fdtd::snap_stack(stack, dz).unwrap();
    (sp, snapped)
}

#[test]
fn random_three_layer_stacks_match_the_frequency_domain_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    let mut worst = 0.0f64;
    for case in 0..12 {
        let stack = common::three_layer_stack(&mut rng);
        let (sp, snapped) = full_band_sparams(&stack, None);
        for &f in &PROBES_HZ {
            let (f_bin, s11, s21) = sp.at(f).unwrap();
            let sol = tmm::solve_stack(&snapped, f_bin).unwrap();
            let gap11 = (s11.norm() - sol.gamma.norm()).abs();
            let gap21 = (s21.norm() - sol.t.norm()).abs();
            worst = worst.max(gap11).max(gap21);
            assert!(
                gap11 <= 0.02,
                "case {case} at {f_bin} Hz: |s11| {} vs {}",
                s11.norm(),
                sol.gamma.norm()
            );
            assert!(
                gap21 <= 0.02,
                "case {case} at {f_bin} Hz: |s21| {} vs {}",
                s21.norm(),
                sol.t.norm()
            );
        }
    }
    println!("worst |s| gap over 12 stacks x 4 bins: {worst:.4}");
}

// Refinement must hold the geometry fixed, so every interface here lands on
// a cell edge of both grids. (On the head stack, halving dz re-snaps the
// 1.35 mm skin face by 0.09 mm and |s11| at 2.45 GHz moves 8.8 percent; that
// measures the geometry shift, not convergence.)
#[test]
fn halving_the_cell_size_barely_moves_the_reflection() {
    let specs: [(f64, f64, f64); 7] = [
        (40.93, 0.89, 1.4e-3),
        (5.44, 0.05, 1.4e-3),
        (12.36, 0.15, 5.4e-3),
        (44.201, 0.99, 0.4e-3),
        (68.43, 2.45, 2.0e-3),
        (52.28, 0.98, 3.4e-3),
        (38.57, 0.62, 36.0e-3),
    ];
    let layers = specs
        .iter()
        .enumerate()
        .map(|(i, &(eps_r, sigma, d))| headwave::dielectrics::Layer {
            tissue: common::static_material(format!("m{i}"), eps_r, sigma),
            thickness: d,
        })
        .collect();
    let stack = LayerStack::in_free_space(layers).unwrap();
    let dz = 0.2e-3;
    let (coarse, _) = full_band_sparams(&stack, Some(dz));
    let (fine, _) = full_band_sparams(&stack, Some(dz / 2.0));
    for &f in &[2.45e9, 2.75e9, 3.5e9] {
        let (_, s11_c, _) = coarse.at(f).unwrap();
        let (_, s11_f, _) = fine.at(f).unwrap();
        let rel = (s11_c.norm() - s11_f.norm()).abs() / s11_c.norm();
        println!("{f} Hz: coarse {} fine {} rel {rel:.4}", s11_c.norm(), s11_f.norm());
        assert!(rel < 0.01, "{f} Hz: |s11| moved by {rel}");
    }
}

#[test]
fn reversing_a_stack_preserves_transmitted_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1ab1e);
    let stack = common::three_layer_stack(&mut rng);
    let mut reversed_layers = stack.layers.clone();
    reversed_layers.reverse();
    let reversed = LayerStack::new(reversed_layers, stack.bounding.clone()).unwrap();
    let (forward, _) = full_band_sparams(&stack, None);
    let (backward, _) = full_band_sparams(&reversed, None);
    for &f in &PROBES_HZ {
        let (_, _, s21_f) = forward.at(f).unwrap();
        let (_, _, s21_b) = backward.at(f).unwrap();
        let rel = (s21_f.norm() - s21_b.norm()).abs() / s21_f.norm();
        println!("{f} Hz: fwd {} bwd {} rel {rel:.4}", s21_f.norm(), s21_b.norm());
        assert!(rel < 0.01, "{f} Hz: |s21| differs by {rel}");
    }
}
