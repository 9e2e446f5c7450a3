//! Frequency-domain invariants over randomized layered media: energy
//! bookkeeping, reciprocity, geometric identities, and dispersion-model
//! consistency.

mod common;

use headwave::constants::{C0, EPS0};
use headwave::dielectrics::{
    insert_inclusion, DispersionSpec, Inclusion, Layer, LayerStack, RelaxationPole,
};
use headwave::tmm::solve_stack;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const PROBES_HZ: [f64; 8] = [0.5e9, 0.8e9, 1.2e9, 1.8e9, 2.45e9, 3.1e9, 4.0e9, 5.0e9];

#[test]
fn power_balance_holds_for_256_random_passive_stacks() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bab10c);
    for case in 0..256 {
        let stack = common::random_stack(&mut rng, 6, false);
        for &f in &PROBES_HZ {
            let sol = solve_stack(&stack, f).unwrap();
            let (r, t, a) = (sol.reflectance(), sol.transmittance(), sol.absorbance());
            assert!(
                (r + t + a - 1.0).abs() < 1e-10,
                "case {case} at {f} Hz: R+T+A = {}",
                r + t + a
            );
            assert!(a >= -1e-10, "case {case} at {f} Hz: A = {a}");
            assert!((0.0..=1.0 + 1e-12).contains(&r), "case {case}: R = {r}");
            assert!(t >= 0.0, "case {case}: T = {t}");
        }
    }
}

#[test]
fn lossless_stacks_absorb_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x10551e55);
    for case in 0..256 {
        let stack = common::random_stack(&mut rng, 6, true);
        for &f in &PROBES_HZ {
            let a = solve_stack(&stack, f).unwrap().absorbance();
            assert!(a.abs() < 1e-10, "case {case} at {f} Hz: A = {a}");
        }
    }
}

type LayerParams = (f64, f64, f64);

fn arb_layer_params() -> impl Strategy<Value = LayerParams> {
    (1.5f64..75.0, 0.0f64..3.0, 0.2f64..25.0)
}

fn build(params: &[LayerParams]) -> LayerStack {
    let layers = params
        .iter()
        .enumerate()
        .map(|(i, &(eps_r, sigma, d_mm))| Layer {
            tissue: common::static_material(format!("m{i}"), eps_r, sigma),
            thickness: d_mm * 1e-3,
        })
        .collect();
    LayerStack::in_free_space(layers).unwrap()
}

proptest! {
    #[test]
    fn reflection_magnitude_never_exceeds_unity(
        params in prop::collection::vec(arb_layer_params(), 1..6),
        f in 0.5e9f64..5.0e9,
    ) {
        let gamma = solve_stack(&build(&params), f).unwrap().gamma;
        prop_assert!(gamma.norm() <= 1.0 + 1e-12, "|gamma| = {}", gamma.norm());
    }

    // Identical bounding media on both sides make the transfer-matrix
    // determinant telescope to one, so the complex transmission must be
    // direction-independent.
    #[test]
    fn transmission_is_the_same_from_either_side(
        params in prop::collection::vec(arb_layer_params(), 1..6),
        f in 0.5e9f64..5.0e9,
    ) {
        let forward = solve_stack(&build(&params), f).unwrap().t;
        let mut reversed_params = params.clone();
        reversed_params.reverse();
        let reversed = solve_stack(&build(&reversed_params), f).unwrap().t;
        prop_assert!(
            (forward - reversed).norm() <= 1e-11 * forward.norm() + 1e-280,
            "t forward {forward} vs reversed {reversed}"
        );
    }

    #[test]
    fn splitting_every_layer_in_half_changes_nothing(
        params in prop::collection::vec(arb_layer_params(), 1..6),
        f in 0.5e9f64..5.0e9,
    ) {
        let whole = solve_stack(&build(&params), f).unwrap();
        let mut halves = Vec::with_capacity(params.len() * 2);
        for &(eps_r, sigma, d_mm) in &params {
            halves.push((eps_r, sigma, d_mm / 2.0));
            halves.push((eps_r, sigma, d_mm / 2.0));
        }
        let split = solve_stack(&build(&halves), f).unwrap();
        prop_assert!(
            (whole.gamma - split.gamma).norm() <= 1e-11 * (1.0 + whole.gamma.norm()),
            "gamma {} vs {}", whole.gamma, split.gamma
        );
        prop_assert!(
            (whole.t - split.t).norm() <= 1e-11 * whole.t.norm() + 1e-280,
            "t {} vs {}", whole.t, split.t
        );
    }

    // A slab many attenuation lengths deep cannot see its own back face, so
    // the front reflection reduces to the two-medium interface coefficient,
    // recomputed here from first principles.
    #[test]
    fn a_deep_lossy_slab_reflects_like_a_single_interface(
        eps_r in 5.0f64..70.0,
        sigma in 0.5f64..3.0,
        f in 1.0e9f64..5.0e9,
    ) {
        let w = 2.0 * PI * f;
        let n = Complex64::new(eps_r, -sigma / (w * EPS0)).sqrt();
        let alpha = -(w / C0) * n.im;
        let depth = 28.0 / alpha;
        let stack = LayerStack::in_free_space(vec![Layer {
            tissue: common::static_material("deep".into(), eps_r, sigma),
            thickness: depth,
        }])
        .unwrap();
        let gamma = solve_stack(&stack, f).unwrap().gamma;
        let fresnel = (Complex64::new(1.0, 0.0) - n) / (Complex64::new(1.0, 0.0) + n);
        prop_assert!(
            (gamma - fresnel).norm() < 1e-12,
            "gamma {gamma} vs interface coefficient {fresnel}"
        );
    }

    #[test]
    fn a_relaxation_model_with_no_poles_is_the_static_model(
        eps_r in 1.0f64..80.0,
        sigma in 0.0f64..3.0,
        f in 0.5e9f64..5.0e9,
    ) {
        let fixed = DispersionSpec::Static { eps_r, sigma };
        let relaxed = DispersionSpec::ColeCole {
            eps_inf: eps_r,
            poles: vec![],
            sigma_static: sigma,
        };
        prop_assert_eq!(
            fixed.complex_permittivity(f).unwrap(),
            relaxed.complex_permittivity(f).unwrap()
        );
    }

    #[test]
    fn relaxation_permittivity_stays_passive(
        eps_inf in 1.0f64..10.0,
        pole_params in prop::collection::vec(
            (0.1f64..60.0, -12.0f64..-9.0, 0.0f64..0.5),
            1..4,
        ),
        sigma in 0.0f64..2.0,
        f in 0.5e9f64..5.0e9,
    ) {
        let poles = pole_params
            .iter()
            .map(|&(delta_eps, log10_tau, alpha)| RelaxationPole {
                delta_eps,
                tau: 10f64.powf(log10_tau),
                alpha,
            })
            .collect();
        let spec = DispersionSpec::ColeCole { eps_inf, poles, sigma_static: sigma };
        let eps = spec.complex_permittivity(f).unwrap();
        prop_assert!(eps.im <= 0.0, "Im eps = {}", eps.im);
        prop_assert!(eps.re >= eps_inf * (1.0 - 1e-12), "Re eps = {}", eps.re);
    }

    #[test]
    fn an_inclusion_rewrites_only_its_own_interval(
        params in prop::collection::vec(arb_layer_params(), 1..6),
        center_frac in 0.1f64..0.9,
        half_frac in 0.005f64..0.2,
    ) {
        let host = build(&params);
        let total = host.total_thickness();
        let center = center_frac * total;
        let half = (half_frac * total)
            .min(center - 1e-6)
            .min(total - center - 1e-6);
        prop_assume!(half > 2e-6);
        let inc = Inclusion {
            tissue: common::static_material("inc".into(), 55.0, 7.0),
            center_depth: center,
            thickness: 2.0 * half,
        };
        let seeded = insert_inclusion(&host, &inc).unwrap();
        prop_assert!(
            (seeded.total_thickness() - total).abs() <= 1e-12,
            "total {} became {}", total, seeded.total_thickness()
        );
        let name_at = |stack: &LayerStack, z: f64| -> Option<String> {
            stack
                .layer_index_at(z)
                .map(|li| stack.layers[li].tissue.name.clone())
        };
        let margin = 1e-6;
        for i in 0..=100 {
            let z = total * i as f64 / 100.0;
            if z > center - half + margin && z < center + half - margin {
                prop_assert_eq!(name_at(&seeded, z), Some("inc".to_string()), "depth {}", z);
            } else if z < center - half - margin || z > center + half + margin {
                prop_assert_eq!(name_at(&seeded, z), name_at(&host, z), "depth {}", z);
            }
        }
    }
}

// Zero-conductivity media must conserve |gamma|^2 + |t|^2 exactly; a direct
// check that the balance above is not vacuously satisfied by construction.
#[test]
fn lossless_balance_is_between_reflection_and_transmission_alone() {
    let stack = LayerStack::in_free_space(vec![
        Layer {
            tissue: common::static_material("a".into(), 4.0, 0.0),
            thickness: 11.0e-3,
        },
        Layer {
            tissue: common::static_material("b".into(), 21.5, 0.0),
            thickness: 3.2e-3,
        },
    ])
    .unwrap();
    for &f in &PROBES_HZ {
        let sol = solve_stack(&stack, f).unwrap();
        let sum = sol.gamma.norm_sqr() + sol.t.norm_sqr();
        assert!((sum - 1.0).abs() < 1e-12, "{f} Hz: |g|^2+|t|^2 = {sum}");
    }
}
