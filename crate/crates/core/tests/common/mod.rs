//! Randomized layered-media generators shared by the integration suites.

#![allow(dead_code)]

use headwave::dielectrics::{DispersionSpec, Layer, LayerStack, TissueRecord};
use rand::Rng;

pub fn static_material(name: String, eps_r: f64, sigma: f64) -> TissueRecord {
    TissueRecord {
        name,
        dispersion: DispersionSpec::Static { eps_r, sigma },
        density: 1000.0,
        radius_mm: None,
    }
}

/// Up to `max_layers` layers, 0.2 to 25 mm thick, eps 1.5 to 75.
pub fn random_stack<R: Rng>(rng: &mut R, max_layers: usize, lossless: bool) -> LayerStack {
    let n = rng.gen_range(1..=max_layers);
    let layers = (0..n)
        .map(|i| Layer {
            tissue: static_material(
                format!("m{i}"),
                rng.gen_range(1.5..75.0),
                if lossless { 0.0 } else { rng.gen_range(0.0..3.0) },
            ),
            thickness: rng.gen_range(0.2e-3..25.0e-3),
        })
        .collect();
    LayerStack::in_free_space(layers).unwrap()
}

/// Three layers, 1 to 10 mm thick, eps 2 to 70, sigma 0.05 to 2.5. Sized so
/// a full-band time-domain run stays cheap.
pub fn three_layer_stack<R: Rng>(rng: &mut R) -> LayerStack {
    let layers = (0..3)
        .map(|i| Layer {
            tissue: static_material(
                format!("m{i}"),
                rng.gen_range(2.0..70.0),
                rng.gen_range(0.05..2.5),
            ),
            thickness: rng.gen_range(1.0e-3..10.0e-3),
        })
        .collect();
    LayerStack::in_free_space(layers).unwrap()
}
