//! Browser bindings: a certified-radius map, ensemble certified-accuracy
//! curves and the randomized-smoothing radius, over small synthetic data.

use wasm_bindgen::prelude::*;

pub mod model;

fn js_err(e: flipcert::CertError) -> JsError {
    JsError::new(&e.to_string())
}

/// Training points as a flat `[x, y, label, ...]` array.
#[wasm_bindgen]
pub fn training_points(n: usize, separation: f64, seed: u32) -> Result<Vec<f64>, JsError> {
    model::points(n, separation, u64::from(seed)).map_err(js_err)
}

/// Flat `[predicted, radius, ...]` over a `grid × grid` lattice.
#[wasm_bindgen]
pub fn radius_field(n: usize, separation: f64, seed: u32, lambda: f64, grid: usize) -> Result<Vec<f64>, JsError> {
    model::radius_field(n, separation, u64::from(seed), lambda, grid).map_err(js_err)
}

/// Flat `[r, lower, upper, blackbox, ...]` rows, last row `[-1, medians...]`.
#[wasm_bindgen]
pub fn ensemble_curves(
    n: usize,
    separation: f64,
    seed: u32,
    lambda: f64,
    partitions: usize,
    n_test: usize,
) -> Result<Vec<f64>, JsError> {
    model::ensemble_curves(n, separation, u64::from(seed), lambda, partitions, n_test).map_err(js_err)
}

/// Flat `[p, radius, ...]` for the smoothing certificate at noise rate `noise`.
#[wasm_bindgen]
pub fn smoothing_curve(noise: f64, points: usize) -> Result<Vec<f64>, JsError> {
    model::smoothing_curve(noise, points).map_err(js_err)
}

#[wasm_bindgen]
pub fn extent() -> f64 {
    model::EXTENT
}
