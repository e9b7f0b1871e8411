//! Browser bindings for the closed-form surfaces: dividend value and ruin
//! transform against initial surplus, and the periodic-barrier profile.
//!
//! Everything here is pure closed-form evaluation, so the page stays
//! responsive while sliders move. Curves come back as flat `[x0, v0, x1, v1,
//! ...]` arrays to keep the JS side allocation-free.

use wasm_bindgen::prelude::*;

use ratchet_levy::{laplace_ruin, optimize_a, value, LevyModel, Strategy};

fn build(
    mu: f64,
    sigma: f64,
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
    gamma: f64,
) -> Result<(LevyModel, Strategy), String> {
    let model = LevyModel::brownian(mu, sigma).map_err(|e| e.to_string())?;
    let s = Strategy::new(a, b, c1, c2, gamma).map_err(|e| e.to_string())?;
    Ok((model, s))
}

/// Dividend NPV as a function of initial surplus on `[0, y_max]`,
/// interleaved `[y, V(y), ...]`.
#[wasm_bindgen]
pub fn value_curve(
    mu: f64,
    sigma: f64,
    c1: f64,
    c2: f64,
    gamma: f64,
    delta: f64,
    a: f64,
    b: f64,
    y_max: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    let (model, s) = build(mu, sigma, a, b, c1, c2, gamma)?;
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let y = y_max * i as f64 / (n.max(2) - 1) as f64;
        let v = value(&model, &s, delta, y).map_err(|e| e.to_string())?;
        out.push(y);
        out.push(v.value);
    }
    Ok(out)
}

/// Laplace transform of the ruin time against initial surplus,
/// interleaved `[y, L(y), ...]`.
#[wasm_bindgen]
pub fn ruin_curve(
    mu: f64,
    sigma: f64,
    c1: f64,
    c2: f64,
    gamma: f64,
    delta: f64,
    a: f64,
    b: f64,
    y_max: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    let (model, s) = build(mu, sigma, a, b, c1, c2, gamma)?;
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let y = y_max * i as f64 / (n.max(2) - 1) as f64;
        let l = laplace_ruin(&model, &s, delta, y).map_err(|e| e.to_string())?;
        out.push(y);
        out.push(l.value);
    }
    Ok(out)
}

/// Value against the periodic barrier `a` in `(0, b]` for fixed `y`,
/// interleaved `[a, V, ...]` with the refined argmax appended last as
/// `[argmax, max_value]`.
#[wasm_bindgen]
pub fn barrier_profile(
    mu: f64,
    sigma: f64,
    c1: f64,
    c2: f64,
    gamma: f64,
    delta: f64,
    b: f64,
    y: f64,
) -> Result<Vec<f64>, String> {
    let model = LevyModel::brownian(mu, sigma).map_err(|e| e.to_string())?;
    let report = optimize_a(&model, y, b, c1, c2, gamma, delta).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(2 * report.grid.len() + 2);
    for (a, v) in &report.grid {
        out.push(*a);
        out.push(*v);
    }
    out.push(report.argmax);
    out.push(report.max_value);
    Ok(out)
}
