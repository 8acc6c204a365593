//! Browser bindings for the static page in `www/`.
//!
//! Each exported function is a thin wrapper over a plain Rust function of
//! the same name without the `js_` prefix, so the logic is testable off the
//! browser.

use gkcs_core::closed_forms::cat_distribution as cat_formula;
use gkcs_core::spectra::Radius;
use gkcs_core::states::{self, CatKind, Parity};
use gkcs_core::{Branch, Family, FockVector, SpectrumModel, TruncationConfig, C64};
use wasm_bindgen::prelude::*;

/// Stand-in radius for unbounded or finite-dimensional series.
pub const OPEN_RADIUS: f64 = 3.0;

fn model(spec: &str) -> Result<SpectrumModel, String> {
    SpectrumModel::from_spec(spec).map_err(|e| e.to_string())
}

fn family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

fn state(m: &SpectrumModel, fam: Family, z: C64, alpha: f64) -> Result<FockVector, String> {
    let t = TruncationConfig::default();
    match fam {
        Family::Gk => states::gkcs(m, z, alpha, &t),
        Family::DualGk => states::dgkcs(m, z, alpha, &t),
        Family::EvenDual => states::even_odd(m, z, alpha, Parity::Even, &t),
        Family::OddDual => states::even_odd(m, z, alpha, Parity::Odd, &t),
        Family::CatReal => states::cat(m, z, alpha, CatKind::Real, &t),
        Family::CatImag => states::cat(m, z, alpha, CatKind::Imaginary, &t),
        Family::GeneralizedGk | Family::GeneralizedDual => {
            states::generalized_gkcs(m, z.norm_sqr(), z.arg(), alpha / m.omega(), fam.branch(), &t)
        }
    }
    .map_err(|e| e.to_string())
}

/// Largest admissible `|z|` for the page's sliders.
pub fn slider_radius(spec: &str, fam: &str) -> Result<f64, String> {
    let r = model(spec)?.convergence_radius(family(fam)?.branch()).map_err(|e| e.to_string())?;
    Ok(match r {
        Radius::Finite(v) => 0.98 * v,
        _ => OPEN_RADIUS,
    })
}

/// `P(n)` for the state at `z`.
pub fn photon_distribution(spec: &str, fam: &str, z_re: f64, z_im: f64, alpha: f64) -> Result<Vec<f64>, String> {
    let m = model(spec)?;
    Ok(state(&m, family(fam)?, C64::new(z_re, z_im), alpha)?.probabilities())
}

/// `⟨E⟩` against `x = |z|²` on `points` moduli up to 0.9 of the radius,
/// flattened as `[x0, E0, x1, E1, ...]`.
pub fn action_curve(spec: &str, fam: &str, points: usize) -> Result<Vec<f64>, String> {
    let m = model(spec)?;
    let f = family(fam)?;
    let branch: Branch = f.branch();
    let top = 0.9 * slider_radius(spec, fam)? / 0.98;
    let mut out = Vec::with_capacity(2 * points);
    for k in 1..=points {
        let r = top * k as f64 / points as f64;
        let s = state(&m, f, C64::new(r, 0.0), 0.0)?;
        let mean: f64 = s
            .probabilities()
            .iter()
            .enumerate()
            .map(|(n, p)| p * m.energy(branch, n).unwrap_or(f64::NAN))
            .sum();
        out.push(r * r);
        out.push(mean);
    }
    Ok(out)
}

/// Cat-state `P(n)` at `z = r e^{iθ}` from the constructed state, followed
/// by the same distribution from the closed formula (two halves of equal length).
pub fn cat_distribution(spec: &str, r: f64, theta: f64, real: bool) -> Result<Vec<f64>, String> {
    let m = model(spec)?;
    let kind = if real { CatKind::Real } else { CatKind::Imaginary };
    let t = TruncationConfig::default();
    let s = states::cat(&m, C64::from_polar(r, theta), 0.0, kind, &t).map_err(|e| e.to_string())?;
    let mut out = s.probabilities();
    out.extend(cat_formula(&m, r, theta, kind, s.cutoff()).map_err(|e| e.to_string())?);
    Ok(out)
}

#[wasm_bindgen(js_name = sliderRadius)]
pub fn js_slider_radius(spec: &str, family: &str) -> Result<f64, JsError> {
    slider_radius(spec, family).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = photonDistribution)]
pub fn js_photon_distribution(spec: &str, family: &str, z_re: f64, z_im: f64, alpha: f64) -> Result<Vec<f64>, JsError> {
    photon_distribution(spec, family, z_re, z_im, alpha).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = actionCurve)]
pub fn js_action_curve(spec: &str, family: &str, points: usize) -> Result<Vec<f64>, JsError> {
    action_curve(spec, family, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = catDistribution)]
pub fn js_cat_distribution(spec: &str, r: f64, theta: f64, real: bool) -> Result<Vec<f64>, JsError> {
    cat_distribution(spec, r, theta, real).map_err(|e| JsError::new(&e))
}
