//! Browser bindings: dimension curves, chaos-game point clouds and
//! separation checks for a WIFS given as JSON text.
//!
//! Each export is a thin wrapper over a plain function returning
//! `Result<String, String>`, so the logic is testable off the browser.

use qdim_core::dimension::{d0_dimension, kappa_curve, similarity_dimension};
use qdim_core::quantizer::{chaos_game, DEFAULT_BURN_IN};
use qdim_core::separation::{check_osc_sufficient, check_ssc_with};
use qdim_core::{Aabb, Similitude, Wifs, Word};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper bound on points sent to the page in one call.
pub const MAX_SAMPLES: usize = 200_000;

fn parse(wifs_json: &str) -> Result<Wifs, String> {
    Wifs::from_json(wifs_json).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurvePoint {
    r: f64,
    kappa_r: f64,
    d_r: f64,
}

#[derive(Serialize)]
struct Curve {
    ambient_dim: usize,
    d0: f64,
    similarity_dim: f64,
    monotone: bool,
    points: Vec<CurvePoint>,
}

/// `κ_r` on `points` evenly spaced orders in `[r_min, r_max]`.
pub fn curve(wifs_json: &str, r_min: f64, r_max: f64, points: usize) -> Result<String, String> {
    let wifs = parse(wifs_json)?;
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]"));
    }
    if !(2..=2000).contains(&points) {
        return Err(format!("point count {points} outside 2..=2000"));
    }
    let step = (r_max - r_min) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|i| r_min + step * i as f64).collect();
    let curve = kappa_curve(&wifs, &grid).map_err(|e| e.to_string())?;
    let m = wifs.dim() as f64;
    let out = Curve {
        ambient_dim: wifs.dim(),
        d0: d0_dimension(&wifs),
        similarity_dim: similarity_dimension(&wifs),
        monotone: curve.monotone,
        points: curve
            .points
            .iter()
            .map(|p| CurvePoint {
                r: p.r,
                kappa_r: p.kappa_r,
                d_r: p.kappa_r.min(m),
            })
            .collect(),
    };
    Ok(serde_json::to_string(&out).expect("curve serializes"))
}

#[derive(Serialize)]
struct Cloud {
    dim: usize,
    hull: Aabb,
    coords: Vec<f64>,
}

/// Chaos-game samples as flat coordinates plus the attractor hull.
pub fn samples(wifs_json: &str, count: usize, seed: u64) -> Result<String, String> {
    let wifs = parse(wifs_json)?;
    if count == 0 || count > MAX_SAMPLES {
        return Err(format!("sample count {count} outside 1..={MAX_SAMPLES}"));
    }
    let set = chaos_game(&wifs, count, seed, DEFAULT_BURN_IN).map_err(|e| e.to_string())?;
    let cloud = Cloud {
        dim: set.dim(),
        hull: wifs.attractor_hull(),
        coords: set.points().flatten().copied().collect(),
    };
    Ok(serde_json::to_string(&cloud).expect("cloud serializes"))
}

#[derive(Serialize)]
struct Separation {
    hull: Aabb,
    words: Vec<String>,
    images: Vec<Aabb>,
    ssc: serde_json::Value,
    osc: serde_json::Value,
}

/// SSC and sufficient-OSC reports for the maps `f_w`, `w` in the
/// comma-separated `words` (all level-one maps when blank), over the hull.
pub fn separation(wifs_json: &str, words: &str) -> Result<String, String> {
    let wifs = parse(wifs_json)?;
    let words: Vec<Word> = if words.trim().is_empty() {
        (1..=wifs.len() as u16).map(|i| Word::new(vec![i])).collect()
    } else {
        words
            .split(',')
            .map(|w| w.parse::<Word>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?
    };
    let maps = words
        .iter()
        .map(|w| wifs.compose_word(w))
        .collect::<qdim_core::Result<Vec<Similitude>>>()
        .map_err(|e| e.to_string())?;
    let hull = wifs.attractor_hull();
    let ssc = check_ssc_with(&maps, &hull, true).map_err(|e| e.to_string())?;
    let osc = check_osc_sufficient(&maps, &hull).map_err(|e| e.to_string())?;
    let out = Separation {
        images: ssc.images.clone(),
        words: words.iter().map(Word::to_string).collect(),
        hull,
        ssc: serde_json::from_str(&ssc.to_json()).expect("report is json"),
        osc: serde_json::from_str(&osc.to_json()).expect("report is json"),
    };
    Ok(serde_json::to_string(&out).expect("separation serializes"))
}

#[wasm_bindgen(js_name = kappaCurve)]
pub fn kappa_curve_js(wifs_json: &str, r_min: f64, r_max: f64, points: usize) -> Result<String, JsError> {
    curve(wifs_json, r_min, r_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = chaosGame)]
pub fn chaos_game_js(wifs_json: &str, count: usize, seed: u64) -> Result<String, JsError> {
    samples(wifs_json, count, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = checkSeparation)]
pub fn check_separation_js(wifs_json: &str, words: &str) -> Result<String, JsError> {
    separation(wifs_json, words).map_err(|e| JsError::new(&e))
}
