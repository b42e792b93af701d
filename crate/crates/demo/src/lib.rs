//! Browser demo for the operator-windowed time-frequency toolkit.
//!
//! Three interactive operations, each returning a JSON payload for the page
//! to render on a canvas:
//!
//! - [`heatmap`]: phase-space distributions of a chosen signal (spectrogram,
//!   Wigner, operator-STFT norms, Cohen distributions, smoothed
//!   spectrograms),
//! - [`equivalence`]: the sampled norm-equivalence sandwich for a chosen
//!   operator window,
//! - [`signal_preview`]: the raw signal, for a small line plot.
//!
//! The JSON-producing functions are plain Rust and unit-tested on the host;
//! the `wasm_bindgen` exports are thin wrappers. Build with
//! `wasm-pack build crates/demo --target web`.

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use owtf_core::grid::{MixedNormParams, PhaseGrid};
use owtf_core::locops::smoothed_spectrogram;
use owtf_core::opwindow::{equivalence_report, op_stft};
use owtf_core::specs;
use owtf_core::tfshift::{gaussian_window, stft};
use owtf_core::weylcohen::{cohen, wigner};
use owtf_core::{Error, Result};

#[derive(Serialize)]
struct HeatmapPayload {
    n: usize,
    label: String,
    min: f64,
    max: f64,
    /// Row-major with the time shift as the slow index.
    values: Vec<f64>,
}

#[derive(Serialize)]
struct SignalPayload {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
    abs: Vec<f64>,
}

/// Phase-space view of `signal_spec` selected by `view_spec`:
/// `spectrogram`, `wigner`, `opstft:<operator>`, `cohen:<operator>`, or
/// `smoothed:<mask>`.
pub fn heatmap_json(n: usize, signal_spec: &str, view_spec: &str) -> Result<String> {
    let grid = PhaseGrid::new(n)?;
    let psi = specs::parse_signal(signal_spec, grid)?;
    let (label, values): (String, Vec<f64>) = if view_spec == "spectrogram" {
        let field = stft(&psi, &gaussian_window(grid))?.abs_squared();
        (
            "spectrogram".into(),
            field.values().iter().map(|v| v.re).collect(),
        )
    } else if view_spec == "wigner" {
        let field = wigner(&psi, &psi)?;
        (
            "wigner".into(),
            field.values().iter().map(|v| v.re).collect(),
        )
    } else if let Some(op_spec) = view_spec.strip_prefix("opstft:") {
        let op = specs::parse_operator(op_spec, grid)?;
        let field = op_stft(&op, &psi)?.norm_field();
        (
            format!("operator STFT norms ({op_spec})"),
            field.values().iter().map(|v| v.re).collect(),
        )
    } else if let Some(op_spec) = view_spec.strip_prefix("cohen:") {
        let op = specs::parse_operator(op_spec, grid)?;
        let field = cohen(&op, &psi)?;
        (
            format!("Cohen distribution ({op_spec})"),
            field.values().iter().map(|v| v.re).collect(),
        )
    } else if let Some(mask_spec) = view_spec.strip_prefix("smoothed:") {
        let mask = specs::parse_mask(mask_spec, grid)?;
        let field = smoothed_spectrogram(&mask, &gaussian_window(grid), &psi)?;
        (
            format!("smoothed spectrogram ({mask_spec})"),
            field.values().iter().map(|v| v.re).collect(),
        )
    } else {
        return Err(Error::BadSpec {
            spec: view_spec.to_string(),
            reason: "expected spectrogram, wigner, opstft:<op>, cohen:<op>, or smoothed:<mask>"
                .into(),
        });
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let payload = HeatmapPayload {
        n,
        label,
        min,
        max,
        values,
    };
    Ok(serde_json::to_string(&payload).expect("payload serializes"))
}

/// Sampled norm-equivalence sandwich for the operator window `op_spec` with
/// weight `weight_spec` used both as the window class and the norm weight.
pub fn equivalence_json(
    n: usize,
    op_spec: &str,
    p: &str,
    q: &str,
    weight_spec: &str,
    samples: usize,
    seed: u64,
) -> Result<String> {
    let grid = PhaseGrid::new(n)?;
    let op = specs::parse_operator(op_spec, grid)?;
    let weight = specs::parse_weight(
        weight_spec,
        grid,
        owtf_core::WeightKind::SubmultiplicativeCandidate,
    )?;
    let params = MixedNormParams::new(
        specs::parse_exponent(p)?,
        specs::parse_exponent(q)?,
        weight.clone(),
    );
    let report = equivalence_report(&op, &params, &weight, seed, samples)?;
    Ok(report.to_json())
}

/// The signal itself, for a line plot.
pub fn signal_json(n: usize, signal_spec: &str) -> Result<String> {
    let grid = PhaseGrid::new(n)?;
    let psi = specs::parse_signal(signal_spec, grid)?;
    let payload = SignalPayload {
        n,
        re: psi.values().iter().map(|v| v.re).collect(),
        im: psi.values().iter().map(|v| v.im).collect(),
        abs: psi.values().iter().map(|v| v.norm()).collect(),
    };
    Ok(serde_json::to_string(&payload).expect("payload serializes"))
}

#[wasm_bindgen]
pub fn heatmap(
    n: usize,
    signal_spec: &str,
    view_spec: &str,
) -> std::result::Result<String, String> {
    heatmap_json(n, signal_spec, view_spec).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn equivalence(
    n: usize,
    op_spec: &str,
    p: &str,
    q: &str,
    weight_spec: &str,
    samples: usize,
    seed: u64,
) -> std::result::Result<String, String> {
    equivalence_json(n, op_spec, p, q, weight_spec, samples, seed).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn signal_preview(n: usize, signal_spec: &str) -> std::result::Result<String, String> {
    signal_json(n, signal_spec).map_err(|e| e.to_string())
}
