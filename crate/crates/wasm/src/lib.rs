//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes plain numbers and returns a JSON string; the same
//! functions are callable natively (`*_json`) so they are tested without a
//! browser.

use std::f64::consts::FRAC_PI_2;

use ritz_core::bounds::{dkn_certificate, tan_theta_improved, Separation};
use ritz_core::harness::{
    generate, sweep_theta, verify_all, Example, InstanceSpec, SpectrumSpec, SubspaceMode,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const TOL: f64 = 1e-9;

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn grid(n: usize) -> Result<Vec<f64>, String> {
    if !(2..=2000).contains(&n) {
        return Err(format!("number of angles must be in [2, 2000], got {n}"));
    }
    // open interval (0, π/2)
    Ok((1..=n).map(|i| FRAC_PI_2 * i as f64 / (n + 1) as f64).collect())
}

/// Both mixed bounds against the Ritz-value change over `θ ∈ (0, π/2)`.
pub fn exa1_sweep_json(a: f64, b: f64, c: f64, d: f64, n: usize) -> Result<String, String> {
    let t = sweep_theta(Example::Exa1, [a, b, c, d], &grid(n)?, TOL).map_err(|e| e.to_string())?;
    Ok(to_json(&t))
}

/// `tan Θ` against the classical (`s_1(R_Y)/δ`) and compressed
/// (`s_1(P R_Y)/δ'`) ratios over `θ ∈ (0, π/2)`.
pub fn exa2_sweep_json(a: f64, b: f64, c: f64, d: f64, n: usize) -> Result<String, String> {
    let t = sweep_theta(Example::Exa2, [a, b, c, d], &grid(n)?, TOL).map_err(|e| e.to_string())?;
    Ok(to_json(&t))
}

#[derive(Serialize)]
struct Separations {
    theta: f64,
    interval: Option<(f64, f64)>,
    delta: Option<f64>,
    delta_prime: Option<f64>,
}

/// Separation constants of the second example at one angle.
pub fn exa2_point_json(theta: f64) -> Result<String, String> {
    let inst = generate(&InstanceSpec::paper_exa2(theta)).map_err(|e| e.to_string())?;
    let (interval, delta) = match dkn_certificate(&inst.a, &inst.x, &inst.y).map_err(|e| e.to_string())? {
        Separation::Certified(c) => (Some(c.interval), Some(c.delta)),
        Separation::NoSeparation { .. } => (None, None),
    };
    let delta_prime = tan_theta_improved(&inst.a, &inst.x, &inst.y, TOL)
        .ok()
        .map(|t| t.delta_prime);
    Ok(to_json(&Separations {
        theta,
        interval,
        delta,
        delta_prime,
    }))
}

#[derive(Serialize)]
struct Row {
    id: String,
    must_hold: bool,
    passed: usize,
    failed: usize,
    skipped: usize,
    worst_margin: Option<f64>,
}

#[derive(Serialize)]
struct Summary {
    instances: usize,
    violations: usize,
    rows: Vec<Row>,
}

/// Seeded random verification; `mode` is `random`, `invariant` or `orthogonal`.
pub fn verify_json(d: usize, k: usize, trials: usize, seed: u64, mode: &str, eps: f64) -> Result<String, String> {
    if trials > 5000 {
        return Err("at most 5000 trials in the browser".into());
    }
    let subspace_mode = match mode {
        "random" => SubspaceMode::RandomPair,
        "invariant" => SubspaceMode::InvariantPlusPerturbation { eps },
        "orthogonal" => SubspaceMode::OrthogonalPair,
        other => return Err(format!("unknown mode {other:?}")),
    };
    let spec = InstanceSpec {
        d,
        k,
        spectrum: SpectrumSpec::Uniform { lo: -1.0, hi: 1.0 },
        subspace_mode,
        seed,
    };
    let r = verify_all(&spec, trials, TOL).map_err(|e| e.to_string())?;
    let rows = r
        .tallies
        .iter()
        .map(|(id, t)| Row {
            id: id.clone(),
            must_hold: t.must_hold,
            passed: t.passed,
            failed: t.failed,
            skipped: t.skipped_total(),
            worst_margin: r.worst_margins.get(id).copied(),
        })
        .collect();
    Ok(to_json(&Summary {
        instances: r.instances,
        violations: r.violations(),
        rows,
    }))
}

#[wasm_bindgen]
pub fn exa1_sweep(a: f64, b: f64, c: f64, d: f64, n: usize) -> Result<String, JsError> {
    exa1_sweep_json(a, b, c, d, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn exa2_sweep(a: f64, b: f64, c: f64, d: f64, n: usize) -> Result<String, JsError> {
    exa2_sweep_json(a, b, c, d, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn exa2_point(theta: f64) -> Result<String, JsError> {
    exa2_point_json(theta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn verify(d: usize, k: usize, trials: usize, seed: u32, mode: &str, eps: f64) -> Result<String, JsError> {
    verify_json(d, k, trials, u64::from(seed), mode, eps).map_err(|e| JsError::new(&e))
}
