//! Browser bindings: three operations returning JSON strings for the page in
//! `www/`. The `*_json` functions carry the logic and are usable natively.

use alloyrep::alloy::search::{alloyability_search, planted_instance, SearchBudget};
use alloyrep::asl2::{
    build_rep, check_block_conditions, e0_spectrum, is_admissible, random_params, spin_rep, E0, E1,
    F_MINUS, F_PLUS,
};
use alloyrep::random::rng_for;
use alloyrep::rep::{check_rep, decompose, is_irreducible, tensor_product};
use alloyrep::{CMatrix, ToleranceConfig, C64};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Caps keeping a single call interactive.
pub const MAX_SPACE_DIM: usize = 10;
pub const MAX_SPIN: usize = 6;
pub const MAX_RESTARTS: usize = 20;
pub const MAX_ITERS: usize = 400;

fn magnitudes(m: &CMatrix) -> Vec<Vec<f64>> {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).collect())
        .collect()
}

fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad block size {t:?}"))
        })
        .collect()
}

/// Random asl(2) representation with the given block sizes: irreducibility,
/// block conditions, e0 spectrum and entry magnitudes of each image.
pub fn asl2_rep_json(dims: &str, gamma_re: f64, gamma_im: f64, seed: u64) -> Result<Value, String> {
    let dims = parse_dims(dims)?;
    if dims.is_empty() || dims.contains(&0) {
        return Err("block sizes must be positive".into());
    }
    if dims.iter().sum::<usize>() > MAX_SPACE_DIM {
        return Err(format!("total dimension is capped at {MAX_SPACE_DIM}"));
    }
    let tol = ToleranceConfig::default();
    let p = random_params(&mut rng_for(seed, 0), &dims, C64::new(gamma_re, gamma_im));
    let r = build_rep(&p).map_err(|e| e.to_string())?;
    let cert = is_irreducible(&r, &tol).map_err(|e| e.to_string())?;
    let conditions = check_block_conditions(&p, &tol).map_err(|e| e.to_string())?;
    let spectrum: Vec<Value> = e0_spectrum(&r, &tol)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|c| json!({ "re": c.eigenvalue.re, "im": c.eigenvalue.im, "multiplicity": c.multiplicity }))
        .collect();
    let names = ["e0", "f+", "f-", "e1"];
    let images: Vec<Value> = [E0, F_PLUS, F_MINUS, E1]
        .iter()
        .map(|&k| json!({ "name": names[k], "abs": magnitudes(&r.mats()[k]) }))
        .collect();
    Ok(json!({
        "dims": dims,
        "admissible": is_admissible(&dims),
        "space_dim": r.space_dim(),
        "check_residual": check_rep(&r, &tol).worst_residual,
        "irreducible": cert.irreducible,
        "generated_dim": cert.generated_dim,
        "full_dim": cert.full_dim,
        "conditions": conditions,
        "conditions_ok": conditions.all_ok(),
        "e0_spectrum": spectrum,
        "images": images,
    }))
}

/// Decomposition of the tensor product of two classical spin modules.
pub fn spin_tensor_json(n1: usize, n2: usize, seed: u64) -> Result<Value, String> {
    if n1 > MAX_SPIN || n2 > MAX_SPIN {
        return Err(format!("spins are capped at N = {MAX_SPIN}"));
    }
    let tol = ToleranceConfig::default();
    let a = build_rep(&spin_rep(n1)).map_err(|e| e.to_string())?;
    let b = build_rep(&spin_rep(n2)).map_err(|e| e.to_string())?;
    let t = tensor_product(&a, &b).map_err(|e| e.to_string())?;
    let dec = decompose(&t, seed, &tol).map_err(|e| e.to_string())?;
    let expected: Vec<usize> = (n1.abs_diff(n2)..=n1 + n2)
        .rev()
        .step_by(2)
        .map(|k| k + 1)
        .collect();
    Ok(json!({
        "n1": n1,
        "n2": n2,
        "space_dim": t.space_dim(),
        "dims": dec.dim_multiset(),
        "expected": expected,
        "reassembly_residual": dec.reassembly_residual,
        "draws": dec.draws,
        "basis_abs": magnitudes(&dec.basis),
    }))
}

/// Residual traces of the factorization search on a planted pair.
pub fn search_trace_json(
    n: usize,
    m: usize,
    seed: u64,
    restarts: usize,
    iters: usize,
) -> Result<Value, String> {
    if !(1..=4).contains(&n) || !(1..=4).contains(&m) {
        return Err("dimensions must lie in 1..=4".into());
    }
    let (q1, q2, _) = planted_instance(n, m, seed);
    let budget = SearchBudget {
        restarts: restarts.clamp(1, MAX_RESTARTS),
        iters: iters.clamp(1, MAX_ITERS),
        seed,
    };
    let out = alloyability_search(&q1, &q2, budget, &ToleranceConfig::default())
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "n": n,
        "m": m,
        "best_residual": out.best_residual,
        "best_restart": out.best_restart,
        "traces": out.traces,
    }))
}

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

#[wasm_bindgen]
pub fn asl2_rep(dims: &str, gamma_re: f64, gamma_im: f64, seed: u32) -> String {
    respond(asl2_rep_json(dims, gamma_re, gamma_im, seed as u64))
}

#[wasm_bindgen]
pub fn spin_tensor(n1: u32, n2: u32, seed: u32) -> String {
    respond(spin_tensor_json(n1 as usize, n2 as usize, seed as u64))
}

#[wasm_bindgen]
pub fn search_trace(n: u32, m: u32, seed: u32, restarts: u32, iters: u32) -> String {
    respond(search_trace_json(
        n as usize,
        m as usize,
        seed as u64,
        restarts as usize,
        iters as usize,
    ))
}
