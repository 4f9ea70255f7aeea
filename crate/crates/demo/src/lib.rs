//! Browser bindings for a few `moment-core` operations.
//!
//! Every export takes plain strings or numbers and returns a JSON string;
//! failures come back as `{"error": "..."}` so the page never has to catch.

use moment_core::certs::{self, PolyaResult};
use moment_core::gns;
use moment_core::moments::{AtomicMeasure, MomentSequence};
use moment_core::rational::to_f64;
use moment_core::Polynomial;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

fn error(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => error(e),
    }
}

/// Smallest `n ≤ n_max` with `(Σ x_i)^n f` coefficientwise nonnegative.
#[wasm_bindgen]
pub fn polya_search(text: &str, n_max: u32) -> String {
    respond((|| {
        let f = Polynomial::parse(text).map_err(|e| e.to_string())?;
        let steps: Vec<Value> = {
            let d = f.dim();
            let s = (0..d).fold(Polynomial::zero(d), |acc, j| &acc + &Polynomial::var(d, j));
            let mut cur = f.clone();
            let mut out = vec![];
            for n in 0..=n_max.min(8) {
                out.push(json!({ "n": n, "product": cur.to_string(),
                                 "nonnegative": cur.has_nonneg_coefficients() }));
                cur = &cur * &s;
            }
            out
        };
        match certs::polya_certify(&f, n_max).map_err(|e| e.to_string())? {
            PolyaResult::Certified { n, certificate } => Ok(json!({
                "certified": true,
                "n": n,
                "expansion": certificate.expansion().map(|p| p.to_string()),
                "steps": steps,
            })),
            PolyaResult::NotFoundUpTo(m) => Ok(json!({
                "certified": false,
                "not_found_up_to": m,
                "steps": steps,
            })),
        }
    })())
}

/// Moments of the given atoms up to `2·level + 1`, then GNS extraction.
/// `atoms_json` is an AtomicMeasure document.
#[wasm_bindgen]
pub fn gns_from_atoms(atoms_json: &str, level: u32, seed: u32) -> String {
    respond((|| {
        let m: AtomicMeasure = serde_json::from_str(atoms_json).map_err(|e| e.to_string())?;
        if m.is_empty() {
            return Err("no atoms".into());
        }
        let s = MomentSequence::from_atomic_measure(&m, 2 * level + 1);
        let model = gns::build(&s, level, gns::DEFAULT_RANK_TOL).map_err(|e| e.to_string())?;
        let comm = gns::check_commutation(&model, gns::DEFAULT_EXTRACT_TOL);
        let r = gns::extract_best_effort(&model, gns::DEFAULT_EXTRACT_TOL, seed as u64)
            .map_err(|e| e.to_string())?;
        Ok(json!({
            "rank": model.quotient_rank,
            "flat": model.flat,
            "commutation": comm.max_offdiag,
            "residual": r.residual,
            "atoms": r.measure.atoms,
            "gram_eigenvalues": model.gram_eigenvalues,
        }))
    })())
}

/// Both sides of `x² + 1/(k−1) = Σ c_ℓ (1+x)^{k−ℓ}(1−x)^ℓ` sampled on
/// `[−1, 1]`, plus the individual weighted terms.
#[wasm_bindgen]
pub fn bernstein_curves(k: u32, samples: u32) -> String {
    respond((|| {
        let c = certs::bernstein_identity(k).map_err(|e| e.to_string())?;
        let samples = samples.clamp(2, 2000);
        let xs: Vec<f64> = (0..samples)
            .map(|i| -1.0 + 2.0 * i as f64 / (samples - 1) as f64)
            .collect();
        let terms: Vec<Value> = c
            .terms
            .iter()
            .map(|t| {
                let p = c.term_value(t).expect("verified certificate").scale(&t.coeff);
                json!({
                    "coeff": t.coeff.to_string(),
                    "exponents": t.exponents,
                    "values": xs.iter().map(|x| p.eval_f64(&[*x])).collect::<Vec<_>>(),
                })
            })
            .collect();
        let target: Vec<f64> = xs.iter().map(|x| c.target.eval_f64(&[*x])).collect();
        Ok(json!({
            "k": k,
            "verified": c.verify(),
            "target": c.target.to_string(),
            "constant": to_f64(&c.target.constant_term()),
            "x": xs,
            "lhs": target,
            "terms": terms,
        }))
    })())
}
