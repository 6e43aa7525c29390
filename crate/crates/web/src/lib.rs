//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each export takes and returns JSON strings. The plain functions in
//! [`ops`] do the work and are what the host tests call.

use wasm_bindgen::prelude::*;

pub mod ops {
    use serde_json::{json, Value};

    use thetanull::f2::F2Vector;
    use thetanull::orbits::{classify, classify_by_delta, delta_parities, invariants_with_base, Quadruple};
    use thetanull::quadform::parity;
    use thetanull::theta::{theta_constant, SiegelMatrix};
    use thetanull::transversal::{transversality_report, NodeSet};

    /// Largest genus the theta demo evaluates for every characteristic.
    pub const MAX_THETA_GENUS: usize = 3;

    pub fn classify_quadruple(input: &str) -> Result<Value, String> {
        let q = Quadruple::from_json(input).map_err(|e| e.to_string())?;
        let inv = invariants_with_base(&q, 3).map_err(|e| e.to_string())?;
        Ok(json!({
            "genus": q.genus(),
            "class": classify(&q),
            "class_by_delta": classify_by_delta(&q),
            "invariants": inv,
            "delta_parities": delta_parities(&q),
        }))
    }

    /// Points default to `1..=g-2` when `points` is blank.
    pub fn hyperelliptic_configuration(genus: usize, points: &str) -> Result<Value, String> {
        let points: Vec<u32> = if points.trim().is_empty() {
            (1..=genus.saturating_sub(2) as u32).collect()
        } else {
            points
                .split(',')
                .map(|p| p.trim().parse::<u32>().map_err(|e| format!("bad point {p:?}: {e}")))
                .collect::<Result<_, _>>()?
        };
        let nodes = NodeSet::integers(genus).map_err(|e| e.to_string())?;
        let rep = transversality_report(&nodes, &points).map_err(|e| e.to_string())?;
        serde_json::to_value(rep).map_err(|e| e.to_string())
    }

    /// Every theta constant of `z` when `k` is absent, otherwise only `θ[k]`.
    pub fn theta_constants(input: &str, eps: f64) -> Result<Value, String> {
        let v: Value = serde_json::from_str(input).map_err(|e| e.to_string())?;
        let z = SiegelMatrix::from_json(&v["z"].to_string()).map_err(|e| e.to_string())?;
        let g = z.genus();
        let chars: Vec<F2Vector> = match v.get("k") {
            Some(k) => vec![serde_json::from_value(k.clone()).map_err(|e| e.to_string())?],
            None if g <= MAX_THETA_GENUS => F2Vector::all(g).collect(),
            None => return Err(format!("genus {g} needs an explicit k")),
        };
        let mut rows = Vec::new();
        for k in &chars {
            let t = theta_constant(&z, k, eps).map_err(|e| e.to_string())?;
            rows.push(json!({
                "k": k,
                "parity": parity(k),
                "re": t.re,
                "im": t.im,
                "abs": t.norm(),
                "bound": t.bound,
                "terms": t.terms,
            }));
        }
        Ok(json!({ "genus": g, "lambda_min": z.lambda_min(), "values": rows }))
    }
}

fn finish(r: Result<serde_json::Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = classifyQuadruple)]
pub fn classify_quadruple(input: &str) -> Result<String, JsValue> {
    finish(ops::classify_quadruple(input))
}

#[wasm_bindgen(js_name = hyperellipticConfiguration)]
pub fn hyperelliptic_configuration(genus: usize, points: &str) -> Result<String, JsValue> {
    finish(ops::hyperelliptic_configuration(genus, points))
}

#[wasm_bindgen(js_name = thetaConstants)]
pub fn theta_constants(input: &str, eps: f64) -> Result<String, JsValue> {
    finish(ops::theta_constants(input, eps))
}
