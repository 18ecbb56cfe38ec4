//! WebAssembly bindings for the demo page: parse an expression and render
//! it back, apply `d`, `μ₂`, `μ₃` or `Jac₃`, and check the Arnold
//! witnesses for a chosen dimension and number of points.
//!
//! The plain functions return `Result<String, String>` so they can be
//! tested natively; the `#[wasm_bindgen]` wrappers turn errors into
//! JavaScript exceptions.

use chiral_core::chiral_ops::{jac3, mu2, mu3};
use chiral_core::model_p::{arnold_cyclic_sum, arnold_witness, Section};
use chiral_core::sexpr::{parse, render_element, Document, Value};
use wasm_bindgen::prelude::*;

/// Parses a document and renders it in normal form.
pub fn normalize(text: &str) -> Result<String, String> {
    Ok(parse(text).map_err(|e| e.to_string())?.render())
}

fn section(doc: &Document) -> Section {
    match &doc.value {
        Value::Section(s) => s.clone(),
        Value::Element(e) => Section::omega(e, &(1..=doc.k).collect::<Vec<_>>()),
    }
}

/// Applies `d`, `mu2` (collapsing point 2 onto point 1), `mu3` or `jac3`.
pub fn apply(op: &str, text: &str) -> Result<String, String> {
    let doc = parse(text).map_err(|e| e.to_string())?;
    let err = |e: chiral_core::error::Error| e.to_string();
    let value = match op {
        "d" => match &doc.value {
            Value::Element(e) => Value::Element(e.d()),
            Value::Section(s) => Value::Section(s.d()),
        },
        "mu2" => Value::Section(mu2(&section(&doc), 1, 2).map_err(err)?),
        "mu3" => Value::Section(mu3(&section(&doc)).map_err(err)?),
        "jac3" => Value::Section(jac3(&section(&doc)).map_err(err)?),
        other => return Err(format!("unknown operation '{other}'")),
    };
    Ok(Document { value, ..doc }.render())
}

/// Checks `d V = P_ij P_jl + P_jl P_li + P_li P_ij` and membership of `V`
/// for every triple, one line per triple.
pub fn arnold(n: u8, k: u8) -> Result<String, String> {
    if !(1..=3).contains(&n) || !(3..=5).contains(&k) {
        return Err("choose 1 ≤ n ≤ 3 and 3 ≤ k ≤ 5".into());
    }
    let mut out = String::new();
    for i in 1..=k {
        for j in i + 1..=k {
            for l in j + 1..=k {
                let v = arnold_witness(n, i, j, l).map_err(|e| e.to_string())?;
                let ok = v.d() == arnold_cyclic_sum(n, i, j, l) && v.is_member().member;
                let terms = v.body.terms().count();
                out.push_str(&format!(
                    "{} ({i},{j},{l}): witness with {terms} terms\n  {}\n",
                    if ok { "PASS" } else { "FAIL" },
                    render_element(&v)
                ));
            }
        }
    }
    Ok(out)
}

#[wasm_bindgen(js_name = normalize)]
pub fn normalize_js(text: &str) -> Result<String, JsValue> {
    normalize(text).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = apply)]
pub fn apply_js(op: &str, text: &str) -> Result<String, JsValue> {
    apply(op, text).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = arnold)]
pub fn arnold_js(n: u8, k: u8) -> Result<String, JsValue> {
    arnold(n, k).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_through_mu3() {
        let text = "(ambient :n 2 :k 3)(mul (P 1 2) (P 1 3) (P 2 3))";
        let out = apply("mu3", text).unwrap();
        assert!(out.contains("(mul 1/2 (lam 1 2) (lam 2 3) (omega (1 2 3)))"), "{out}");
    }

    #[test]
    fn normalize_round_trips() {
        let once = normalize("(ambient :n 2 :k 2)(dP (mul (z 1 1) (u 1 1 2)))").unwrap();
        assert_eq!(normalize(&once).unwrap(), once);
    }

    #[test]
    fn errors_are_messages() {
        assert!(apply("mu2", "(ambient :n 2 :k 2)(P 1)").unwrap_err().contains("arguments"));
        assert!(apply("nope", "(ambient :n 2 :k 2)(P 1 2)").is_err());
        assert!(arnold(4, 3).is_err());
    }

    #[test]
    fn arnold_lines() {
        let out = arnold(2, 4).unwrap();
        assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 4);
    }
}
