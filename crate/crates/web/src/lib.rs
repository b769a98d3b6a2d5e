//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every entry point takes a family id, a field order and a JSON object of
//! parameters, and returns a JSON string. The plain `*_json` functions are
//! usable natively; the `#[wasm_bindgen]` wrappers turn errors into
//! exceptions.

use psl3_core::catalogue::{self, Family, Instance, Params, Tuple};
use psl3_core::cgroup::{schlafli_chiral, schlafli_regular};
use psl3_core::grp::GroupHandle;
use psl3_core::projmat::Point;
use psl3_core::verify::{verify, VerifyOptions};
use psl3_core::{Pgl3, ProjMatrix};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Groups larger than this are never enumerated in the browser.
const WEB_CAP: usize = 1 << 21;

fn instance(family: &str, q: u32, params: &str) -> Result<Instance, String> {
    let family: Family = family.parse().map_err(|e: catalogue::CatalogueError| e.to_string())?;
    let params: Params = if params.trim().is_empty() {
        Params::default()
    } else {
        serde_json::from_str(params).map_err(|e| format!("parameters: {e}"))?
    };
    catalogue::build(family, q, &params).map_err(|e| e.to_string())
}

/// Named elements of interest: the generators and their consecutive products.
fn named_elements(inst: &Instance) -> Vec<(String, ProjMatrix)> {
    let g = &inst.pgl;
    match &inst.tuple {
        Tuple::Chiral(t) => {
            let n = t.generators().len();
            let mut v: Vec<_> = (1..=n).map(|i| (format!("s{i}"), t.sigma(i))).collect();
            for i in 1..n {
                for j in i + 1..=n {
                    v.push((format!("t{i}{j}"), t.tau(i, j)));
                }
            }
            v
        }
        Tuple::Regular(t) => {
            let r = t.generators();
            let mut v: Vec<_> = r.iter().enumerate().map(|(i, m)| (format!("r{i}"), *m)).collect();
            for i in 0..r.len() {
                for j in i + 1..r.len() {
                    v.push((format!("r{i}r{j}"), g.mul(&r[i], &r[j])));
                }
            }
            v
        }
        Tuple::Witness(w) => w.elements.clone(),
    }
}

fn point_json(p: &Point) -> Value {
    json!(p.map(|e| e.index()))
}

/// Full verification report.
pub fn verify_json(family: &str, q: u32, params: &str) -> Result<String, String> {
    let inst = instance(family, q, params)?;
    let opts = VerifyOptions { cap: WEB_CAP, timings: false, ..VerifyOptions::default() };
    let report = verify(&inst, &opts).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Points of PG(2,q) with, for every named element, its fixed points and
/// (for involutions) center and axis.
pub fn plane_json(family: &str, q: u32, params: &str) -> Result<String, String> {
    let inst = instance(family, q, params)?;
    let g: &Pgl3 = &inst.pgl;
    let f = g.field();
    let labels: Vec<String> = f.elements().map(|e| f.format(e)).collect();
    let elements: Vec<Value> = named_elements(&inst)
        .iter()
        .map(|(name, m)| {
            let fixed: Vec<Value> = g.fixed_points(m).iter().map(point_json).collect();
            let (center, axis, on_axis) = match g.center_axis(m) {
                Ok((c, a)) => {
                    let on: Vec<Value> = g.points().filter(|p| g.incident(p, &a)).map(|p| point_json(&p)).collect();
                    (point_json(&c), point_json(&a), Value::from(on))
                }
                Err(_) => (Value::Null, Value::Null, Value::Null),
            };
            json!({
                "name": name,
                "matrix": g.format(m),
                "order": g.order(m).ok(),
                "fixed": fixed,
                "center": center,
                "axis": axis,
                "on_axis": on_axis,
            })
        })
        .collect();
    let out = json!({
        "family": inst.family.to_string(),
        "q": g.q(),
        "labels": labels,
        "points": g.num_points(),
        "elements": elements,
    });
    Ok(out.to_string())
}

/// Schläfli type, element orders and the order of the generated group.
pub fn orders_json(family: &str, q: u32, params: &str) -> Result<String, String> {
    let inst = instance(family, q, params)?;
    let g = &inst.pgl;
    let schlafli = match &inst.tuple {
        Tuple::Chiral(t) => Some(schlafli_chiral(g, t).map_err(|e| e.to_string())?),
        Tuple::Regular(t) => Some(schlafli_regular(g, t).map_err(|e| e.to_string())?),
        Tuple::Witness(_) => None,
    };
    let orders: Vec<Value> =
        named_elements(&inst).iter().map(|(name, m)| json!({ "name": name, "order": g.order(m).ok() })).collect();
    let group = GroupHandle::new(g, inst.generators(), WEB_CAP);
    let out = json!({
        "family": inst.family.to_string(),
        "q": g.q(),
        "schlafli": schlafli.as_ref().map(|s| s.entries.clone()),
        "degenerate": schlafli.as_ref().map(|s| s.degenerate),
        "orders": orders,
        "group_order": group.order().to_string(),
        "psl_order": g.psl_order().to_string(),
        "expected_order": inst.expect.group_order.map(|o| o.to_string()),
        "structure": inst.expect.structure,
    });
    Ok(out.to_string())
}

/// Family identifiers, one per array entry.
pub fn families_json() -> String {
    json!(Family::ALL.iter().map(|f| f.to_string()).collect::<Vec<_>>()).to_string()
}

#[wasm_bindgen(js_name = verifyFamily)]
pub fn verify_family(family: &str, q: u32, params: &str) -> Result<String, JsError> {
    verify_json(family, q, params).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = planeGeometry)]
pub fn plane_geometry(family: &str, q: u32, params: &str) -> Result<String, JsError> {
    plane_json(family, q, params).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = schlafliOrders)]
pub fn schlafli_orders(family: &str, q: u32, params: &str) -> Result<String, JsError> {
    orders_json(family, q, params).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = families)]
pub fn families() -> String {
    families_json()
}
