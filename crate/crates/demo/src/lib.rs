//! Browser bindings for a small slice of `groupspan-core`.
//!
//! Every export returns a string (SVG, CSV or JSON) so the page only has to
//! drop the result into the DOM.

use groupspan_core::extremal::{g_range, g_rows_csv};
use groupspan_core::lattice::{edge_boundary, g_of_set, spiral_family};
use groupspan_core::svg::point_set_svg;
use groupspan_core::witness::{witness_pipeline, PipelineConfig, Variant};
use groupspan_core::{Budget, GroupSpec, PointSet, TripleSystem};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest `k` the page will draw or tabulate.
pub const MAX_K: usize = 5000;

/// Node budget for witness searches started from the page.
pub const DEMO_BUDGET: u64 = 50_000_000;

fn fail(msg: impl std::fmt::Display) -> JsError {
    JsError::new(&msg.to_string())
}

/// Spiral prefix of size `k` as `{svg, k, g, boundary}`.
pub fn spiral_json(k: usize) -> Result<String, String> {
    if k == 0 || k > MAX_K {
        return Err(format!("k must be in 1..={MAX_K}"));
    }
    let points: PointSet = spiral_family(k).into_iter().collect();
    let v = json!({
        "k": k,
        "g": g_of_set(&points),
        "boundary": edge_boundary(&points),
        "svg": point_set_svg(&points),
    });
    Ok(v.to_string())
}

/// `k,g,ratio` rows for `from..=to`.
pub fn g_table_csv(from: u64, to: u64) -> Result<String, String> {
    if from == 0 || from > to || to > MAX_K as u64 {
        return Err(format!("need 1 <= from <= to <= {MAX_K}"));
    }
    let rows = g_range(from, to).map_err(|e| e.to_string())?;
    Ok(g_rows_csv(&rows))
}

/// Witness JSON for the full triple system of `group` (`zn:<n>` or `zqm:<q>:<m>`).
pub fn witness_json(group: &str, k: usize, variant: &str) -> Result<String, String> {
    let spec = GroupSpec::parse(group).map_err(|e| e.to_string())?;
    let variant: Variant = variant.parse().map_err(|e: groupspan_core::Error| e.to_string())?;
    let system = TripleSystem::full_system(&spec).map_err(|e| e.to_string())?;
    let config = PipelineConfig { budget: Budget(DEMO_BUDGET), ..PipelineConfig::default() };
    let r = witness_pipeline(&system, k, variant, &config).map_err(|e| e.to_string())?;
    Ok(r.to_json().to_string())
}

#[wasm_bindgen(js_name = spiral)]
pub fn spiral_js(k: usize) -> Result<String, JsError> {
    spiral_json(k).map_err(fail)
}

#[wasm_bindgen(js_name = gTable)]
pub fn g_table_js(from: u32, to: u32) -> Result<String, JsError> {
    g_table_csv(from.into(), to.into()).map_err(fail)
}

#[wasm_bindgen(js_name = witness)]
pub fn witness_js(group: &str, k: usize, variant: &str) -> Result<String, JsError> {
    witness_json(group, k, variant).map_err(fail)
}
