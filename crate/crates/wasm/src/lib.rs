//! Browser demo bindings. Inputs and outputs are JSON strings in the same
//! formats the CLI reads and writes.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qgph::game::{exact_win_probability, search_strategy, SearchConfig};
use qgph::json::{GameJson, GraphJson, MapJson, StrategyJson};
use qgph::qgraph::is_homomorphism;
use qgph::DEFAULT_TOL;

fn parse<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("{what}: line {} column {}: {e}", e.line(), e.column()))
}

fn lib<T>(what: &str, r: qgph::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

pub fn box_product_json(left: &str, right: &str) -> Result<String, String> {
    let l: GraphJson = parse("left graph", left)?;
    let r: GraphJson = parse("right graph", right)?;
    let out = match (l.to_classical(DEFAULT_TOL), r.to_classical(DEFAULT_TOL)) {
        (Ok(a), Ok(b)) => GraphJson::from_graph(&a.box_product(&b)),
        _ => {
            let a = lib("left graph", l.to_quantum(DEFAULT_TOL))?;
            let b = lib("right graph", r.to_quantum(DEFAULT_TOL))?;
            GraphJson::from_quantum(&a.box_product(&b))
        }
    };
    Ok(serde_json::to_string(&out).expect("graph serializes"))
}

pub fn check_hom_json(source: &str, target: &str, map: &str) -> Result<String, String> {
    let g: GraphJson = parse("source graph", source)?;
    let h: GraphJson = parse("target graph", target)?;
    let m: MapJson = parse("map", map)?;
    let g = lib("source graph", g.to_quantum(DEFAULT_TOL))?;
    let h = lib("target graph", h.to_quantum(DEFAULT_TOL))?;
    let phi = lib("map", m.to_relation(g.vertices(), h.vertices(), DEFAULT_TOL))?;
    let function = lib("map", phi.is_function())?;
    let hom = lib("map", is_homomorphism(&phi, &g, &h))?;
    Ok(json!({"function": function, "homomorphism": hom}).to_string())
}

pub fn search_json(game: &str, n: usize, seed: u64) -> Result<String, String> {
    let gj: GameJson = parse("game", game)?;
    let game = lib("game", gj.to_game(DEFAULT_TOL))?;
    let config = SearchConfig {
        restarts: 8,
        seed,
        ..SearchConfig::default()
    };
    let out = lib("search", search_strategy(&game, n, &config))?;
    let v: Value = match &out.strategy {
        Some(s) => json!({
            "status": "found",
            "win_probability": lib("strategy", exact_win_probability(s, &game))?,
            "strategy": StrategyJson::from_strategy(s, &game),
        }),
        None => json!({"status": "none", "exhaustive": out.exhaustive, "best_penalty": out.best_penalty}),
    };
    Ok(v.to_string())
}

#[wasm_bindgen]
pub fn box_product(left: &str, right: &str) -> Result<String, JsValue> {
    box_product_json(left, right).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn check_hom(source: &str, target: &str, map: &str) -> Result<String, JsValue> {
    check_hom_json(source, target, map).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn search(game: &str, n: usize, seed: u32) -> Result<String, JsValue> {
    search_json(game, n, seed as u64).map_err(|e| JsValue::from_str(&e))
}
