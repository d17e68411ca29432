use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

fn qgph(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qgph")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(stdout: &str) -> Value {
    serde_json::from_str(stdout.trim()).expect("json report")
}

fn c5() -> Value {
    json!({"vertices": ["0", "1", "2", "3", "4"],
           "edges": [["0", "1"], ["1", "2"], ["2", "3"], ["3", "4"], ["4", "0"]]})
}

fn k(n: usize) -> Value {
    let v: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            e.push(json!([v[i], v[j]]));
        }
    }
    json!({"vertices": v, "edges": e})
}

fn c5_k3(dir: &TempDir) -> PathBuf {
    write(dir, "game.json", &json!({"G": c5(), "H": k(3)}))
}

#[test]
fn check_hom_accepts_a_colouring() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "g.json", &c5());
    let h = write(&d, "h.json", &k(3));
    let good = write(&d, "f.json", &json!({"0": "a", "1": "b", "2": "a", "3": "b", "4": "c"}));
    let bad = write(&d, "f2.json", &json!({"0": "a", "1": "a", "2": "b", "3": "a", "4": "c"}));
    assert_eq!(qgph(&["check-hom", "--source", s(&g), "--target", s(&h), "--map", s(&good)]).0, 0);
    assert_eq!(qgph(&["check-hom", "--source", s(&g), "--target", s(&h), "--map", s(&bad)]).0, 1);
}

#[test]
fn check_iso_and_hom_adjacent() {
    let d = TempDir::new().unwrap();
    let k3 = write(&d, "k3.json", &k(3));
    let rot = write(&d, "rot.json", &json!({"a": "b", "b": "c", "c": "a"}));
    let id = write(&d, "id.json", &json!({"a": "a", "b": "b", "c": "c"}));
    assert_eq!(qgph(&["check-iso", "--source", s(&k3), "--target", s(&k3), "--map", s(&rot)]).0, 0);
    // Every vertex moves to a neighbour, so the two automorphisms are adjacent.
    let args = ["hom-adjacent", "--source", s(&k3), "--target", s(&k3), "--map", s(&rot), "--other", s(&id)];
    assert_eq!(qgph(&args).0, 0);
    let args = ["hom-adjacent", "--source", s(&k3), "--target", s(&k3), "--map", s(&id), "--other", s(&id)];
    assert_eq!(qgph(&args).0, 1);
}

#[test]
fn box_and_coproduct_write_graphs() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "g.json", &c5());
    let h = write(&d, "h.json", &k(3));
    let out = d.path().join("box.json");
    let (code, _, _) = qgph(&["box", "--left", s(&g), "--right", s(&h), "--out", s(&out)]);
    assert_eq!(code, 0);
    let boxed: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(boxed["vertices"].as_array().unwrap().len(), 15);
    // Three copies of C5 and five copies of K3, 15 edges each way.
    assert_eq!(boxed["edges"].as_array().unwrap().len(), 30);
    let (code, stdout, _) = qgph(&["coproduct", "--left", s(&g), "--right", s(&h), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(report(&stdout)["payload"]["edges"].as_array().unwrap().len(), 8);
}

#[test]
fn classical_part_of_a_mixed_graph() {
    let d = TempDir::new().unwrap();
    // One classical vertex with a loop next to a 2-dimensional atom.
    let g = json!({
        "vertices": {"atoms": [{"label": "c", "dim": 1}, {"label": "q", "dim": 2}]},
        "edges": {"src": {"atoms": [{"label": "c", "dim": 1}, {"label": "q", "dim": 2}]},
                  "dst": {"atoms": [{"label": "c", "dim": 1}, {"label": "q", "dim": 2}]},
                  "blocks": [{"i": 0, "j": 0, "basis": [[[1.0]]]}]}
    });
    let p = write(&d, "g.json", &g);
    let (code, stdout, stderr) = qgph(&["cl", "--graph", s(&p), "--json"]);
    assert_eq!(code, 0, "{stderr}");
    let r = report(&stdout);
    assert_eq!(r["payload"]["vertices"], json!(["c"]));
    assert_eq!(r["payload"]["edges"], json!([["c", "c"]]));
    let (code, stdout, _) = qgph(&["hom-graph", "--graph", s(&p), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(report(&stdout)["payload"]["vertices"], json!(["c"]));
}

#[test]
fn game_search_verify_simulate() {
    let d = TempDir::new().unwrap();
    let game = c5_k3(&d);
    let strat = d.path().join("s.json");
    let args = ["game", "search", "--game", s(&game), "--n", "2", "--restarts", "32", "--seed", "7"];
    let (code, _, stderr) = qgph(&[&args[..], &["--out", s(&strat)]].concat());
    assert_eq!(code, 0, "{stderr}");
    let (code, stdout, _) = qgph(&["game", "verify", "--game", s(&game), "--strategy", s(&strat), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(report(&stdout)["residuals"]["win_probability"].as_f64().unwrap(), 1.0);
    let (code, stdout, _) = qgph(&["game", "simulate", "--game", s(&game), "--strategy", s(&strat), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(report(&stdout)["residuals"]["wins"].as_f64().unwrap(), 10_000.0);
    let (code, _, _) = qgph(&["convert", "strategy-to-boxhom", "--game", s(&game), "--strategy", s(&strat)]);
    assert_eq!(code, 0);
}

#[test]
fn losing_strategy_names_a_tuple() {
    let d = TempDir::new().unwrap();
    let game = c5_k3(&d);
    // Adjacent vertices 0 and 1 both answer a.
    let mut p = serde_json::Map::new();
    for (g, h) in [("0", "a"), ("1", "a"), ("2", "b"), ("3", "a"), ("4", "c")] {
        p.insert(format!("{g},{h}"), json!([[1.0]]));
    }
    let strat = write(&d, "s.json", &json!({"n": 1, "projections": p}));
    let (code, stdout, _) = qgph(&["game", "verify", "--game", s(&game), "--strategy", s(&strat)]);
    assert_eq!(code, 1);
    assert!(stdout.contains("violating tuple"), "{stdout}");
    let f = write(&d, "f.json", &json!({"0": "a", "1": "a", "2": "b", "3": "a", "4": "c"}));
    let (code, stdout, _) = qgph(&["game", "simulate", "--game", s(&game), "--assignment", s(&f), "--json"]);
    assert_eq!(code, 1);
    assert!(report(&stdout)["residuals"]["exact_win_probability"].as_f64().unwrap() < 1.0);
}

#[test]
fn classical_search_found_and_none() {
    let d = TempDir::new().unwrap();
    let found = c5_k3(&d);
    let none = write(&d, "k3k2.json", &json!({"G": k(3), "H": k(2)}));
    assert_eq!(qgph(&["game", "classical-search", "--game", s(&found)]).0, 0);
    let (code, stdout, _) = qgph(&["game", "classical-search", "--game", s(&none), "--json"]);
    assert_eq!(code, 1);
    assert_eq!(report(&stdout)["status"], "none");
    let (code, _, _) = qgph(&["game", "search", "--game", s(&none), "--n", "1"]);
    assert_eq!(code, 1);
}

fn pauli_channel() -> Value {
    // Dephasing on M2: Kraus √½·1 and √½·Z.
    let r = std::f64::consts::FRAC_1_SQRT_2;
    json!({"src": {"ambient": 2}, "dst": {"ambient": 2}, "kraus": [[[r, 0.0], [0.0, r]], [[r, 0.0], [0.0, -r]]]})
}

#[test]
fn channel_relations() {
    let d = TempDir::new().unwrap();
    let map = write(&d, "phi.json", &pauli_channel());
    let (code, stdout, _) = qgph(&["channel", "t-phi", "--map", s(&map), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(report(&stdout)["residuals"]["dim"].as_f64().unwrap(), 2.0);
    let (code, stdout, _) = qgph(&["channel", "confusability", "--map", s(&map), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(report(&stdout)["residuals"]["dim"].as_f64().unwrap(), 2.0);
    let scalars = write(&d, "r.json", &json!({"space": [[[1.0, 0.0], [0.0, 1.0]]]}));
    for verb in ["push", "pull"] {
        let (code, stdout, _) = qgph(&["channel", verb, "--map", s(&map), "--relation", s(&scalars), "--json"]);
        assert_eq!(code, 0);
        assert_eq!(report(&stdout)["residuals"]["dim"].as_f64().unwrap(), 2.0);
    }
    // Dephasing is its own adjoint but not multiplicative.
    assert_eq!(qgph(&["channel", "check-cohom", "--map", s(&map)]).0, 1);
}

#[test]
fn channel_from_relation_reproduces_it() {
    let d = TempDir::new().unwrap();
    let alg = write(&d, "m.json", &json!({"ambient": 2, "blocks": [1, 1]}));
    // Looped K2: every matrix unit.
    let rel = write(&d, "r.json", &json!({"space": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}));
    let (code, stdout, stderr) = qgph(&["channel", "from-relation", "--algebra", s(&alg), "--relation", s(&rel), "--json"]);
    assert_eq!(code, 0, "{stderr}");
    let r = report(&stdout);
    assert!(r["residuals"]["trace_defect"].as_f64().unwrap() <= 1e-8);
    let phi = write(&d, "phi.json", &r["payload"]);
    let (code, stdout, _) = qgph(&["channel", "confusability", "--map", s(&phi), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(report(&stdout)["residuals"]["dim"].as_f64().unwrap(), 4.0);
}

#[test]
fn theorem_o_on_a_classical_hom() {
    let d = TempDir::new().unwrap();
    // The identity on looped K2, as a diagonal algebra relation.
    let alg = write(&d, "m.json", &json!({"ambient": 2, "blocks": [1, 1]}));
    let f = write(&d, "f.json", &json!({"space": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]]}));
    let k2 = write(&d, "r.json", &json!({"space": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}));
    let diag = write(&d, "s.json", &json!({"space": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]]}));
    let base = ["channel", "theorem-o", "--source-algebra", s(&alg), "--target-algebra", s(&alg), "--function", s(&f)];
    let (code, _, stderr) = qgph(&[&base[..], &["--source-relation", s(&diag), "--target-relation", s(&k2)]].concat());
    assert_eq!(code, 0, "{stderr}");
    let (code, stdout, _) = qgph(&[&base[..], &["--source-relation", s(&k2), "--target-relation", s(&diag), "--json"]].concat());
    assert_eq!(code, 1);
    let r = report(&stdout);
    assert_eq!(r["residuals"]["intertwines"], r["residuals"]["pushforward"]);
    assert_eq!(r["residuals"]["intertwines"], r["residuals"]["pullback"]);
}

#[test]
fn graph_to_weaver_dimension() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "k3.json", &k(3));
    let (code, stdout, _) = qgph(&["convert", "graph-to-weaver", "--graph", s(&g), "--json"]);
    assert_eq!(code, 0);
    let r = report(&stdout);
    assert_eq!(r["residuals"]["dim"].as_f64().unwrap(), 6.0);
    assert_eq!(r["payload"]["algebra"]["blocks"], json!([1, 1, 1]));
}

#[test]
fn malformed_input_exits_2_with_location() {
    let d = TempDir::new().unwrap();
    let p = d.path().join("bad.json");
    std::fs::write(&p, "{\"vertices\": [\"a\",\n  \"b\" \"c\"]}").unwrap();
    let (code, _, stderr) = qgph(&["cl", "--graph", s(&p)]);
    assert_eq!(code, 2);
    assert!(stderr.contains("bad.json:2:"), "{stderr}");
    let missing = d.path().join("missing.json");
    assert_eq!(qgph(&["cl", "--graph", s(&missing)]).0, 2);
    let unknown = write(&d, "g.json", &json!({"vertices": ["a"], "edges": [["a", "z"]]}));
    let (code, _, stderr) = qgph(&["cl", "--graph", s(&unknown)]);
    assert_eq!(code, 2);
    assert!(stderr.contains("`z`"), "{stderr}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qgph(&["frobnicate"]).0, 2);
    assert_eq!(qgph(&["cl", "--graph", "x.json", "--bogus"]).0, 2);
}

fn strip_elapsed(stdout: &str) -> Value {
    let mut v = report(stdout);
    v.as_object_mut().unwrap().remove("elapsed");
    v
}

#[test]
fn seeded_reports_are_deterministic() {
    let d = TempDir::new().unwrap();
    let game = c5_k3(&d);
    let args = ["game", "search", "--game", s(&game), "--n", "2", "--seed", "11", "--json"];
    let (a, b) = (qgph(&args).1, qgph(&args).1);
    assert_eq!(strip_elapsed(&a).to_string(), strip_elapsed(&b).to_string());
}

#[test]
fn payloads_round_trip() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "g.json", &c5());
    let h = write(&d, "h.json", &k(3));
    let out = d.path().join("box.json");
    qgph(&["box", "--left", s(&g), "--right", s(&h), "--out", s(&out)]);
    // A classical graph is its own classical part.
    let again = d.path().join("again.json");
    let (code, _, _) = qgph(&["cl", "--graph", s(&out), "--out", s(&again)]);
    assert_eq!(code, 0);
    let first = std::fs::read_to_string(&out).unwrap();
    let second = std::fs::read_to_string(&again).unwrap();
    assert_eq!(first, second);
    // A found strategy re-parses and verifies.
    let game = c5_k3(&d);
    let strat = d.path().join("s.json");
    qgph(&["game", "search", "--game", s(&game), "--n", "2", "--out", s(&strat)]);
    assert_eq!(qgph(&["game", "verify", "--game", s(&game), "--strategy", s(&strat)]).0, 0);
}

#[test]
fn selftest_quick_passes() {
    let (code, stdout, _) = qgph(&["selftest", "--level", "quick"]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(stdout.matches("PASS criterion").count(), 11);
}
