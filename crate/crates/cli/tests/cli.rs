use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;

use hermsig::{parse_session, render, run, Op, RunOptions, SessionDocument};
use proptest::prelude::*;
use serde_json::{json, Value};

const FIXTURES: [&str; 5] = ["minimal", "full", "towers", "real_quadratic", "acceptance"];

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

fn parse(text: &str) -> SessionDocument {
    parse_session(text).unwrap_or_else(|d| panic!("{d}"))
}

fn hermsig(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hermsig")).args(args).output().unwrap()
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hermsig-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// A document over ℚ with the Hamilton quaternions declared as `H`.
fn hamilton_doc(forms: &str, commands: &str) -> String {
    format!(
        r#"{{
  "seed": 3,
  "field": {{ "min_poly": ["0", "1"] }},
  "algebras": [{{ "name": "H", "family": "quat_symp", "a": "-1", "b": "-1", "n": 1 }}],
  "forms": [{forms}],
  "commands": [{commands}]
}}"#
    )
}

fn ok_value(report: &hermsig::Report, i: usize) -> Value {
    report.records[i].outcome.clone().unwrap_or_else(|e| panic!("record {i}: {}", e.message))
}

#[test]
fn minimal_document_is_valid() {
    let doc = parse(&fixture("minimal"));
    assert_eq!(doc.commands.len(), 1);
    let report = run(&doc, RunOptions::default());
    assert_eq!(ok_value(&report, 0), json!({ "ordering": 0, "signature": 1 }));
}

#[test]
fn full_document_has_twelve_records() {
    let doc = parse(&fixture("full"));
    let report = run(&doc, RunOptions::default());
    assert_eq!(report.records.len(), 12);
    assert!(!report.has_errors(), "{}", report.to_json());
}

#[test]
fn fixtures_exercise_every_command() {
    let mut seen = BTreeSet::new();
    for name in FIXTURES {
        let doc = parse(&fixture(name));
        let report = run(&doc, RunOptions::default());
        assert!(!report.has_errors(), "{name}: {}", report.to_json());
        seen.extend(doc.commands.iter().map(|c| c.op));
    }
    let all: BTreeSet<Op> = Op::ALL.iter().copied().collect();
    assert_eq!(seen, all);
}

#[test]
fn hamilton_total_signature_and_torsion() {
    let text = hamilton_doc(
        r#"{ "name": "h", "algebra": "H", "diagonal": ["1", "-2", "3"] },
           { "name": "t", "algebra": "H", "diagonal": ["1", "-2"] }"#,
        r#"{ "op": "total-sign", "form": "h" }, { "op": "torsion", "form": "t" }"#,
    );
    let report = run(&parse(&text), RunOptions::default());
    assert_eq!(ok_value(&report, 0), json!({ "table": [{ "ordering": 0, "signature": 1 }] }));
    assert_eq!(ok_value(&report, 1), json!({ "torsion": true }));
}

#[test]
fn undeclared_form_gives_error_record_and_nonzero_exit() {
    let text = hamilton_doc(
        r#"{ "name": "h", "algebra": "H", "diagonal": ["1"] }"#,
        r#"{ "op": "sign", "form": "h" }, { "op": "sign", "form": "nope" }"#,
    );
    let report = run(&parse(&text), RunOptions::default());
    assert!(report.records[0].outcome.is_ok());
    let err = report.records[1].outcome.clone().unwrap_err();
    assert!(err.message.contains("undeclared form `nope`"));
    assert_eq!(err.loc.line, 6);
    assert!(report.has_errors());

    let path = write_temp("undeclared.json", &text);
    let out = hermsig(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"][1]["status"], "error");
    assert_eq!(v["results"][1]["index"], 1);
}

#[test]
fn non_hermitian_gram_is_rejected_with_coordinates() {
    let text = r#"{
  "field": { "min_poly": ["0", "1"] },
  "algebras": [{ "name": "U", "family": "unitary", "delta": "-1" }],
  "forms": [{ "name": "g", "algebra": "U", "gram": [["1", ["0", "1"]], [["0", "1"], "2"]] }]
}"#;
    let d = parse_session(text).unwrap_err();
    assert!(d.message.contains("(1, 0)"), "{d}");
    assert_eq!((d.loc.line, d.loc.col), (4, 13));

    let path = write_temp("gram.json", text);
    let out = hermsig(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":4:13:"));
}

fn diagnostic(text: &str) -> (usize, usize, String) {
    let d = parse_session(text).unwrap_err();
    (d.loc.line, d.loc.col, d.message)
}

#[test]
fn diagnostics_carry_locations() {
    let (l, c, m) = diagnostic("{\n  \"field\": {\"min_poly\": [\"0\", \"1\"]},\n  \"commands\": [,]\n}");
    assert!(m.starts_with("syntax error"), "{m}");
    assert_eq!(l, 3);
    assert!(c > 1);

    let (l, c, m) = diagnostic(&hamilton_doc("", "").replace("quat_symp", "octonion"));
    assert!(m.contains("unknown family `octonion`"), "{m}");
    assert_eq!((l, c), (4, 41));

    let (l, _, m) = diagnostic("{\n \"field\": { \"min_poly\": [\"1\", \"2\", \"1\"] }\n}");
    assert!(m.contains("not squarefree"), "{m}");
    assert_eq!(l, 2);

    let (_, _, m) = diagnostic(
        r#"{ "field": { "min_poly": ["-2", "0", "1"] },
             "algebras": [{ "name": "U", "family": "unitary", "delta": "2" }] }"#,
    );
    assert!(m.contains("square"), "{m}");

    let (l, c, m) = diagnostic(&hamilton_doc(r#"{ "name": "h", "algebra": "H", "diagonal": ["1 + y"] }"#, ""));
    assert!(m.contains("unknown identifier `y`"), "{m}");
    assert_eq!((l, c), (5, 62));

    let (_, _, m) = diagnostic(&hamilton_doc(r#"{ "name": "h", "algebra": "G", "diagonal": ["1"] }"#, ""));
    assert!(m.contains("undeclared algebra `G`"), "{m}");

    let (_, _, m) = diagnostic(&hamilton_doc(r#"{ "name": "H", "quadratic": ["1"] }"#, ""));
    assert!(m.contains("duplicate name `H`"), "{m}");

    let (_, _, m) = diagnostic(&hamilton_doc("", r#"{ "op": "sign", "from": "h" }"#));
    assert!(m.contains("requires key `form`"), "{m}");

    let (_, _, m) = diagnostic(&hamilton_doc("", r#"{ "op": "sign", "form": "h", "colour": 1 }"#));
    assert!(m.contains("unknown key `colour`"), "{m}");

    let (_, _, m) = diagnostic(&hamilton_doc("", r#"{ "op": "signature", "form": "h" }"#));
    assert!(m.contains("unknown op"), "{m}");

    let (_, _, m) = diagnostic(&hamilton_doc(r#"{ "name": "h", "algebra": "H", "diagonal": [["0", "1", "0", "0"]] }"#, ""));
    assert!(m.contains("symmetry"), "{m}");
}

#[test]
fn fixtures_round_trip() {
    for name in FIXTURES {
        let doc = parse(&fixture(name));
        let rendered = render(&doc);
        let again = parse(&rendered);
        assert_eq!(again, doc, "{name}");
        assert_eq!(render(&again), rendered, "{name}");
    }
}

#[test]
fn runs_are_byte_identical() {
    for name in FIXTURES {
        let path = fixture_path(name);
        let a = hermsig(&["run", path.to_str().unwrap()]);
        let b = hermsig(&["run", path.to_str().unwrap()]);
        assert_eq!(a.status.code(), Some(0), "{name}");
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

fn count_leaves(v: &Value) -> usize {
    match v {
        Value::Object(m) if !m.is_empty() => m.values().map(count_leaves).sum(),
        Value::Array(a) if a.iter().any(|x| x.is_array() || x.is_object()) => a.iter().map(count_leaves).sum(),
        _ => 1,
    }
}

#[test]
fn table_and_json_agree() {
    for name in FIXTURES {
        let report = run(&parse(&fixture(name)), RunOptions::default());
        let json: Value = serde_json::from_str(&report.to_json()).unwrap();
        let table = report.to_table();
        let mut lines = table.lines();
        assert_eq!(lines.next().unwrap(), format!("seed = {}", json["seed"]));
        let mut blocks: Vec<(String, usize)> = Vec::new();
        for line in lines {
            if line.starts_with('#') {
                blocks.push((line.to_string(), 0));
            } else {
                blocks.last_mut().unwrap().1 += 1;
            }
        }
        let results = json["results"].as_array().unwrap();
        assert_eq!(blocks.len(), results.len());
        for ((header, leaves), r) in blocks.iter().zip(results) {
            let words: Vec<&str> = header.split_whitespace().collect();
            assert_eq!(words[0], format!("#{}", r["index"]));
            assert_eq!(words[1], r["op"]);
            assert_eq!(words[2], r["status"]);
            let body = if r["status"] == "ok" { &r["value"] } else { &r["error"] };
            assert_eq!(*leaves, count_leaves(body), "{name} {header}");
        }
        for r in results.iter().filter(|r| r["status"] == "ok") {
            for s in string_leaves(&r["value"]) {
                assert!(table.contains(&s), "{name}: `{s}` missing from the table");
            }
        }
    }
}

fn string_leaves(v: &Value) -> Vec<String> {
    match v {
        Value::String(s) => vec![s.clone()],
        Value::Array(a) => a.iter().flat_map(string_leaves).collect(),
        Value::Object(m) => m.values().flat_map(string_leaves).collect(),
        _ => vec![],
    }
}

#[test]
fn exit_codes() {
    assert_eq!(hermsig(&[]).status.code(), Some(1));
    assert_eq!(hermsig(&["frobnicate"]).status.code(), Some(1));
    let full = fixture_path("full");
    let full = full.to_str().unwrap();
    assert_eq!(hermsig(&["run", full, "--format=yaml"]).status.code(), Some(1));
    assert_eq!(hermsig(&["run", full, "--search-height=0"]).status.code(), Some(1));
    assert_eq!(hermsig(&["run", "/nonexistent/doc.json"]).status.code(), Some(1));
    assert_eq!(hermsig(&["check", full]).status.code(), Some(0));
    let bad = write_temp("bad.json", "{ \"field\": 3 }");
    assert_eq!(hermsig(&["check", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(hermsig(&["run", bad.to_str().unwrap()]).status.code(), Some(2));
    let table = hermsig(&["run", full, "--format=table"]);
    assert_eq!(table.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&table.stdout).contains("total-sign"));
}

#[test]
fn search_options_reach_the_search() {
    let text = r#"{
  "field": { "min_poly": ["-2", "0", "1"] },
  "algebras": [{ "name": "M", "family": "split_orth" }],
  "elements": [{ "name": "u", "algebra": "M", "value": "3 + x" }],
  "commands": [{ "op": "sos-find", "element": "u" }]
}"#;
    let doc = parse(text);
    let opts = RunOptions { search: hermsig_core::cones::SearchBounds { height: 2, terms: 2 } };
    let v = ok_value(&run(&doc, opts), 0);
    assert!(v["outcome"] == "certificate" || v["outcome"] == "unknown", "{v}");
    if v["outcome"] == "certificate" {
        assert_eq!(v["verified"], true);
        assert!(v["terms"].as_array().unwrap().len() <= 2);
    }
}

fn arb_rational() -> impl Strategy<Value = String> {
    (-20i64..=20, 1i64..=9).prop_map(|(p, q)| if q == 1 { p.to_string() } else { format!("{p}/{q}") })
}

fn arb_expr() -> impl Strategy<Value = String> {
    proptest::collection::vec(arb_rational(), 1..4).prop_map(|cs| {
        cs.iter().enumerate().map(|(k, c)| format!("({c})*x^{k}")).collect::<Vec<_>>().join(" + ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn render_parse_round_trip(
        quad in proptest::collection::vec(arb_expr(), 1..4),
        diag in proptest::collection::vec(arb_rational(), 1..4),
        slots in proptest::collection::vec(arb_expr(), 0..3),
        ordering in 0usize..2,
        seed in any::<u64>(),
    ) {
        let quoted = |v: &[String]| v.iter().map(|s| format!("\"{s}\"")).collect::<Vec<_>>().join(", ");
        let text = format!(
            r#"{{
  "seed": {seed},
  "field": {{ "min_poly": ["-3", "0", "1"] }},
  "algebras": [{{ "name": "M", "family": "split_orth", "n": 1 }},
               {{ "name": "Q", "family": "quat_symp", "a": "-1", "b": "x", "n": 2 }}],
  "forms": [{{ "name": "f", "quadratic": [{}] }},
            {{ "name": "d", "algebra": "Q", "diagonal": [{}] }}],
  "elements": [{{ "name": "e", "algebra": "Q", "value": [["1", ["0", "1", "2", "x"]], [["0", "-1", "-2", "-x"], "3"]] }}],
  "commands": [{{ "op": "sign", "form": "f", "ordering": {ordering} }},
               {{ "op": "sos-find", "element": "e", "slots": [{}], "k": 2 }}]
}}"#,
            quoted(&quad), quoted(&diag), quoted(&slots),
        );
        match parse_session(&text) {
            Ok(doc) => {
                let again = parse_session(&render(&doc)).unwrap();
                prop_assert_eq!(again, doc);
            }
            // zero entries or slots are legitimately rejected
            Err(d) => prop_assert!(d.message.contains("zero") || d.message.contains("is zero"), "{}", d),
        }
    }
}
