use std::path::PathBuf;
use std::process::{Command, Output};

use localelim::samples;
use localelim_cli::load_problem;
use localelim_cli::problem_file::{export_problem, parse_problem};
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_localelim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn fixtures_match_the_built_in_samples() {
    let primer = load_problem(fixture("primer.json").as_ref()).unwrap();
    assert_eq!(primer, samples::primer());
    assert_eq!(primer.num_vars(), 7);
    assert_eq!(primer.constraints.len(), 4);
    assert_eq!(primer.objective.len(), 7);

    let tables = load_problem(fixture("tables.json").as_ref()).unwrap();
    assert_eq!(tables, samples::unconstrained_tables());
    assert!(tables
        .objective
        .iter()
        .all(|c| matches!(c, localelim::ObjectiveComponent::Table(_))));
    assert_eq!(tables.objective.len(), 4);
}

#[test]
fn exported_fixtures_round_trip() {
    for name in ["primer.json", "tables.json", "empty-constraints.json", "infeasible.json"] {
        let p = load_problem(fixture(name).as_ref()).unwrap();
        assert_eq!(parse_problem(&export_problem(&p), name).unwrap(), p, "{name}");
    }
}

#[test]
fn treedec_with_a_fixed_order() {
    let o = run(&["solve", &fixture("primer.json"), "--method", "treedec", "--order-file", &fixture("chain.ord")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&o);
    assert_eq!(r["status"], "optimal");
    assert_eq!(r["value"], 18);
    assert_eq!(r["stats"]["td_width"], 3);
    assert_eq!(r["stats"]["induced_width"], 3);
    assert_eq!(r["stats"]["bag_count"], 3);
    assert_eq!(r["stats"]["fill_edges"], 1);
    let assignment: Vec<i64> = (1..=7).map(|i| r["assignment"][format!("x{i}")].as_i64().unwrap()).collect();
    assert_eq!(assignment, vec![1, 0, 0, 1, 1, 1, 1]);
    // assignment keys keep variable order
    assert!(stdout(&o).find("\"x1\"").unwrap() < stdout(&o).find("\"x7\"").unwrap());
}

#[test]
fn every_method_finds_the_optimum() {
    let primer = fixture("primer.json");
    let buckets = fixture("buckets.part");
    let cases: Vec<Vec<&str>> = vec![
        vec!["--method", "brute"],
        vec!["--method", "nsdp"],
        vec!["--method", "nsdp", "--order", "mcs"],
        vec!["--method", "block"],
        vec!["--method", "block", "--partition-file", &buckets],
        vec!["--method", "treedec", "--order", "min-degree"],
        vec!["--method", "treedec", "--no-absorb", "--root", "0"],
    ];
    for extra in cases {
        let mut args = vec!["solve", &primer];
        args.extend(&extra);
        let o = run(&args);
        assert_eq!(code(&o), 0, "{extra:?}: {}", stderr(&o));
        assert_eq!(json(&o)["value"], 18, "{extra:?}");
    }
    let o = run(&["solve", &fixture("tables.json"), "--method", "block", "--partition-file", &fixture("blocks.part")]);
    let r = json(&o);
    assert_eq!(r["value"], 20);
    assert_eq!(r["sequence"], serde_json::json!(["x5", "x1, x2, x4", "x6, x7", "x3"]));
}

#[test]
fn unconstrained_linear_takes_every_positive_coefficient() {
    let o = run(&["solve", &fixture("empty-constraints.json"), "--method", "nsdp"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["value"], 4 + 2 + 7);
    assert_eq!(r["assignment"]["b"], 0);
}

#[test]
fn reports_are_deterministic_unless_timed() {
    let args = ["solve", &fixture("primer.json"), "--method", "block"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).get("wall_time_ms").is_none());
    let mut timed = args.to_vec();
    timed.push("--timing");
    assert!(json(&run(&timed))["wall_time_ms"].is_number());
}

#[test]
fn exit_codes() {
    let o = run(&["solve", &fixture("infeasible.json")]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["status"], "infeasible");
    assert!(json(&o)["value"].is_null());

    let o = run(&["solve", &fixture("bad-relation.json")]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("constraints[0].relation"), "{}", stderr(&o));

    let o = run(&["solve", &fixture("primer.json"), "--method", "brute", "--cap", "100"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("exceeds the cap"));

    let o = run(&["solve", &fixture("primer.json"), "--order", "lex-m"]);
    assert_eq!(code(&o), 3);

    let o = run(&["solve", &fixture("primer.json"), "--partition-file", &fixture("buckets.part")]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("nsdp"));

    let o = run(&["solve", &fixture("primer.json"), "--order-file", &fixture("buckets.part")]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("buckets.part:2:"), "{}", stderr(&o));

    let o = run(&["solve", &fixture("missing.json")]);
    assert_eq!(code(&o), 3);

    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn syntax_errors_report_positions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"version\": 1,\n  \"variables\": [{ \"name\": \"a\" },]\n}\n").unwrap();
    let o = run(&["stats", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("broken.json:3:"), "{}", stderr(&o));
}

#[test]
fn order_command() {
    let primer = fixture("primer.json");
    let o = run(&["order", &primer, "--order", "min-degree"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("# induced width: 2"), "{text}");
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines, ["x5", "x1", "x2", "x4", "x3", "x6", "x7"]);

    let text = stdout(&run(&["order", &primer, "--order-file", &fixture("chain.ord")]));
    assert!(text.contains("# induced width: 3"));
    assert!(text.contains("# fill edges: 1 (x1, x4)"));

    let text = stdout(&run(&["order", &primer, "--blocks"]));
    assert!(text.contains("x1, x4") && text.contains("x6, x7"), "{text}");

    // a written ordering file feeds back into solve
    let dir = tempfile::tempdir().unwrap();
    let ord = dir.path().join("mf.ord");
    assert_eq!(code(&run(&["order", &primer, "--out", ord.to_str().unwrap()])), 0);
    let o = run(&["solve", &primer, "--order-file", ord.to_str().unwrap()]);
    assert_eq!(json(&o)["value"], 18);
}

#[test]
fn path_graphs_have_width_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("path.json");
    let p = samples::chain(9, true);
    std::fs::write(&path, export_problem(&p)).unwrap();
    for h in ["min-degree", "min-fill", "mcs", "natural"] {
        let text = stdout(&run(&["order", path.to_str().unwrap(), "--order", h]));
        assert!(text.contains("# induced width: 1"), "{h}: {text}");
    }
}

#[test]
fn dot_exports() {
    let primer = fixture("primer.json");
    let ord = fixture("chain.ord");
    let text = stdout(&run(&["export-dot", &primer, "interaction"]));
    assert!(text.starts_with("graph interaction {"));
    assert_eq!(text.lines().filter(|l| l.ends_with(';') && !l.contains("--")).count(), 7);
    assert_eq!(text.matches(" -- ").count(), 9);

    let text = stdout(&run(&["export-dot", &primer, "filled", "--order-file", &ord]));
    assert_eq!(text.matches(" -- ").count(), 10);
    assert_eq!(text.matches("style=dashed").count(), 1);
    assert!(text.contains("\"x1\" -- \"x4\" [style=dashed];"));

    let text = stdout(&run(&["export-dot", &primer, "etree", "--order-file", &ord]));
    assert!(text.starts_with("digraph etree {"));
    assert_eq!(text.matches(" -> ").count(), 6);

    let text = stdout(&run(&["export-dot", &primer, "td", "--order-file", &ord]));
    assert_eq!(text.matches("shape=box").count(), 3);
    assert!(text.contains("label=\"{x1, x2, x3, x4}\""));
    let text = stdout(&run(&["export-dot", &primer, "td", "--order-file", &ord, "--no-absorb"]));
    assert_eq!(text.matches("shape=box").count(), 7);

    assert_eq!(code(&run(&["export-dot", &primer, "hypergraph"])), 3);
}

#[test]
fn treedec_documents_verify() {
    let primer = fixture("primer.json");
    let dir = tempfile::tempdir().unwrap();
    let td = dir.path().join("primer.td.json");
    let o = run(&["treedec", &primer, "--order-file", &fixture("chain.ord"), "--out", td.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&td).unwrap()).unwrap();
    assert_eq!(doc["width"], 3);
    assert_eq!(doc["bags"].as_array().unwrap().len(), 3);
    assert_eq!(doc["root"], 2);

    let o = run(&["verify-td", &primer, td.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("valid"));

    let o = run(&["verify-td", &primer, &fixture("single-bag.td.json")]);
    assert_eq!(code(&o), 0);

    let o = run(&["verify-td", &primer, &fixture("missing-edge.td.json")]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("condition (ii): edge (x1, x3)"), "{text}");
    assert!(!text.contains("(iii)"));

    let broken = dir.path().join("broken.td.json");
    std::fs::write(&broken, r#"{"version": 1, "bags": [["x1", "x99"]], "edges": []}"#).unwrap();
    let o = run(&["verify-td", &primer, broken.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("bags[0][1]"));
}

#[test]
fn stats_command() {
    let o = run(&["stats", &fixture("primer.json")]);
    assert_eq!(code(&o), 0);
    let s = json(&o);
    assert_eq!(s["variables"], 7);
    assert_eq!(s["edges"], 9);
    assert_eq!(s["search_space"], 128);
    assert_eq!(s["chordal"], true);
    let widths: Vec<(String, i64)> = s["orderings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| (o["heuristic"].as_str().unwrap().to_string(), o["induced_width"].as_i64().unwrap()))
        .collect();
    assert!(widths.contains(&("min-degree".into(), 2)));
    assert!(widths.contains(&("min-fill".into(), 2)));
}
