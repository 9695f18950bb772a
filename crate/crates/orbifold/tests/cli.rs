use std::path::Path;
use std::process::{Command, Output};

use orbifold::json::ComplexJson;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbifold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn build_wheel_has_one_cone_point() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "wheel.json");
    let out = run(&["build", "wheel", "--rim", "5", "-o", &file]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["validate", &file]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["valid"], true);
    let cones: Vec<&Value> = report["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["kind"].as_str().unwrap().starts_with("cone"))
        .collect();
    assert_eq!(cones.len(), 1);
    assert_eq!(cones[0]["kind"], "cone(5)");
    assert_eq!(cones[0]["angular_excess_over_pi"], "-1/2");
}

#[test]
fn dist_on_unit_square() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "square.json",
        r#"{"side":"1","cells":1,"gluings":[],"whiskers":[]}"#,
    );
    let out = run(&[
        "dist",
        "--complex",
        &file,
        "--from",
        "0,0,0",
        "--to",
        "0,1,1",
        "--oracle",
        "4",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["distance"], "2");
    assert_eq!(v["cells"], serde_json::json!([0]));
    assert_eq!(v["oracle"][0]["value"], "2");
    assert_eq!(v["oracle"][1]["m"], 8);
}

#[test]
fn tightspan_of_six_cycle() {
    let out = run(&["tightspan", "--cycle", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["dimension"], 3);

    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "m.json",
        r#"[["0","1/2",1],["1/2",0,"1/2"],[1,"1/2",0]]"#,
    );
    let out = run(&["tightspan", "--metric", &file]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["dimension"], 1);
    assert_eq!(v["extreme_points"][0], serde_json::json!(["0", "1/2", "1"]));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["dist", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["validate", "/nonexistent/complex.json"])
            .status
            .code(),
        Some(2)
    );
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "bad.json", r#"{"side":"2/4","cells":1}"#);
    assert_eq!(run(&["validate", &file]).status.code(), Some(2));
    let square = write(&dir, "square.json", r#"{"side":"1","cells":1}"#);
    assert_eq!(
        run(&[
            "dist",
            "--complex",
            &square,
            "--from",
            "0,0,0",
            "--to",
            "0,2,0"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "distortion",
            "--rings",
            "2",
            "--pairs",
            "0",
            "--csv",
            &path(&dir, "x.csv")
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn validation_failures_exit_one_with_report() {
    let dir = TempDir::new().unwrap();
    // three squares around one corner
    let file = write(
        &dir,
        "order3.json",
        r#"{"side":"1","cells":3,"gluings":[
            {"a":[0,3],"b":[1,2],"reversed":false},
            {"a":[1,3],"b":[2,2],"reversed":false},
            {"a":[2,3],"b":[0,2],"reversed":false}]}"#,
    );
    let out = run(&["validate", &file]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], false);
    assert!(v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|x| x["code"] == "Order3ConePoint"));

    let out = run(&["build", "wheel", "--rim", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"], "RimTooSmall");

    let graph = write(
        &dir,
        "tri.json",
        r#"{"vertices":[0,1,2],"rotation":{"0":[1,2],"1":[2,0],"2":[0,1]}}"#,
    );
    let out = run(&["build", "squaregraph", "--graph", &graph]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"], "NotSquaregraph");
}

#[test]
fn build_export_reread_round_trip() {
    let dir = TempDir::new().unwrap();
    let complex = path(&dir, "t.json");
    let graph = path(&dir, "t-graph.json");
    let out = run(&[
        "build",
        "tess45",
        "--rings",
        "1",
        "-o",
        &complex,
        "--graph-out",
        &graph,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&complex).unwrap();

    let again = path(&dir, "t2.json");
    assert_eq!(
        run(&["build", "squaregraph", "--graph", &graph, "-o", &again])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(std::fs::read_to_string(&again).unwrap(), text);

    let svg = path(&dir, "t.svg");
    assert_eq!(
        run(&["export-svg", "--complex", &complex, "-o", &svg])
            .status
            .code(),
        Some(0)
    );
    let drawing = std::fs::read_to_string(&svg).unwrap();
    assert!(drawing.contains("<svg") && drawing.matches("<polygon").count() == 13);
    let gsvg = path(&dir, "g.svg");
    assert_eq!(
        run(&["export-svg", "--graph", &graph, "-o", &gsvg])
            .status
            .code(),
        Some(0)
    );
    assert!(std::fs::read_to_string(&gsvg).unwrap().contains("<circle"));

    let out = run(&["validate", &complex]);
    assert_eq!(out.status.code(), Some(0));
    let parsed = ComplexJson::parse(&text).unwrap();
    assert_eq!(parsed.side, "1");
    assert_eq!(parsed.designated.len(), 24);
    assert_eq!(
        serde_json::to_string_pretty(&parsed).unwrap(),
        text.trim_end()
    );
}

#[test]
fn helly_is_deterministic_and_embeds_seed() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "w.json");
    run(&["build", "wheel", "--rim", "6", "-o", &file]);
    let args = [
        "helly",
        "--complex",
        &file,
        "--trials",
        "12",
        "--seed",
        "9",
        "--threads",
        "2",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["m_final"], 64);
}

#[test]
fn distortion_writes_csv() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "d.csv");
    let out = run(&[
        "distortion",
        "--rings",
        "2",
        "--pairs",
        "40",
        "--seed",
        "3",
        "--csv",
        &csv,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["pairs"], 40);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 41);
    assert!(text.starts_with("pair,d_graph,d_hyp,ratio"));
}

fn embedding(dir: &TempDir, name: &str, backend: &str, placement: &str) -> String {
    write(
        dir,
        name,
        &format!(
            r#"{{"backend":"{backend}","adjacency":{{"0":[1],"1":[0,2],"2":[1]}},"placement":{placement}}}"#
        ),
    )
}

#[test]
fn greedy_verify_and_route() {
    let dir = TempDir::new().unwrap();
    let good = embedding(
        &dir,
        "good.json",
        "dyadic",
        r#"{"0":{"x":"","y":""},"1":{"x":"","y":"1"},"2":{"x":"","y":"11"}}"#,
    );
    let out = run(&["greedy", "verify", "--embedding", &good]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["greedy"], true);
    let out = run(&[
        "greedy",
        "route",
        "--embedding",
        &good,
        "--from",
        "0",
        "--to",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["path"], serde_json::json!([0, 1, 2]));

    let bad = embedding(
        &dir,
        "bad.json",
        "dyadic",
        r#"{"0":{"x":"","y":"1"},"1":{"x":"","y":"0"},"2":{"x":"","y":"11"}}"#,
    );
    let out = run(&["greedy", "verify", "--embedding", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "greedy",
        "route",
        "--embedding",
        &bad,
        "--from",
        "0",
        "--to",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["stuck_at"], 0);

    let notancestor = embedding(
        &dir,
        "na.json",
        "dyadic",
        r#"{"0":{"x":"1","y":"0"},"1":{"x":"","y":"0"},"2":{"x":"","y":"11"}}"#,
    );
    assert_eq!(
        run(&["greedy", "verify", "--embedding", &notancestor])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn greedy_in_a_complex() {
    let dir = TempDir::new().unwrap();
    write(
        &dir,
        "strip.json",
        r#"{"side":"1","cells":2,"gluings":[{"a":[0,0],"b":[1,2],"reversed":false}]}"#,
    );
    let e = embedding(
        &dir,
        "e.json",
        "complex:strip.json",
        r#"{"0":{"cell":0,"x":"0","y":"1/2"},"1":{"cell":0,"x":"1","y":"1/2"},"2":{"cell":1,"x":"1","y":"1/2"}}"#,
    );
    let out = run(&["greedy", "verify", "--embedding", &e]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout_json(&out)["pairs_checked"], 6);
    assert!(Path::new(&path(&dir, "strip.json")).exists());
}
