use std::process::{Command, Output};

fn diwed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diwed")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// The CSV body without the `#` header lines.
fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn local_bound_examples() {
    let rg4 = stdout(&diwed(&["local-bound", "--catalog", "RG4"]));
    assert!(body(&rg4)[1].starts_with("RG4,3,"), "{rg4}");
    let s3 = stdout(&diwed(&["local-bound", "--gamma", "2", "--n", "3"]));
    assert_eq!(body(&s3)[1].split(',').nth(1), Some("1"));
    let fg6 = stdout(&diwed(&["local-bound", "--catalog", "FG6"]));
    assert!(body(&fg6)[1].starts_with("FG6,5,"));
}

#[test]
fn outputs_carry_provenance() {
    let csv = stdout(&diwed(&["quantum-bound", "--n", "3", "--gamma", "2", "--seed", "9"]));
    assert!(csv.starts_with("# tool: diwed "));
    assert!(csv.contains("# seed: 9\n"));
    assert!(csv.contains("# command: "));
    assert!(csv.contains("# tolerance: "));

    let json = stdout(&diwed(&["quantum-bound", "--n", "3", "--gamma", "2", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["seed"], 0);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!((v["result"]["value"].as_f64().unwrap() - 5.0 / 3.0).abs() < 1e-12);
}

#[test]
fn reproduce_table3_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t3.csv");
    let out = diwed(&["reproduce", "table3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows = body(&text);
    assert_eq!(rows[0], "table,row,column,reference_expr,reference,computed,comparison,tolerance,match");
    assert_eq!(rows.len(), 9);
    assert!(rows[1..].iter().all(|r| r.ends_with(",match")), "{text}");
}

#[test]
fn reproduce_fig3_first_row() {
    let text = stdout(&diwed(&["reproduce", "fig3", "--n", "3,4", "--gamma-step", "0.1"]));
    let rows = body(&text);
    assert_eq!(rows[0], "n,dmin_gamma2,dmin_optimized,gamma_star");
    assert!(rows[1].starts_with("3,3,"));
    assert!(rows[2].starts_with("4,5,"));
}

#[test]
fn catalog_and_synthesis() {
    let cat = stdout(&diwed(&["catalog", "RG3"]));
    assert!(body(&cat)[1].starts_with("RG3,2,"), "{cat}");
    let syn = stdout(&diwed(&["synthesize", "--family", "ring 3", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&syn).unwrap();
    let found = v["result"]["inequalities"].as_array().unwrap();
    assert!(!found.is_empty());
    assert!(found.iter().all(|i| i["quantum_value"].as_f64().unwrap() > i["local_bound"].as_f64().unwrap()));
}

#[test]
fn synthesize_reads_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring4.txt");
    std::fs::write(&path, "4; 1 2; 2 3; 3 4; 4 1").unwrap();
    let text = stdout(&diwed(&["synthesize", "--graph", path.to_str().unwrap()]));
    assert!(body(&text).len() > 1);
}

#[test]
fn seesaw_is_reproducible() {
    let args = ["seesaw", "--catalog", "RG3", "--k", "2", "--restarts", "4", "--seed", "3"];
    let a = stdout(&diwed(&args));
    let b = stdout(&diwed(&args));
    assert_eq!(a, b);
    let value: f64 = body(&a)[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((value - 2.0 * 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    assert_eq!(diwed(&["local-bound", "--catalog", "XX9"]).status.code(), Some(2));
    assert_eq!(diwed(&["reproduce", "table9"]).status.code(), Some(2));
    assert_eq!(diwed(&["quantum-bound", "--n", "3", "--gamma", "7"]).status.code(), Some(2));
    assert_eq!(diwed(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(diwed(&["reproduce", "fig2", "--theta-grid", "1:2"]).status.code(), Some(2));
}
