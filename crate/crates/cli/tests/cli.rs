use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_restriction"))
        .args(args)
        .output()
        .expect("spawn restriction")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn rejects_non_prime_p() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "p = 4\nn = 2\n").unwrap();
    let out = run(&["system-check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("p must be an odd prime"), "{}", stderr(&out));
}

#[test]
fn rejects_negative_weights() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    let mut vals = vec!["1"; 9];
    vals[4] = "-0.5";
    std::fs::write(&w, vals.join(" ")).unwrap();
    let out = run(&[
        "measure-analyze",
        "--group",
        "Z3^2",
        "--set",
        &format!("weights={}", w.display()),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn rejects_wrong_weight_count() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    std::fs::write(&w, "1, 1, 1").unwrap();
    let out = run(&[
        "measure-analyze",
        "--group",
        "Z3^2",
        "--set",
        &format!("weights={}", w.display()),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("weights file has 3 entries"));
}

#[test]
fn exponent_table_values() {
    let out = run(&["exponents", "--n", "2", "--a", "1", "--b", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value = |name: &str| {
        text.lines()
            .find(|l| l.split_whitespace().next() == Some(name))
            .and_then(|l| l.split_whitespace().nth(1))
            .unwrap_or_else(|| panic!("row {name} missing in\n{text}"))
            .to_string()
    };
    assert_eq!(value("r0"), "6/5");
    assert_eq!(value("theta"), "2/3");
    assert_eq!(value("sigma"), "12/11");
    assert_eq!(value("tau"), "4");
    assert_eq!(value("conv_r0"), "3/2");
    assert_eq!(value("conv_s0"), "3");
}

#[test]
fn exponent_hypothesis_enforced() {
    let out = run(&["exponents", "--n", "2", "--a", "1", "--b", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("hypothesis"));
}

#[test]
fn system_check_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = run(&[
        "system-check", "--group", "F3^2", "--group", "F5^2", "--format", "both", "--out", out_dir,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(Path::new(out_dir).join("system-check.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("system,n,scale,quantity,bound,observed,pass"));
    assert!(csv.lines().skip(1).any(|l| l.starts_with("F3^2,")));
    assert!(csv.lines().skip(1).any(|l| l.starts_with("F5^2,")));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(out_dir).join("system-check.json")).unwrap())
            .unwrap();
    assert_eq!(json["pass"], serde_json::Value::Bool(true));
    assert_eq!(json["reports"].as_array().map(Vec::len), Some(2));
    assert!(Path::new(out_dir).join("system-check.manifest.json").exists());
}

#[test]
fn seed_changes_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = run(&[
            "scan", "--group", "Z3^2", "--seed", "7", "--samples", "200", "--format", "json", "--out",
            d.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(
        std::fs::read(a.join("scan.json")).unwrap(),
        std::fs::read(b.join("scan.json")).unwrap()
    );
}
