use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn qetale(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qetale")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn baskets_text_and_json() {
    let o = qetale(&["baskets", "--k2", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = qetale(&["baskets", "--k2", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v, serde_json::json!([{"s": 7, "t": 0}, {"s": 2, "t": 2}]));
}

#[test]
fn bad_input_fails() {
    assert_eq!(qetale(&["baskets", "--k2", "9"]).status.code(), Some(1));
    assert_eq!(
        qetale(&["search", "--k2", "1", "--format", "xml"]).status.code(),
        Some(1)
    );
    assert!(!qetale(&["pi1", "--candidate", "/nonexistent"]).status.success());
}

#[test]
fn signatures_list() {
    let o = qetale(&["signatures", "--k2", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let sigs: Vec<&serde_json::Value> = v.as_array().unwrap().iter().map(|r| &r["signature"]["m"]).collect();
    assert!(sigs.contains(&&serde_json::json!([2, 2, 2, 4])));
    assert!(sigs.contains(&&serde_json::json!([4, 4, 4])));
}

#[test]
fn search_then_pi1_of_a_candidate() {
    let dir = scratch("search");
    let out = dir.join("k2-1.csv");
    let cands = dir.join("candidates");
    let o = qetale(&[
        "search",
        "--k2",
        "1",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
        "--candidates",
        cands.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(
        lines[1].starts_with("1,\"2A1,2A3\",\"2^3,4\",Z2^3:Z4,16,1,Z4,Z4,"),
        "{}",
        lines[1]
    );
    let file = cands.join("k2-1-01.candidate");
    let o = qetale(&["pi1", "--candidate", file.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pi1"], "Z4");
    assert_eq!(v["h1"], serde_json::json!([4]));
}

#[test]
fn verify_table_passes_on_the_bundled_catalog() {
    let o = qetale(&["verify-table", "--format", "csv"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(0), "{err}");
    assert_eq!(
        err.lines()
            .filter(|l| l.starts_with("criterion ") && l.contains("PASS"))
            .count(),
        7
    );
    assert_eq!(stdout(&o).lines().count(), 14);
}

#[test]
fn verify_table_reports_a_mismatch() {
    let dir = scratch("partial");
    let cat = dir.join("one.catalog");
    fs::write(&cat, "group Z2^2:Z4 16 8\ngen (1 5 3 7)(2 6 4 8)\ngen (5 6)(7 8)\n").unwrap();
    let o = qetale(&["verify-table", "--catalog", cat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("criterion 1 [known surfaces] FAIL"));
}
