use std::io::Write;
use std::process::{Command, Output};

fn ceppa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ceppa"))
        .args(args)
        .env_remove("CEPPA_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('\t')))
}

#[test]
fn roots_tsv_reports_statistics() {
    let o = ceppa(&["roots", "--type", "E", "--rank", "6"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(field(&out, "coxeter"), Some("12"));
    assert_eq!(field(&out, "positive_roots"), Some("36"));
    assert_eq!(field(&out, "exponents"), Some("1,4,5,7,8,11"));
}

#[test]
fn roots_json_parses() {
    let o = ceppa(&["roots", "--type", "D", "--rank", "5", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["positive_roots"], 20);
    assert_eq!(v["roots"].as_array().unwrap().len(), 20);
}

#[test]
fn invalid_type_is_usage_error() {
    assert_eq!(ceppa(&["roots", "--type", "E", "--rank", "5"]).status.code(), Some(2));
    assert_eq!(ceppa(&["roots", "--type", "X", "--rank", "3"]).status.code(), Some(2));
    assert_eq!(ceppa(&["verify", "--type", "A", "--rank", "2", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(ceppa(&["verify", "--type", "A", "--rank", "2", "--mu", "1,0"]).status.code(), Some(2));
}

#[test]
fn invalid_budget_env_is_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_ceppa"))
        .args(["build", "--type", "A", "--rank", "2"])
        .env("CEPPA_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = ceppa(&[
        "verify",
        "--type",
        "D",
        "--rank",
        "4",
        "--mu",
        "random",
        "--seed",
        "7",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["family"], "D");
    assert_eq!(v["rank"], 4);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] != "fail"));
}

#[test]
fn verify_budget_skip_still_passes() {
    let o = ceppa(&["verify", "--type", "E", "--rank", "6", "--suite", "algebra", "--budget", "1000"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("skipped"));
}

#[test]
fn trace_sides_agree() {
    let o = ceppa(&["trace", "--type", "D", "--rank", "4", "--mu", "2,3,5,7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip_while(|l| !l.starts_with("vertex")).skip(1).collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let cols: Vec<&str> = r.split('\t').collect();
        assert_eq!(cols[2], cols[3]);
    }
}

#[test]
fn membership_methods_agree() {
    // Top degree of A_3 is z^2, where the trace of z^2 e_i is (1/2, -1, 1/2) and eps = (1, -1, 1).
    let in_top = ceppa(&["membership", "--type", "A", "--rank", "3", "--phi", "2,-1,0", "--s", "2"]);
    assert!(in_top.status.success());
    assert_eq!(field(&stdout(&in_top), "result"), Some("in [A,A]"));
    let out_top = ceppa(&["membership", "--type", "A", "--rank", "3", "--phi", "1,0,0", "--s", "2"]);
    assert!(out_top.status.success());
    assert_eq!(field(&stdout(&out_top), "result"), Some("not in [A,A]"));
    let bad = ceppa(&["membership", "--type", "A", "--rank", "3", "--phi", "1,0", "--s", "0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn build_reports_dimensions() {
    let o = ceppa(&["build", "--type", "A", "--rank", "3", "--no-z"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "total"), Some("10"));
    let b = ceppa(&["build", "--type", "D", "--rank", "4", "--b-algebra"]);
    assert!(b.status.success());
    assert!(stdout(&b).contains("budget_estimate"));
}

#[test]
fn build_refuses_over_budget() {
    let o = ceppa(&["build", "--type", "E", "--rank", "8"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn presentation_file_round_trip() {
    let emitted = ceppa(&["build", "--type", "A", "--rank", "3", "--emit-presentation"]);
    assert!(emitted.status.success());
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(&emitted.stdout).unwrap();
    let path = file.path().to_str().unwrap();
    let from_file = ceppa(&["build", "--presentation-file", path, "--max-degree", "6"]);
    let direct = ceppa(&["build", "--type", "A", "--rank", "3"]);
    assert!(from_file.status.success());
    assert_eq!(field(&stdout(&from_file), "total"), field(&stdout(&direct), "total"));
}

#[test]
fn handwritten_presentation() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# one loop with x^2 = 0\nvertices 1\ngen x 1 1\nrel x.x").unwrap();
    let o = ceppa(&["build", "--presentation-file", file.path().to_str().unwrap(), "--max-degree", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(field(&stdout(&o), "total"), Some("2"));
    let missing = ceppa(&["build", "--presentation-file", file.path().to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}
