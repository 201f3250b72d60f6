use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const WIELANDT_5: &str = "5
-inf 0 -inf -inf -inf
-inf -inf 0 -inf -inf
-inf -inf -inf 0 -inf
0 -inf -inf -inf 0
0 -inf -inf -inf -inf
";

fn maxplus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxplus")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_reports_the_wielandt_skeleton() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "w5.txt", WIELANDT_5);
    let out = maxplus(&["--json", "analyze", &file]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        ["T", "T1", "attains_dm", "attains_wiel", "crit_rc_transient", "dm", "g", "gamma", "lambda", "wi"]
    );
    assert_eq!(v["T1"], 17);
    assert_eq!(v["wi"], 17);
    assert_eq!(v["attains_wiel"], true);
    assert_eq!(v["lambda"], "0");
}

#[test]
fn generated_dm_matrix_passes_check_dm() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.txt");
    let file = file.to_str().unwrap();
    let out = maxplus(&["generate", "dm", "--n", "5", "--g", "3", "--seed", "7", "--out", file]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let prov: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(format!("{file}.json")).unwrap()).unwrap();
    assert_eq!(prov["t1"], 14);
    assert_eq!(prov["bound"], 14);

    let out = maxplus(&["--json", "check-dm", file]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["holds"], true);
    for key in ["coprime", "a2_dominated", "chord", "power"] {
        assert_eq!(v[key]["holds"], true, "{key}");
    }

    let out = maxplus(&["--json", "analyze", file]);
    assert_eq!(json(&out)["attains_dm"], true);
}

#[test]
fn generation_is_deterministic() {
    let a = maxplus(&["generate", "wielandt", "--n", "6", "--case", "n", "--seed", "3"]);
    let b = maxplus(&["generate", "wielandt", "--n", "6", "--case", "n", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn bad_numbering_gives_negative_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.txt");
    let file = file.to_str().unwrap();
    maxplus(&["generate", "dm", "--n", "5", "--g", "3", "--seed", "2", "--out", file]);
    let out = maxplus(&["check-dm", file, "--numbering", "2,3,4,5,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = maxplus(&["check-dm", file, "--numbering", "1,1,2,3,4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_wiel_and_crit_rc_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "w5.txt", WIELANDT_5);
    assert_eq!(maxplus(&["check-wiel", &file]).status.code(), Some(0));
    assert_eq!(maxplus(&["check-crit-rc", &file]).status.code(), Some(0));

    let diag = write(dir.path(), "d.txt", "2\n0 -inf\n-inf 0\n");
    assert_eq!(maxplus(&["check-wiel", &diag]).status.code(), Some(2));
    assert_eq!(maxplus(&["check-crit-rc", &diag]).status.code(), Some(2));
}

#[test]
fn oracle_walk_is_interesting_at_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.txt");
    let file = file.to_str().unwrap();
    maxplus(&["generate", "dm", "--n", "5", "--g", "3", "--seed", "2", "--out", file]);
    let out = maxplus(&["--json", "oracle", file, "--i", "4", "--j", "5", "--t", "13"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["interesting"], true);
    let nodes = v["nodes"].as_array().unwrap();
    assert_eq!(nodes.first().unwrap(), 4);
    assert_eq!(nodes.last().unwrap(), 5);
}

#[test]
fn powers_and_csr_reject_zero_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "w5.txt", WIELANDT_5);
    assert_eq!(maxplus(&["powers", &file, "--t", "0"]).status.code(), Some(1));
    assert_eq!(maxplus(&["csr", &file, "--t", "0"]).status.code(), Some(1));
    let out = maxplus(&["powers", &file, "--t", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("5\n"));
}

#[test]
fn malformed_input_and_unknown_commands_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "bad.txt", "2\n0 x\n0 0\n");
    assert_eq!(maxplus(&["analyze", &file]).status.code(), Some(1));
    assert_eq!(maxplus(&["analyze", "/nonexistent/file"]).status.code(), Some(1));
    assert_eq!(maxplus(&["bogus"]).status.code(), Some(1));
    assert_eq!(maxplus(&["--help"]).status.code(), Some(0));
}

#[test]
fn reads_matrix_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_maxplus"))
        .args(["--json", "analyze", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(WIELANDT_5.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["T1"], 17);
}
