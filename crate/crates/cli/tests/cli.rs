use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn kinduct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinduct")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exit_codes() {
    let drain = corpus("phases/drain.c");
    assert_eq!(kinduct(&["verify", path(&drain)]).status.code(), Some(0));
    let bug = corpus("phases/drain_bug.c");
    assert_eq!(kinduct(&["verify", path(&bug)]).status.code(), Some(1));
    let pair = corpus("phases/countdown_pair.c");
    assert_eq!(kinduct(&["verify", path(&pair), "--k-max", "3"]).status.code(), Some(2));
    assert_eq!(kinduct(&["verify", path(&pair), "--k-max", "10", "--invariants", "builtin"]).status.code(), Some(0));
    let neg = corpus("negative/switch_stmt.c");
    let o = kinduct(&["verify", path(&neg)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("switch"));
    assert_eq!(kinduct(&["verify", "/no/such/file.c"]).status.code(), Some(3));
    assert_eq!(kinduct(&["verify", path(&drain), "--invariants", "magic"]).status.code(), Some(3));
    assert_eq!(kinduct(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(kinduct(&["--help"]).status.code(), Some(0));
}

#[test]
fn plain_output_names_phase_and_k() {
    let o = kinduct(&["verify", path(&corpus("phases/drain.c"))]);
    let out = stdout(&o);
    assert!(out.contains("TRUE (inductive, k=2)"), "{out}");
    let o = kinduct(&["verify", path(&corpus("phases/drain_two.c")), "--show-cex"]);
    let out = stdout(&o);
    assert!(out.contains("FALSE (base, k=2)"), "{out}");
    assert!(out.contains("counterexample:"), "{out}");
    assert!(out.contains("c=2 x=0"), "{out}");
    assert!(out.contains("violated: line 8"), "{out}");
}

#[test]
fn json_output() {
    let o = kinduct(&["verify", path(&corpus("phases/drain_two.c")), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "FALSE");
    assert_eq!(v["phase"], "base");
    assert_eq!(v["k"], 2);
    assert!(v["time_ms"].is_u64());
    assert!(v["file"].as_str().unwrap().ends_with("drain_two.c"));
    let states = v["trace"]["states"].as_array().unwrap();
    assert_eq!(states.len(), 4);
    assert_eq!(states[0]["values"]["x"], 2);
    assert_eq!(v["trace"]["violated"]["line"], 8);

    let o = kinduct(&["verify", path(&corpus("phases/drain.c")), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "TRUE");
    assert!(v.get("trace").is_none());
}

#[test]
fn emitted_queries_are_named_per_phase() {
    let dir = tempfile::tempdir().unwrap();
    let smt = dir.path().join("smt");
    let cnf = dir.path().join("cnf");
    let o = kinduct(&["verify", path(&corpus("phases/drain.c")), "--emit-smt", path(&smt), "--emit-cnf", path(&cnf)]);
    assert_eq!(o.status.code(), Some(0));
    let names = |d: &Path| {
        let mut v: Vec<String> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        v.sort();
        v
    };
    assert_eq!(
        names(&smt),
        ["drain_base_k1.smt2", "drain_base_k7.smt2", "drain_forward_k2.smt2", "drain_inductive_k2.smt2"]
    );
    assert_eq!(names(&cnf), ["drain_base_k1.cnf", "drain_base_k7.cnf", "drain_forward_k2.cnf", "drain_inductive_k2.cnf"]);
    let script = std::fs::read_to_string(smt.join("drain_inductive_k2.smt2")).unwrap();
    assert!(script.contains("(check-sat)"));
    let dimacs = std::fs::read_to_string(cnf.join("drain_base_k1.cnf")).unwrap();
    assert!(dimacs.lines().any(|l| l.starts_with("p cnf ")));
}

#[test]
fn dumps() {
    let drain = corpus("phases/drain.c");
    let o = kinduct(&["verify", path(&drain), "--dump-goto"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ASSERT"));
    let o = kinduct(&["verify", path(&drain), "--invariants", "builtin", "--dump-invariants"]);
    assert!(stdout(&o).contains("x"), "{}", stdout(&o));
    let o = kinduct(&["verify", path(&drain), "--dump-unwound", "inductive", "--dump-k", "2"]);
    let out = stdout(&o);
    assert!(out.contains("HAVOC"), "{out}");
    assert!(out.contains("[unwinding]"), "{out}");
    let o = kinduct(&["verify", path(&drain), "--dump-unwound", "base", "--dump-k", "1"]);
    assert!(!stdout(&o).contains("HAVOC"));
}

#[test]
fn width_override_changes_arithmetic() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("wrap.c");
    std::fs::write(&f, "int main() { unsigned int x = 255; x = x + 1; assert(x != 0); }\n").unwrap();
    assert_eq!(kinduct(&["verify", path(&f)]).status.code(), Some(0));
    assert_eq!(kinduct(&["verify", path(&f), "--width-override", "8"]).status.code(), Some(1));
    assert_eq!(kinduct(&["verify", path(&f), "--width-override", "12"]).status.code(), Some(3));
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.tsv");
    let phases = corpus("phases");
    let text: String = [("drain.c", "safe"), ("drain_bug.c", "unsafe"), ("countdown_pair.c", "safe")]
        .iter()
        .map(|(f, e)| format!("{}\t{e}\tphases\n", phases.join(f).display()))
        .collect();
    std::fs::write(&manifest, text).unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let o = kinduct(&["bench", path(&manifest), "--k-max", "3", "--jobs", "2", "--json", path(&json), "--csv", path(&csv)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("score 3"), "{out}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["score"], 3);
    assert_eq!(v["tallies"]["unknown_and_timeout"], 1);
    let csv = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv.lines().next(), Some("path,expected,verdict,phase,k,time_ms"));
    assert_eq!(csv.lines().count(), 4);
}
