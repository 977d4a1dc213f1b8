use std::path::PathBuf;

use kinduct_core::bench::{self, classify, score_tallies, BenchReport, Classification, Expected, Manifest, Tallies};
use kinduct_core::driver::{format_log, kinduction, load_task, InvariantsMode, KInductionConfig, LogPhase, VerdictStatus};
use kinduct_core::frontend::TypeOptions;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn tallies(bugs: usize, proofs: usize, false_inc: usize, true_inc: usize, unknown: usize) -> Tallies {
    let mut t = Tallies::default();
    for (n, c) in [
        (bugs, Classification::BugFound),
        (proofs, Classification::CorrectProof),
        (false_inc, Classification::FalseIncorrect),
        (true_inc, Classification::TrueIncorrect),
        (unknown, Classification::UnknownOrTimeout),
    ] {
        for _ in 0..n {
            t.add(c);
        }
    }
    t
}

#[test]
fn score_weights_on_synthetic_tallies() {
    let cases = [
        ((0, 0, 0, 0, 0), 0),
        ((1, 0, 0, 0, 0), 1),
        ((0, 1, 0, 0, 0), 2),
        ((0, 0, 1, 0, 0), -6),
        ((0, 0, 0, 1, 0), -12),
        ((0, 0, 0, 0, 7), 0),
        ((1, 2, 1, 0, 0), -1),
        ((0, 3, 0, 0, 0), 6),
        ((4, 3, 0, 0, 2), 10),
        ((10, 10, 2, 1, 5), 6),
    ];
    for ((b, p, f, t, u), want) in cases {
        let tl = tallies(b, p, f, t, u);
        assert_eq!(score_tallies(&tl), want, "{b} {p} {f} {t} {u}");
        assert_eq!(tl.correct_results, b + p);
        assert_eq!(tl.scored(), b + p + f + t + u);
    }
}

#[test]
fn classification_table() {
    use Classification::*;
    assert_eq!(classify(Expected::Unsafe, VerdictStatus::False), BugFound);
    assert_eq!(classify(Expected::Safe, VerdictStatus::True), CorrectProof);
    assert_eq!(classify(Expected::Safe, VerdictStatus::False), FalseIncorrect);
    assert_eq!(classify(Expected::Unsafe, VerdictStatus::True), TrueIncorrect);
    assert_eq!(classify(Expected::Safe, VerdictStatus::Unknown), UnknownOrTimeout);
    assert_eq!(classify(Expected::Unsafe, VerdictStatus::Unknown), UnknownOrTimeout);
}

fn none_cfg(k_max: usize) -> KInductionConfig {
    KInductionConfig { max_iterations: k_max, ..KInductionConfig::default() }
}

#[test]
fn toy_manifest_tallies() {
    let text = "drain.c\tsafe\tphases\ndrain_bug.c\tunsafe\tphases\n\n# pair needs invariants\ncountdown_pair.c\tsafe\tphases\n";
    let m = Manifest::parse(text, root().join("corpus/phases")).unwrap();
    assert_eq!(m.entries.len(), 3);
    let r = bench::run_suite(&m, &none_cfg(3), TypeOptions::default(), 2);
    let t = r.tallies;
    assert_eq!((t.correct_results, t.false_incorrect, t.true_incorrect, t.unknown_and_timeout), (2, 0, 0, 1));
    assert_eq!(r.score, 3);
    assert_eq!(bench::score(&r), r.score);
}

#[test]
fn empty_manifest_scores_zero() {
    let m = Manifest::parse("# nothing\n\n", ".").unwrap();
    let r = bench::run_suite(&m, &none_cfg(3), TypeOptions::default(), 4);
    assert!(r.rows.is_empty());
    assert_eq!(r.score, 0);
    assert_eq!(r.tallies, Tallies::default());
}

#[test]
fn missing_file_is_invalid_and_unscored() {
    let m = Manifest::parse("nope.c\tsafe\tx\ndrain.c\tsafe\tphases\n", root().join("corpus/phases")).unwrap();
    let r = bench::run_suite(&m, &none_cfg(3), TypeOptions::default(), 1);
    let row = r.rows.iter().find(|r| r.path == "nope.c").unwrap();
    assert_eq!(row.class, Classification::Invalid);
    assert!(row.error.is_some());
    assert_eq!(r.tallies.invalid, 1);
    assert_eq!(r.tallies.scored(), 1);
    assert_eq!(r.score, 2);
}

#[test]
fn unloadable_file_is_invalid() {
    let m = Manifest::parse("address_of.c\tsafe\tneg\n", root().join("corpus/negative")).unwrap();
    let r = bench::run_suite(&m, &none_cfg(3), TypeOptions::default(), 1);
    assert_eq!(r.rows[0].class, Classification::Invalid);
}

#[test]
fn manifest_errors() {
    assert!(Manifest::parse("a.c\tsafe\n", ".").is_err());
    assert!(Manifest::parse("a.c\tmaybe\tx\n", ".").is_err());
}

fn phases_report() -> BenchReport {
    let m = Manifest::parse(
        "drain.c\tsafe\tphases\ndrain_bug.c\tunsafe\tphases\ncount_three.c\tsafe\tphases\ncountdown_pair.c\tsafe\tphases\ndrain_two.c\tunsafe\tphases\n",
        root().join("corpus/phases"),
    )
    .unwrap();
    bench::run_suite(&m, &none_cfg(3), TypeOptions::default(), 2)
}

#[test]
fn phases_suite_tallies_and_json_round_trip() {
    let r = phases_report();
    assert_eq!(r.tallies.correct_results, 4);
    assert_eq!(r.tallies.unknown_and_timeout, 1);
    assert_eq!(r.score, 2 + 1 + 2 + 1);
    let back = BenchReport::from_json(&r.to_json()).unwrap();
    assert_eq!(back, r);
    assert_eq!(bench::score(&back), r.score);
    // verdicts do not depend on scheduling
    let again = phases_report();
    let key = |r: &BenchReport| r.rows.iter().map(|x| (x.path.clone(), x.verdict, x.phase, x.k)).collect::<Vec<_>>();
    assert_eq!(key(&again), key(&r));
}

#[test]
fn csv_columns() {
    let r = phases_report();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("path,expected,verdict,phase,k,time_ms"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(&rows[0][..5], ["count_three.c", "safe", "TRUE", "forward", "3"]);
    assert_eq!(&rows[1][..5], ["countdown_pair.c", "safe", "UNKNOWN", "", ""]);
    assert!(rows.iter().all(|r| r.len() == 6 && r[5].parse::<u64>().is_ok()));
}

#[test]
fn phases_phase_logs() {
    let dir = root().join("corpus/phases");
    let table = std::fs::read_to_string(dir.join("expected.tsv")).unwrap();
    let mut n = 0;
    for line in table.lines().filter(|l| !l.starts_with('#')) {
        let f: Vec<&str> = line.split('\t').collect();
        let src = std::fs::read_to_string(dir.join(f[0])).unwrap();
        let task = load_task(f[0], &src, InvariantsMode::None, TypeOptions::default()).unwrap();
        let v = kinduction(&task, &none_cfg(f[1].parse().unwrap())).unwrap();
        assert_eq!(v.status.to_string(), f[2], "{}", f[0]);
        assert_eq!(v.decided_by.map(|p| p.to_string()).unwrap_or("-".into()), f[3], "{}", f[0]);
        assert_eq!(v.k_at_decision.map(|k| k.to_string()).unwrap_or("-".into()), f[4], "{}", f[0]);
        let want: String = f[5].split(',').map(|e| format!("{e}\n")).collect();
        assert_eq!(format_log(&v.phase_log), want, "{}", f[0]);
        if v.decided_by == Some(LogPhase::Inductive) || v.decided_by == Some(LogPhase::Forward) {
            // a proof always ends with the re-check five steps further
            let (p, k) = *v.phase_log.last().unwrap();
            assert_eq!((p, k), (LogPhase::Recheck, v.k_at_decision.unwrap() + 5));
        }
        n += 1;
    }
    assert_eq!(n, 5);
}

#[test]
fn comments_mode_end_to_end() {
    let src = "int main() {\n  unsigned int x = *;\n  unsigned int y = x;\n  while (1) {\n    // P(x, y) {x == y}\n    if (x == 0) break;\n    x--;\n    y--;\n  }\n  assert(y == 0);\n}\n";
    let task = load_task("t.c", src, InvariantsMode::Comments, TypeOptions::default()).unwrap();
    let cfg = KInductionConfig { max_iterations: 5, invariants_mode: InvariantsMode::Comments, ..KInductionConfig::default() };
    let v = kinduction(&task, &cfg).unwrap();
    assert_eq!(v.status, VerdictStatus::True);
    let plain = load_task("t.c", src, InvariantsMode::None, TypeOptions::default()).unwrap();
    let v = kinduction(&plain, &KInductionConfig { max_iterations: 5, ..KInductionConfig::default() }).unwrap();
    assert_eq!(v.status, VerdictStatus::Unknown);
}
