use std::time::Instant;

use kinduct_core::driver::{
    self, format_log, kinduction, load_task, Context, InvariantsMode, KInductionConfig, LogPhase, VerdictStatus,
};
use kinduct_core::frontend::TypeOptions;

const DRAIN: &str = "int main() { unsigned int x = *; while (x > 0) x--; assert(x == 0); }";

fn task(src: &str, mode: InvariantsMode) -> driver::Task {
    load_task("t.c", src, mode, TypeOptions::default()).expect("loads")
}

fn cfg(mode: InvariantsMode) -> KInductionConfig {
    KInductionConfig { invariants_mode: mode, ..KInductionConfig::default() }
}

#[test]
fn drain_phase_log_without_invariants() {
    let t = task(DRAIN, InvariantsMode::None);
    let v = kinduction(&t, &cfg(InvariantsMode::None)).unwrap();
    assert_eq!(v.status, VerdictStatus::True);
    assert_eq!(v.decided_by, Some(LogPhase::Inductive));
    assert_eq!(v.k_at_decision, Some(2));
    assert_eq!(format_log(&v.phase_log), "base 1\nforward 2\ninductive 2\nrecheck 7\n");
}

#[test]
fn drain_forward_alone_fails() {
    let t = task(DRAIN, InvariantsMode::None);
    let ctx = Context::unbounded("t");
    for k in 1..=10 {
        assert!(!driver::forward_condition(&t.plain, k, &ctx).unwrap(), "k={k}");
    }
}

#[test]
fn drain_with_builtin_invariants() {
    let start = Instant::now();
    let t = task(DRAIN, InvariantsMode::Builtin);
    let v = kinduction(&t, &cfg(InvariantsMode::Builtin)).unwrap();
    assert_eq!(v.status, VerdictStatus::True);
    assert_eq!(v.decided_by, Some(LogPhase::Inductive));
    assert!(v.k_at_decision.unwrap() <= 5);
    assert!(start.elapsed().as_secs() < 10);
}

#[test]
fn trace_lengths() {
    let cases = [
        ("int main() { assert(0); }", 1),
        ("int main() { int i = 0; while (i < 10) { i++; assert(i != 3); } }", 4),
        ("int main() { unsigned int x = *; int i = 0; while (i < 5) { i++; } assert(i == 0); }", 7),
        ("int main() { int i = 0; while (i < 2) { i++; } assert(i != 2); }", 4),
    ];
    for (src, n) in cases {
        let t = task(src, InvariantsMode::None);
        let v = kinduction(&t, &cfg(InvariantsMode::None)).unwrap();
        assert_eq!(v.status, VerdictStatus::False, "{src}");
        let tr = v.counterexample.unwrap();
        assert_eq!(tr.states.len(), n, "{src}: {tr:?}");
    }
}
