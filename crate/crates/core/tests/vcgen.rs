mod common;

use std::collections::HashMap;

use common::{corpus, lower, lower_with, z3, z3_sat};
use kinduct_core::driver::{load_task, InvariantsMode};
use kinduct_core::frontend::TypeOptions;
use kinduct_core::solver::{self, emit_smtlib, Budget, Status};
use kinduct_core::transform::{prepare, Phase};
use kinduct_core::vcgen::{generate, to_ssa, Shape, SymKind, Term, TermId};

const DRAIN: &str = "int main() { unsigned int x = *; while (x > 0) x--; assert(x == 0); }";
const PHASES: [Phase; 3] = [Phase::Base, Phase::Forward, Phase::Inductive];

fn sat(src: &str, phase: Phase, k: usize, opts: TypeOptions) -> bool {
    let u = prepare(&lower_with(src, opts), k, phase).unwrap();
    let f = generate(&u);
    solver::check(&f, Budget::default()).unwrap().status == Status::Sat
}

#[test]
fn straight_line_has_no_merges() {
    let u = prepare(&lower("int main() { int a = *; int b = a + 2; int c = b * a; assert(c != 7); }"), 1, Phase::Base).unwrap();
    let s = to_ssa(&u);
    assert_eq!(s.definitions.len(), 3);
    assert!(s.pool.defs.values().all(|t| !matches!(s.pool.get(*t), Term::Ite(..))));
}

#[test]
fn branch_merge_uses_ite() {
    let u = prepare(&lower("int main() { int x = 5; int c = *; if (c) x = x + 1; assert(x > 0); }"), 1, Phase::Base).unwrap();
    let s = to_ssa(&u);
    assert!(s.pool.defs.values().any(|t| matches!(s.pool.get(*t), Term::Ite(..))));
}

#[test]
fn drain_k2_has_ite_chain() {
    let u = prepare(&lower(DRAIN), 2, Phase::Base).unwrap();
    let s = to_ssa(&u);
    let x_versions = s
        .definitions
        .iter()
        .filter(|(sym, _)| matches!(s.pool.symbol(*sym).kind, SymKind::Version { .. }))
        .count();
    assert!(x_versions >= 2, "{x_versions}");
    // the exit merge nests one ite per unwound copy
    let ites = (0..s.pool.len() as u32).filter(|&i| matches!(s.pool.get(TermId(i)), Term::Ite(..))).count();
    assert!(ites >= 2, "{ites}");
}

#[test]
fn trivial_queries() {
    let d = TypeOptions::default();
    assert!(sat("int main() { assert(0); }", Phase::Base, 1, d));
    for phase in PHASES {
        assert!(!sat("int main() { assert(1); }", phase, 1, d), "{phase}");
    }
    assert!(!sat(DRAIN, Phase::Inductive, 1, TypeOptions { width_override: Some(8) }));
    let f = generate(&prepare(&lower(DRAIN), 1, Phase::Forward).unwrap());
    assert_eq!(f.shape, Shape::Forward);
}

/// Every model of a query, decoded through the bit map, satisfies the
/// word-level formula.
#[test]
fn models_satisfy_word_level_formula() {
    let mut checked = 0;
    for prog in corpus() {
        let p = lower(&prog.source);
        for phase in PHASES {
            for k in 1..=3 {
                let f = generate(&prepare(&p, k, phase).unwrap());
                let out = solver::check(&f, Budget::default()).unwrap();
                let Some(model) = out.model else { continue };
                let free: HashMap<_, _> =
                    model.iter().filter(|(s, _)| !f.pool.defs.contains_key(s)).map(|(s, v)| (*s, *v)).collect();
                let vals = f.pool.eval_all(&free);
                assert_eq!(vals[f.query.0 as usize], 1, "{} {phase} k={k}", prog.path);
                for (s, v) in &model {
                    if let Some(d) = f.pool.defs.get(s) {
                        assert_eq!(vals[d.0 as usize], *v, "{}: defined symbol disagrees", prog.path);
                    }
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 20);
}

/// Verdicts on the emitted SMT-LIB agree with the built-in solver, for plain
/// and instrumented programs.
#[test]
fn smtlib_agrees_with_external_solver() {
    let Some(z3) = z3() else {
        eprintln!("z3 not found; skipping");
        return;
    };
    let mut disagreements = Vec::new();
    let mut compared = 0;
    for prog in corpus() {
        for mode in [InvariantsMode::None, InvariantsMode::Builtin] {
            let task = load_task("t.c", &prog.source, mode, TypeOptions::default()).unwrap();
            for phase in PHASES {
                for k in 1..=3 {
                    let f = generate(&prepare(&task.instrumented, k, phase).unwrap());
                    let ours = solver::check(&f, Budget::default()).unwrap().status == Status::Sat;
                    match z3_sat(&z3, &emit_smtlib(&f)) {
                        Some(theirs) if theirs == ours => compared += 1,
                        other => disagreements.push(format!("{} {mode:?} {phase} k={k}: ours {ours}, z3 {other:?}", prog.path)),
                    }
                }
            }
        }
    }
    assert!(disagreements.is_empty(), "{disagreements:#?}");
    assert!(compared > 500);
}

#[test]
fn smtlib_script_shape() {
    let f = generate(&prepare(&lower(DRAIN), 1, Phase::Inductive).unwrap());
    let s = emit_smtlib(&f);
    assert!(s.starts_with("(set-logic QF_BV)"));
    assert_eq!(s.matches("(check-sat)").count(), 1);
    assert_eq!(s.matches("(assert ").count(), 1);
    assert!(s.trim_end().ends_with("(get-model)"));
    if let Some(z3) = z3() {
        assert_eq!(z3_sat(&z3, &s), Some(false));
        let bug = generate(&prepare(&lower("int main() { unsigned char x = *; assert(!(x > 0) || x == 0); }"), 1, Phase::Base).unwrap());
        assert_eq!(z3_sat(&z3, &emit_smtlib(&bug)), Some(true));
    }
}

