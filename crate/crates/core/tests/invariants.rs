mod common;

use std::collections::BTreeSet;

use common::{check_golden, corpus, goldens, lower, lower_with};
use kinduct_core::frontend::TypeOptions;
use kinduct_core::goto::{Instr, Origin};
use kinduct_core::interp::{run, NondetSource, Outcome, RunConfig, SequenceSource};
use kinduct_core::invariants::{
    infer_invariants, instrument, rewrite_expression, scan_init_markers, synthesize_snapshots, translate_invariants,
    AffineConstraint, InvariantError, InvariantSet, PipsError,
};
use kinduct_core::IntType;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn golden_translations() {
    let all = goldens();
    assert_eq!(all.len(), 12);
    for g in &all {
        check_golden(g).unwrap();
    }
}

#[test]
fn translation_errors() {
    let unknown = "int main() {\n // P(q) {q#init>0}\n}\n";
    assert_eq!(translate_invariants(unknown).unwrap_err(), PipsError::UnknownVariable { line: 2, var: "q".into() });
    let malformed = "int main() {\n // P(x) {x>0\n}\n";
    assert!(matches!(translate_invariants(malformed).unwrap_err(), PipsError::Malformed { line: 2, .. }));
    let bad = "int main() { int x = 0;\n // P(x) {x >< 1}\n}\n";
    assert!(matches!(translate_invariants(bad).unwrap_err(), PipsError::Unparseable { .. }));
}

#[test]
fn rewrite_examples() {
    assert_eq!(rewrite_expression("2j < 5t").unwrap(), "2*j < 5*t");
    assert_eq!(rewrite_expression("w==0").unwrap(), "w==0");
    assert_eq!(rewrite_expression("x#init>10").unwrap(), "x_init>10");
    let once = rewrite_expression("3a + 4b#init <= 12c").unwrap();
    assert_eq!(once, "3*a + 4*b_init <= 12*c");
    assert_eq!(rewrite_expression(&once).unwrap(), once);
}

#[test]
fn marker_scanning() {
    let src = "int main() {\n\n\n\n\n\n // P(w,x) {w==0, x#init>10}\n}\n";
    let m = scan_init_markers(src);
    assert_eq!(m.by_line.into_iter().collect::<Vec<_>>(), vec![(7, vec!["x".to_string()])]);
    assert!(scan_init_markers("int main() { }").by_line.is_empty());
    let m = scan_init_markers("// P(a,b) {a#init<=b, b#init>=0}\n");
    assert_eq!(m.by_line[&1], vec!["a".to_string(), "b".to_string()]);
    let src = "int main() { int a = 1; }\n";
    assert_eq!(synthesize_snapshots(src, &scan_init_markers(src)).unwrap(), src);
}

#[test]
fn translation_is_idempotent() {
    let src = "int f(int x) {\n while (x > 0) {\n // P(x) {x#init>=x, 0<=x}\n x--; }\n return x; }\nint main() { int r = f(3); }\n";
    let once = translate_invariants(src).unwrap();
    assert_eq!(translate_invariants(&once).unwrap(), once);
}

fn head_constraints(src: &str) -> Vec<String> {
    let p = lower(src);
    let inv = infer_invariants(&p);
    inv.by_location[&p.loops[0].head].iter().map(|c| c.to_string()).collect()
}

#[test]
fn interval_at_counting_loop_head() {
    let src = "int main() { int i = 0; while (i < 10) i++; }";
    let cs = head_constraints(src);
    assert!(cs.contains(&"0 <= i".to_string()) && cs.contains(&"i <= 10".to_string()), "{cs:?}");
    // reachable values at the head, by running the 8-bit program
    let p = lower_with(src, TypeOptions { width_override: Some(8) });
    let heads = BTreeSet::from([p.loops[0].head]);
    let r = run(&p.instrs, &p.vars, &mut SequenceSource::new([]), RunConfig { record_at: Some(&heads), ..Default::default() });
    let i = p.vars.find("i").unwrap();
    let seen: BTreeSet<i128> = r.snapshots.iter().map(|(_, s)| p.vars.ty(i).to_i128(s[i.index()])).collect();
    assert_eq!(seen, (0..=10).collect());
}

#[test]
fn constant_and_unsigned_facts() {
    let cs = head_constraints("int main() { int y = 5; int x = *; while (x > 0) x--; }");
    assert!(cs.contains(&"y == 5".to_string()), "{cs:?}");
    let cs = head_constraints("int main() { unsigned int x = *; while (x > 0) x--; assert(x == 0); }");
    assert_eq!(cs, vec!["0 <= x".to_string()]);
}

#[test]
fn relational_facts() {
    let cs = head_constraints("int main() { unsigned int i = 0; unsigned int j = 0; while (i < 200) { i++; j++; } }");
    assert!(cs.iter().any(|c| c == "i - j == 0"), "{cs:?}");
    let cs = head_constraints("int main() { unsigned int a = 0; unsigned int b = 500; while (a < 500) { a++; b--; } }");
    assert!(cs.iter().any(|c| c == "a + b == 500"), "{cs:?}");
}

#[test]
fn instrumentation() {
    let p = lower("int main() { int i = 0; while (i < 10) i++; }");
    assert_eq!(instrument(&p, &InvariantSet::default()).unwrap(), p);
    let head = p.loops[0].head;
    let mut inv = InvariantSet::default();
    inv.by_location.insert(head, vec![AffineConstraint::lower("i", 0), AffineConstraint::upper("i", 10)]);
    let q = instrument(&p, &inv).unwrap();
    assert_eq!(q.instrs.len(), p.instrs.len() + 1);
    let assume = &q.instrs[q.loops[0].head];
    assert!(matches!(assume.instr, Instr::Assume { origin: Origin::Invariant, .. }));
    assert!(q.dump().contains("ASSUME    0 <= i && i <= 10  [invariant]"), "{}", q.dump());
    let mut bad = InvariantSet::default();
    bad.by_location.insert(head, vec![AffineConstraint::equals("i_init", 0)]);
    assert_eq!(instrument(&p, &bad).unwrap_err(), InvariantError::OutOfScope("i_init".into()));
}

struct Random(StdRng);

impl NondetSource for Random {
    fn next(&mut self, _: usize, _: usize, ty: IntType) -> u64 {
        let v: u64 = if self.0.gen_bool(0.5) { self.0.gen_range(0..16) } else { self.0.gen() };
        if self.0.gen_bool(0.2) {
            ty.wrap(-(v as i128 & 15))
        } else {
            v & ty.mask()
        }
    }
}

/// Random concrete runs never falsify an instrumented invariant.
#[test]
fn inferred_invariants_hold_on_sampled_runs() {
    let mut rng = StdRng::seed_from_u64(7);
    for prog in corpus() {
        for opts in [TypeOptions::default(), TypeOptions { width_override: Some(8) }] {
            let p = lower_with(&prog.source, opts);
            let q = instrument(&p, &infer_invariants(&p)).unwrap();
            for _ in 0..1000 {
                let mut src = Random(StdRng::seed_from_u64(rng.gen()));
                let r = run(&q.instrs, &q.vars, &mut src, RunConfig { max_steps: 5_000, ..Default::default() });
                if let Outcome::Blocked { pc } = r.outcome {
                    assert!(
                        !matches!(q.instrs[pc].instr, Instr::Assume { origin: Origin::Invariant, .. }),
                        "{}: invariant at {pc} falsified\n{}",
                        prog.path,
                        q.dump()
                    );
                }
            }
        }
    }
}
