use std::collections::BTreeSet;

use kinduct_core::frontend::{load, TypeOptions};
use kinduct_core::goto::{self, count_backjumps, loop_variables, normalize_loops, GotoProgram, Instr};
use kinduct_core::interp::{run, Outcome, RunConfig, SequenceSource};

fn lower(src: &str) -> GotoProgram {
    let p = load("t.c", src, TypeOptions::default()).expect("front end");
    goto::lower(&p).expect("lowering")
}

fn var_names(g: &GotoProgram, vs: &BTreeSet<kinduct_core::VarId>) -> BTreeSet<String> {
    vs.iter().map(|v| g.var_name(*v).to_string()).collect()
}

const DRAIN: &str = "int main() { unsigned int x = *; while (x > 0) x--; assert(x == 0); }";

#[test]
fn drain_has_one_loop_and_backjump() {
    let g = lower(DRAIN);
    assert_eq!(g.loops.len(), 1);
    assert_eq!(count_backjumps(&g), 1);
    assert_eq!(var_names(&g, &g.loops[0].loop_vars), ["x".to_string()].into());
    assert_eq!(var_names(&g, &loop_variables(&g, &g.loops[0])), ["x".to_string()].into());
}

#[test]
fn straight_line_has_no_backjumps() {
    let g = lower("int main() { int a = 1; int b = a + 2; assert(b == 3); }");
    assert_eq!(count_backjumps(&g), 0);
    assert!(g.loops.is_empty());
}

#[test]
fn sequential_and_nested_loops() {
    let g = lower(
        "int main() {
            int i = 0;
            int j;
            while (i < 3) i++;
            i = 0;
            while (i < 4) {
                j = 0;
                while (j < 2) j++;
                i++;
            }
            assert(i == 4);
        }",
    );
    assert_eq!(count_backjumps(&g), 3);
    let mut depths: Vec<usize> = g.loops.iter().map(|l| l.nesting_depth).collect();
    depths.sort();
    assert_eq!(depths, vec![0, 0, 1]);
}

#[test]
fn triple_nested_loops() {
    let g = lower(
        "int main() { int a = 0; int b; int c;
           while (a < 2) { b = 0; while (b < 2) { c = 0; while (c < 2) c++; b++; } a++; } }",
    );
    assert_eq!(count_backjumps(&g), 3);
    let mut depths: Vec<usize> = g.loops.iter().map(|l| l.nesting_depth).collect();
    depths.sort();
    assert_eq!(depths, vec![0, 1, 2]);
}

#[test]
fn guard_and_modified_variables_are_loop_variables() {
    let g = lower("int main() { int c = *; int y = 0; int z = 5; int w = 1; while (c) { y = z + w; } }");
    let names = var_names(&g, &g.loops[0].loop_vars);
    assert_eq!(names, ["c".to_string(), "y".to_string()].into());
    assert!(!names.contains("w"));
}

#[test]
fn for_loop_lowers_to_init_then_while() {
    let g = lower("int main() { int s = 0; int i; for (i = 0; i < 10; i++) { s += i; } assert(s == 45); }");
    assert_eq!(g.loops.len(), 1);
    let l = &g.loops[0];
    // init precedes the head, increment sits right before the backjump
    assert!(matches!(g.instrs[l.head - 1].instr, Instr::Assign { .. }));
    assert!(matches!(g.instrs[l.backjump - 1].instr, Instr::Assign { .. }));
    let r = run(&g.instrs, &g.vars, &mut SequenceSource::default(), RunConfig::default());
    assert_eq!(r.outcome, Outcome::Completed);
    assert_eq!(r.store[g.vars.find("s").unwrap().index()], 45);
}

#[test]
fn do_while_peeling_preserves_behaviour() {
    let src = "int main() { int x = *; do { x--; } while (x > 0); }";
    let g = lower(src);
    assert_eq!(g.loops.len(), 1);
    let reference = |x0: i64| {
        let mut x = x0 - 1;
        while x > 0 {
            x -= 1;
        }
        x
    };
    for x0 in 0..=10u64 {
        let r = run(&g.instrs, &g.vars, &mut SequenceSource::new([x0]), RunConfig::default());
        assert_eq!(r.outcome, Outcome::Completed);
        let x = r.store[g.vars.find("x").unwrap().index()] as u32 as i32 as i64;
        assert_eq!(x, reference(x0 as i64), "x0 = {x0}");
    }
}

#[test]
fn normalization_is_idempotent() {
    for src in [
        DRAIN,
        "int main() { int x = 3; do { if (x == 1) continue; x--; } while (x > 0); }",
        "int main() { int a = 0; int b; do { b = 0; do { b++; } while (b < 2); a++; } while (a < 3); }",
    ] {
        let g = lower(src);
        assert_eq!(normalize_loops(&g), g);
        assert_eq!(count_backjumps(&g), g.loops.len());
    }
}

#[test]
fn nested_do_while_executes_like_source() {
    let g = lower(
        "int main() { int a = 0; int b; int n = 0;
           do { b = 0; do { b++; n++; if (b == 1) continue; } while (b < 2); a++; } while (a < 3);
           assert(n == 6); }",
    );
    assert_eq!(g.loops.len(), 3);
    let r = run(&g.instrs, &g.vars, &mut SequenceSource::default(), RunConfig::default());
    assert_eq!(r.outcome, Outcome::Completed);
}

#[test]
fn calls_are_inlined_with_fresh_locals() {
    let g = lower(
        "int inc(int v) { int r = v + 1; return r; }
         int main() { int a = 1; a = inc(a); a = inc(a); assert(a == 3); }",
    );
    assert!(g.vars.find("inc::r").is_some() && g.vars.find("inc::r.1").is_some());
    let r = run(&g.instrs, &g.vars, &mut SequenceSource::default(), RunConfig::default());
    assert_eq!(r.outcome, Outcome::Completed);
}

#[test]
fn dump_lists_one_instruction_per_line() {
    let g = lower(DRAIN);
    let d = g.dump();
    assert_eq!(d.lines().count(), g.instrs.len());
    assert!(d.lines().next().unwrap().trim_start().starts_with("0: ASSIGN"));
    assert!(d.contains("COND-GOTO"));
    eprintln!("{d}");
}
