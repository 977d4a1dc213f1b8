use super::{GotoProgram, Instr, Instruction};
use crate::expr::Expr;

/// Rewrites every bottom-tested loop `h: E; COND-GOTO c -> h` into one peeled
/// copy of `E` followed by the while shape. Programs without such loops are
/// returned unchanged, so the pass is idempotent.
pub fn normalize_loops(p: &GotoProgram) -> GotoProgram {
    let mut instrs = p.instrs.clone();
    while let Some((h, j)) = innermost_bottom_tested(&instrs) {
        instrs = peel(&instrs, h, j);
    }
    let changed = instrs != p.instrs;
    if changed {
        for (i, ins) in instrs.iter_mut().enumerate() {
            ins.origin_pc = i;
        }
    }
    let mut out = GotoProgram { instrs, ..p.clone() };
    if changed {
        out.loops = super::identify_loops(&out).unwrap_or_default();
    }
    out
}

fn innermost_bottom_tested(instrs: &[Instruction]) -> Option<(usize, usize)> {
    instrs
        .iter()
        .enumerate()
        .filter_map(|(j, ins)| match &ins.instr {
            Instr::CondGoto { target, .. } if *target <= j => Some((*target, j)),
            _ => None,
        })
        .min_by_key(|(h, j)| j - h)
}

/// Label-based rewrite. Every original instruction `i` keeps label `i`
/// except the in-loop copy `E`, which gets fresh labels.
fn peel(instrs: &[Instruction], h: usize, j: usize) -> Vec<Instruction> {
    let n = instrs.len();
    let (cond, span) = match &instrs[j].instr {
        Instr::CondGoto { cond, .. } => (cond.clone(), instrs[j].span),
        _ => unreachable!(),
    };
    let len = j - h;
    let head_label = n;
    let latch_label = n + 1;
    let fresh = |i: usize| n + 2 + (i - h);
    let mut out: Vec<(Instruction, usize)> = Vec::with_capacity(n + len + 2);

    let retarget = |ins: &Instruction, inner: &dyn Fn(usize) -> usize| {
        let mut c = ins.clone();
        if let Some(t) = c.instr.target_mut() {
            *t = inner(*t);
        }
        c
    };

    for (i, ins) in instrs[..h].iter().enumerate() {
        out.push((ins.clone(), i));
    }
    // peeled first iteration: `continue` re-enters at the loop test
    for (i, ins) in instrs.iter().enumerate().take(j).skip(h) {
        let c = retarget(ins, &|t| if t == j { head_label } else { t });
        out.push((c, i));
    }
    out.push((
        Instruction { instr: Instr::CondGoto { cond: Expr::not(cond), target: j + 1 }, span, origin_pc: 0 },
        head_label,
    ));
    for (i, ins) in instrs.iter().enumerate().take(j).skip(h) {
        let c = retarget(ins, &|t| {
            if t == j {
                latch_label
            } else if (h..j).contains(&t) {
                fresh(t)
            } else {
                t
            }
        });
        out.push((c, fresh(i)));
    }
    out.push((Instruction { instr: Instr::Goto { target: head_label }, span, origin_pc: 0 }, latch_label));
    for (i, ins) in instrs.iter().enumerate().skip(j + 1) {
        out.push((ins.clone(), i));
    }

    let mut pos = vec![usize::MAX; n + 2 + len];
    for (idx, (_, label)) in out.iter().enumerate() {
        pos[*label] = idx;
    }
    out.into_iter()
        .map(|(mut ins, _)| {
            if let Some(t) = ins.instr.target_mut() {
                *t = pos[*t];
                debug_assert!(*t != usize::MAX);
            }
            ins
        })
        .collect()
}
