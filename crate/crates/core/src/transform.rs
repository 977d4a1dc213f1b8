//! Loop-free programs for the three k-induction phases.
//!
//! Each loop is replaced by `k` copies of `COND-GOTO !c -> exit; body`,
//! followed by the head's invariant assumptions and a terminator on the
//! negated guard: an assumption for the base case and the inductive step, an
//! assertion for the forward condition. Nested loops are unwound recursively
//! with the same `k`.
//!
//! The inductive step additionally havocs each loop's variables on entry,
//! snapshots them into shadow variables before every copy, and assumes after
//! every executed copy that some loop variable changed.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{BinOp, Expr, VarId};
use crate::frontend::ast::Span;
use crate::frontend::typed::{VarInfo, VarKind, VarTable};
use crate::goto::{Builder, GotoProgram, Instr, Instruction, Label, LoopInfo, Origin};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Phase {
    #[serde(rename = "base")]
    Base,
    #[serde(rename = "forward")]
    Forward,
    #[serde(rename = "inductive")]
    Inductive,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Base => "base",
            Phase::Forward => "forward",
            Phase::Inductive => "inductive",
        }
    }

    pub fn parse(s: &str) -> Option<Phase> {
        match s.to_ascii_lowercase().as_str() {
            "base" | "base_case" | "base-case" => Some(Phase::Base),
            "forward" | "forward_condition" | "forward-condition" => Some(Phase::Forward),
            "inductive" | "inductive_step" | "inductive-step" => Some(Phase::Inductive),
            _ => None,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("unwinding depth must be at least 1, got {0}")]
    BadK(usize),
}

/// Instrumentation added for one loop in the inductive step.
#[derive(Clone, Debug, PartialEq)]
pub struct InductiveRewrite {
    pub loop_head: usize,
    /// A: one HAVOC per loop variable.
    pub havoc_block: Vec<Instruction>,
    /// S: `v__pre_i := v` for every copy `i` and loop variable `v`.
    pub store_block: Vec<Instruction>,
    /// E: the original loop body.
    pub body: Vec<Instruction>,
    /// U: empty, because SSA renaming already separates iterations.
    pub update_block: Vec<Instruction>,
    /// R: one stutter-elimination ASSUME per copy.
    pub remove_block: Vec<Instruction>,
    /// Shadow variables per copy, paired with the variable they snapshot.
    pub shadows: Vec<Vec<(VarId, VarId)>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnwoundProgram {
    /// Loop-free program; `loops` is empty.
    pub body: GotoProgram,
    pub phase: Phase,
    pub k: usize,
    /// σ = ¬c for every original loop, in head order.
    pub termination_conditions: Vec<Expr>,
    /// Indices in `body` of the unwinding assumptions/assertions.
    pub terminators: Vec<usize>,
    /// Inductive-step instrumentation, one entry per original loop.
    pub rewrites: Vec<InductiveRewrite>,
}

impl UnwoundProgram {
    pub fn dump(&self) -> String {
        self.body.dump()
    }
}

pub fn unwind(p: &GotoProgram, k: usize, phase: Phase) -> Result<UnwoundProgram, TransformError> {
    if k < 1 {
        return Err(TransformError::BadK(k));
    }
    let mut u = Unwinder {
        p,
        k,
        phase,
        vars: p.vars.clone(),
        b: Builder::default(),
        frames: Vec::new(),
        terminators: Vec::new(),
        rewrites: HashMap::new(),
    };
    u.frames.push(Frame { lo: 0, hi: p.instrs.len(), labels: HashMap::new() });
    u.range(0, p.instrs.len());
    // jumps to one past the end land on a trailing SKIP
    let end = u.label(p.instrs.len());
    u.b.place(end);
    u.b.emit(Instr::Skip, Span::default(), p.instrs.len().saturating_sub(1));
    let terminators = u.terminators.clone();
    let mut rewrites: Vec<InductiveRewrite> = u.rewrites.drain().map(|(_, r)| r).collect();
    rewrites.sort_by_key(|r| r.loop_head);
    let vars = u.vars;
    let instrs = u.b.finish();
    Ok(UnwoundProgram {
        body: GotoProgram { file: p.file.clone(), vars, instrs, loops: Vec::new() },
        phase,
        k,
        termination_conditions: p.loops.iter().map(|l| Expr::not(l.exit_condition.clone())).collect(),
        terminators,
        rewrites,
    })
}

/// Unwinding with unwinding assumptions; assertions are the obligations.
pub fn prepare_base_case(p: &GotoProgram, k: usize) -> Result<UnwoundProgram, TransformError> {
    unwind(p, k, Phase::Base)
}

/// Unwinding with unwinding assertions in addition to the user assertions.
pub fn prepare_forward_condition(p: &GotoProgram, k: usize) -> Result<UnwoundProgram, TransformError> {
    unwind(p, k, Phase::Forward)
}

/// Havoc/store/remove rewrite of every loop, then unwinding with assumptions.
pub fn prepare_inductive_step(p: &GotoProgram, k: usize) -> Result<UnwoundProgram, TransformError> {
    unwind(p, k, Phase::Inductive)
}

pub fn prepare(p: &GotoProgram, k: usize, phase: Phase) -> Result<UnwoundProgram, TransformError> {
    unwind(p, k, phase)
}

/// Maps original pcs inside `[lo, hi)` to labels of the current copy.
struct Frame {
    lo: usize,
    hi: usize,
    labels: HashMap<usize, Label>,
}

struct Unwinder<'a> {
    p: &'a GotoProgram,
    k: usize,
    phase: Phase,
    vars: VarTable,
    b: Builder,
    frames: Vec<Frame>,
    terminators: Vec<usize>,
    rewrites: HashMap<usize, InductiveRewrite>,
}

impl Unwinder<'_> {
    /// Label of original pc `t` as seen from the innermost copy containing it.
    fn label(&mut self, t: usize) -> Label {
        let idx = self
            .frames
            .iter()
            .rposition(|f| t >= f.lo && t < f.hi)
            .unwrap_or(0);
        if let Some(l) = self.frames[idx].labels.get(&t) {
            return *l;
        }
        let l = self.b.new_label();
        self.frames[idx].labels.insert(t, l);
        l
    }

    fn place_pc(&mut self, pc: usize) {
        let l = self.label(pc);
        self.b.place(l);
    }

    fn outermost_loop_at(&self, pc: usize) -> Option<&LoopInfo> {
        self.p.loops.iter().filter(|l| l.head == pc).min_by_key(|l| l.nesting_depth)
    }

    fn range(&mut self, lo: usize, hi: usize) {
        let mut pc = lo;
        while pc < hi {
            if let Some(l) = self.outermost_loop_at(pc).cloned() {
                self.unwind_loop(&l);
                pc = l.backjump + 1;
                continue;
            }
            self.place_pc(pc);
            self.copy(pc);
            pc += 1;
        }
    }

    fn copy(&mut self, pc: usize) {
        let ins = &self.p.instrs[pc];
        let span = ins.span;
        let origin = ins.origin_pc;
        match ins.instr.clone() {
            Instr::Goto { target } => {
                let l = self.label(target);
                self.b.goto(l, span, origin);
            }
            Instr::CondGoto { cond, target } => {
                let l = self.label(target);
                self.b.cond_goto(cond, l, span, origin);
            }
            other => self.b.emit(other, span, origin),
        }
    }

    fn preamble(&mut self, l: &LoopInfo) {
        for pc in l.head..l.guard {
            self.copy(pc);
        }
    }

    fn unwind_loop(&mut self, l: &LoopInfo) {
        let span = l.span;
        let inductive = self.phase == Phase::Inductive;
        let loop_vars: Vec<VarId> = l.loop_vars.iter().copied().collect();
        let mut rewrite = InductiveRewrite {
            loop_head: l.head,
            havoc_block: Vec::new(),
            store_block: Vec::new(),
            body: self.p.instrs[l.guard + 1..l.backjump].to_vec(),
            update_block: Vec::new(),
            remove_block: Vec::new(),
            shadows: Vec::new(),
        };
        // the loop entry belongs to the enclosing copy
        self.place_pc(l.head);
        if inductive {
            for &v in &loop_vars {
                let ins = Instruction { instr: Instr::Havoc { var: v }, span, origin_pc: l.head };
                rewrite.havoc_block.push(ins.clone());
                self.b.emit(ins.instr, span, l.head);
            }
        }
        for i in 1..=self.k {
            self.frames.push(Frame { lo: l.head, hi: l.backjump + 1, labels: HashMap::new() });
            self.preamble(l);
            self.place_pc(l.guard);
            self.copy(l.guard);
            let mut shadows = Vec::new();
            if inductive {
                for &v in &loop_vars {
                    let info = self.vars.get(v).clone();
                    let shadow = self.vars.add(VarInfo {
                        name: format!("{}__pre_{i}", info.name),
                        source_name: format!("{}__pre_{i}", info.source_name),
                        ty: info.ty,
                        kind: VarKind::Shadow,
                        function: info.function.clone(),
                    });
                    let instr = Instr::Assign { var: shadow, value: Expr::var(v, info.ty), decl: true };
                    rewrite.store_block.push(Instruction { instr: instr.clone(), span, origin_pc: l.guard });
                    self.b.emit(instr, span, l.guard);
                    shadows.push((shadow, v));
                }
            }
            self.range(l.guard + 1, l.backjump);
            // latch: `continue` lands here
            self.place_pc(l.backjump);
            if inductive {
                let changed = Expr::or_all(shadows.iter().map(|&(s, v)| {
                    let ty = self.vars.ty(v);
                    Expr::binary(BinOp::Ne, Expr::var(v, ty), Expr::var(s, ty))
                }));
                let instr = Instr::Assume { cond: changed, origin: Origin::Stutter };
                rewrite.remove_block.push(Instruction { instr: instr.clone(), span, origin_pc: l.backjump });
                self.b.emit(instr, span, l.backjump);
                rewrite.shadows.push(shadows);
            }
            self.frames.pop();
        }
        // head preamble and terminator after the last copy
        self.preamble(l);
        let sigma = match &self.p.instrs[l.guard].instr {
            Instr::CondGoto { cond, .. } => cond.clone(),
            _ => Expr::not(l.exit_condition.clone()),
        };
        self.terminators.push(self.b.out.len());
        let instr = match self.phase {
            Phase::Forward => Instr::Assert { cond: sigma, origin: Origin::Unwinding },
            Phase::Base | Phase::Inductive => Instr::Assume { cond: sigma, origin: Origin::Unwinding },
        };
        self.b.emit(instr, span, l.guard);
        if inductive {
            self.rewrites.insert(l.head, rewrite);
        }
    }
}

/// Checks the structural invariants of an inductive rewrite.
pub fn check_rewrite(r: &InductiveRewrite, loop_vars: &[VarId]) -> Result<(), String> {
    let havocked: Vec<VarId> = r
        .havoc_block
        .iter()
        .filter_map(|i| match i.instr {
            Instr::Havoc { var } => Some(var),
            _ => None,
        })
        .collect();
    if havocked != loop_vars {
        return Err("havoc block differs from the loop variables".into());
    }
    let stored: Vec<VarId> = r
        .store_block
        .iter()
        .filter_map(|i| match i.instr {
            Instr::Assign { var, .. } => Some(var),
            _ => None,
        })
        .collect();
    let updated: Vec<VarId> = r
        .update_block
        .iter()
        .filter_map(|i| match i.instr {
            Instr::Assign { var, .. } => Some(var),
            _ => None,
        })
        .collect();
    if !updated.iter().all(|v| stored.contains(v)) {
        return Err("update block writes a variable the store block does not".into());
    }
    if r.remove_block.len() != r.shadows.len() {
        return Err("one stutter assumption per copy expected".into());
    }
    for (assume, pairs) in r.remove_block.iter().zip(&r.shadows) {
        let Instr::Assume { cond, .. } = &assume.instr else {
            return Err("remove block must contain assumptions".into());
        };
        let vars = cond.vars();
        for (s, v) in pairs {
            if !vars.contains(s) || !vars.contains(v) {
                return Err("stutter assumption misses a shadow/current pair".into());
            }
        }
    }
    Ok(())
}
