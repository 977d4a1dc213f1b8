//! GOTO-style intermediate representation.
//!
//! Structured control flow is compiled to conditional and unconditional
//! jumps. After [`normalize_loops`] every loop has the shape
//!
//! ```text
//! head:  [ASSUME inv]*
//!        COND-GOTO !c -> exit
//!        body
//!        GOTO head            (the backjump)
//! exit:
//! ```

mod lower;
mod normalize;

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Expr, VarId};
use crate::frontend::ast::Span;
use crate::frontend::typed::{TypedProgram, VarTable};

pub use normalize::normalize_loops;

/// Why an ASSUME or ASSERT exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Origin {
    /// Written in the source program.
    User,
    /// Unwinding assumption or assertion placed after the last copy.
    Unwinding,
    /// Instrumented invariant.
    Invariant,
    /// Inductive-step stutter elimination.
    Stutter,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instr {
    /// `decl` marks the assignment that brings a local into scope.
    Assign { var: VarId, value: Expr, decl: bool },
    Assume { cond: Expr, origin: Origin },
    Assert { cond: Expr, origin: Origin },
    Goto { target: usize },
    CondGoto { cond: Expr, target: usize },
    Havoc { var: VarId },
    Skip,
}

impl Instr {
    pub fn target(&self) -> Option<usize> {
        match self {
            Instr::Goto { target } | Instr::CondGoto { target, .. } => Some(*target),
            _ => None,
        }
    }

    fn target_mut(&mut self) -> Option<&mut usize> {
        match self {
            Instr::Goto { target } | Instr::CondGoto { target, .. } => Some(target),
            _ => None,
        }
    }

    pub fn opcode(&self) -> &'static str {
        match self {
            Instr::Assign { .. } => "ASSIGN",
            Instr::Assume { .. } => "ASSUME",
            Instr::Assert { .. } => "ASSERT",
            Instr::Goto { .. } => "GOTO",
            Instr::CondGoto { .. } => "COND-GOTO",
            Instr::Havoc { .. } => "HAVOC",
            Instr::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub instr: Instr,
    pub span: Span,
    /// Index of the instruction this one was copied from in the original
    /// (normalized) program; equal to its own index there.
    pub origin_pc: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopInfo {
    pub head: usize,
    /// The exit test `COND-GOTO !c -> exit`.
    pub guard: usize,
    pub backjump: usize,
    /// The loop guard `c`; its negation is the termination condition.
    pub exit_condition: Expr,
    pub loop_vars: BTreeSet<VarId>,
    pub nesting_depth: usize,
    pub span: Span,
}

impl LoopInfo {
    pub fn exit(&self) -> usize {
        self.backjump + 1
    }

    pub fn contains(&self, pc: usize) -> bool {
        pc >= self.head && pc <= self.backjump
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GotoProgram {
    pub file: String,
    pub vars: VarTable,
    pub instrs: Vec<Instruction>,
    pub loops: Vec<LoopInfo>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GotoError {
    #[error("internal error: recursive call to `{0}` reached lowering")]
    Recursion(String),
    #[error("instruction {pc}: jump target {target} out of range")]
    BadTarget { pc: usize, target: usize },
    #[error("malformed loop at instruction {0}")]
    MalformedLoop(usize),
    #[error("loops at {0} and {1} overlap without nesting")]
    Overlap(usize, usize),
}

/// Lowers a typed program, inlines calls, normalizes loops, and identifies them.
pub fn lower(p: &TypedProgram) -> Result<GotoProgram, GotoError> {
    let raw = lower::lower_program(p)?;
    let mut g = normalize_loops(&raw);
    g.loops = identify_loops(&g)?;
    Ok(g)
}

/// Number of jumps whose target precedes them.
pub fn count_backjumps(p: &GotoProgram) -> usize {
    p.instrs
        .iter()
        .enumerate()
        .filter(|(i, ins)| ins.instr.target().is_some_and(|t| t < *i))
        .count()
}

/// Variables read by the loop guard, assigned or havocked in the body, and in
/// scope at the head (locals declared inside the body are excluded).
pub fn loop_variables(p: &GotoProgram, l: &LoopInfo) -> BTreeSet<VarId> {
    loop_variables_in(&p.instrs, l.head, l.backjump, &l.exit_condition)
}

fn loop_variables_in(instrs: &[Instruction], head: usize, backjump: usize, guard: &Expr) -> BTreeSet<VarId> {
    let mut vars = guard.vars();
    let mut declared = BTreeSet::new();
    for ins in &instrs[head..=backjump] {
        match &ins.instr {
            Instr::Assign { var, decl, .. } => {
                vars.insert(*var);
                if *decl {
                    declared.insert(*var);
                }
            }
            Instr::Havoc { var } => {
                vars.insert(*var);
            }
            _ => {}
        }
    }
    vars.difference(&declared).copied().collect()
}

/// Finds every normalized loop and computes its metadata.
pub fn identify_loops(p: &GotoProgram) -> Result<Vec<LoopInfo>, GotoError> {
    let n = p.instrs.len();
    for (pc, ins) in p.instrs.iter().enumerate() {
        if let Some(t) = ins.instr.target() {
            if t >= n {
                return Err(GotoError::BadTarget { pc, target: t });
            }
        }
    }
    let mut loops = Vec::new();
    for (b, ins) in p.instrs.iter().enumerate() {
        let Some(h) = ins.instr.target() else { continue };
        if h >= b {
            continue;
        }
        if !matches!(ins.instr, Instr::Goto { .. }) {
            return Err(GotoError::MalformedLoop(h));
        }
        let guard = (h..b)
            .find(|&i| !matches!(p.instrs[i].instr, Instr::Assume { origin: Origin::Invariant, .. }))
            .ok_or(GotoError::MalformedLoop(h))?;
        let exit_condition = match &p.instrs[guard].instr {
            Instr::CondGoto { cond, target } if *target == b + 1 => Expr::not(cond.clone()),
            _ => return Err(GotoError::MalformedLoop(h)),
        };
        let loop_vars = loop_variables_in(&p.instrs, h, b, &exit_condition);
        loops.push(LoopInfo {
            head: h,
            guard,
            backjump: b,
            exit_condition,
            loop_vars,
            nesting_depth: 0,
            span: p.instrs[guard].span,
        });
    }
    loops.sort_by_key(|l| l.head);
    for i in 0..loops.len() {
        let mut depth = 0;
        for j in 0..loops.len() {
            if i == j {
                continue;
            }
            let (a, b) = (&loops[i], &loops[j]);
            let nested = b.head <= a.head && a.backjump <= b.backjump;
            let disjoint = a.backjump < b.head || b.backjump < a.head;
            let encloses = a.head <= b.head && b.backjump <= a.backjump;
            if !(nested || disjoint || encloses) {
                return Err(GotoError::Overlap(a.head, b.head));
            }
            if nested {
                depth += 1;
            }
        }
        loops[i].nesting_depth = depth;
    }
    Ok(loops)
}

impl GotoProgram {
    /// Innermost loop whose head is `pc`.
    pub fn loop_at_head(&self, pc: usize) -> Option<&LoopInfo> {
        self.loops.iter().filter(|l| l.head == pc).max_by_key(|l| l.nesting_depth)
    }

    /// Numbered instruction listing, one instruction per line.
    pub fn dump(&self) -> String {
        dump_instrs(&self.instrs, &self.vars)
    }

    pub fn var_name(&self, v: VarId) -> &str {
        self.vars.name(v)
    }

    pub fn display_expr(&self, e: &Expr) -> String {
        let namer = self.vars.namer();
        e.display(&namer).to_string()
    }
}

pub fn dump_instrs(instrs: &[Instruction], vars: &VarTable) -> String {
    let namer = vars.namer();
    let mut out = String::new();
    for (i, ins) in instrs.iter().enumerate() {
        let _ = write!(out, "{i:4}: {:<9}", ins.instr.opcode());
        let operands = match &ins.instr {
            Instr::Assign { var, value, decl } => format!(
                "{}{} := {}",
                if *decl { "decl " } else { "" },
                vars.name(*var),
                value.display(&namer)
            ),
            Instr::Assume { cond, origin } | Instr::Assert { cond, origin } => match origin {
                Origin::User => format!("{}", cond.display(&namer)),
                o => format!("{}  [{}]", cond.display(&namer), origin_tag(*o)),
            },
            Instr::Goto { target } => format!("{target}"),
            Instr::CondGoto { cond, target } => format!("{} -> {target}", cond.display(&namer)),
            Instr::Havoc { var } => vars.name(*var).to_string(),
            Instr::Skip => String::new(),
        };
        out.push(' ');
        out.push_str(&operands);
        let trimmed = out.trim_end().len();
        out.truncate(trimmed);
        out.push('\n');
    }
    out
}

fn origin_tag(o: Origin) -> &'static str {
    match o {
        Origin::User => "user",
        Origin::Unwinding => "unwinding",
        Origin::Invariant => "invariant",
        Origin::Stutter => "stutter",
    }
}

impl fmt::Display for GotoProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// Builds instruction lists with symbolic jump targets.
#[derive(Default)]
pub struct Builder {
    pub out: Vec<Instruction>,
    labels: Vec<Option<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Label(usize);

impl Builder {
    pub fn new_label(&mut self) -> Label {
        self.labels.push(None);
        Label(self.labels.len() - 1)
    }

    pub fn place(&mut self, l: Label) {
        debug_assert!(self.labels[l.0].is_none(), "label placed twice");
        self.labels[l.0] = Some(self.out.len());
    }

    pub fn emit(&mut self, instr: Instr, span: Span, origin_pc: usize) {
        self.out.push(Instruction { instr, span, origin_pc });
    }

    pub fn goto(&mut self, l: Label, span: Span, origin_pc: usize) {
        self.emit(Instr::Goto { target: l.0 }, span, origin_pc);
    }

    pub fn cond_goto(&mut self, cond: Expr, l: Label, span: Span, origin_pc: usize) {
        self.emit(Instr::CondGoto { cond, target: l.0 }, span, origin_pc);
    }

    /// Resolves labels to instruction indices.
    pub fn finish(mut self) -> Vec<Instruction> {
        let labels = self.labels;
        for ins in &mut self.out {
            if let Some(t) = ins.instr.target_mut() {
                *t = labels[*t].expect("jump to unplaced label");
            }
        }
        self.out
    }
}
