//! Loop invariants: inference, translation of annotation comments, and
//! instrumentation as assumptions.

mod absint;
pub mod pips;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::expr::{BinOp, Expr, ExprKind, UnOp};
use crate::goto::{identify_loops, GotoError, GotoProgram, Instr, Instruction, Origin};
use crate::types::{IntType, Ty};

pub use absint::infer_invariants;
pub use pips::{rewrite_expression, scan_init_markers, synthesize_snapshots, translate_invariants, PipsError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Eq,
    Le,
    Lt,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "==",
            Relation::Le => "<=",
            Relation::Lt => "<",
        }
    }

    fn binop(self) -> BinOp {
        match self {
            Relation::Eq => BinOp::Eq,
            Relation::Le => BinOp::Le,
            Relation::Lt => BinOp::Lt,
        }
    }
}

/// `sum(coef * var) rel constant`, evaluated in the machine arithmetic of
/// the variables' type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineConstraint {
    pub terms: Vec<(i128, String)>,
    pub relation: Relation,
    pub constant: i128,
}

impl AffineConstraint {
    pub fn new(terms: Vec<(i128, String)>, relation: Relation, constant: i128) -> Self {
        debug_assert!(terms.iter().any(|(c, _)| *c != 0));
        AffineConstraint { terms, relation, constant }
    }

    /// `lo <= v`
    pub fn lower(v: &str, lo: i128) -> Self {
        Self::new(vec![(-1, v.into())], Relation::Le, -lo)
    }

    /// `v <= hi`
    pub fn upper(v: &str, hi: i128) -> Self {
        Self::new(vec![(1, v.into())], Relation::Le, hi)
    }

    pub fn equals(v: &str, c: i128) -> Self {
        Self::new(vec![(1, v.into())], Relation::Eq, c)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(_, v)| v.as_str())
    }

    /// Builds the condition over the program's variables. All variables must
    /// share one integer type; the constant is wrapped into it.
    pub fn to_expr(&self, p: &GotoProgram) -> Result<Expr, InvariantError> {
        let mut ty: Option<IntType> = None;
        let mut vars = Vec::new();
        for (coef, name) in &self.terms {
            let v = p.vars.find(name).ok_or_else(|| InvariantError::OutOfScope(name.clone()))?;
            let t = p.vars.ty(v);
            if ty.is_some_and(|u| u != t) {
                return Err(InvariantError::MixedTypes(self.to_string()));
            }
            ty = Some(t);
            vars.push((*coef, Expr::var(v, t)));
        }
        let ty = ty.ok_or(InvariantError::Empty)?;
        let rel = self.relation.binop();
        if let [(-1, v)] = vars.as_slice() {
            return Ok(Expr::binary(rel, Expr::constant(-self.constant, ty), v.clone()));
        }
        let scaled = |c: i128, v: Expr| {
            if c.abs() == 1 {
                v
            } else {
                Expr::binary(BinOp::Mul, Expr::constant(c.abs(), ty), v)
            }
        };
        let mut sum: Option<Expr> = None;
        for (c, v) in vars {
            let term = scaled(c, v);
            sum = Some(match sum {
                None if c < 0 => Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(term)), Ty::Int(ty)),
                None => term,
                Some(s) if c < 0 => Expr::binary(BinOp::Sub, s, term),
                Some(s) => Expr::binary(BinOp::Add, s, term),
            });
        }
        Ok(Expr::binary(rel, sum.expect("nonempty"), Expr::constant(self.constant, ty)))
    }
}

impl fmt::Display for AffineConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [(-1, v)] = self.terms.as_slice() {
            return write!(f, "{} {} {}", -self.constant, self.relation.symbol(), v);
        }
        for (i, (c, v)) in self.terms.iter().enumerate() {
            let sign = if *c < 0 { "-" } else { "+" };
            if i == 0 {
                if *c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs() != 1 {
                write!(f, "{}*", c.abs())?;
            }
            f.write_str(v)?;
        }
        write!(f, " {} {}", self.relation.symbol(), self.constant)
    }
}

/// Constraints by program point (the pc of a loop head).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvariantSet {
    pub by_location: BTreeMap<usize, Vec<AffineConstraint>>,
    /// `(function, variable)` pairs that need an `_init` snapshot.
    pub snapshot_vars: BTreeSet<(String, String)>,
}

impl InvariantSet {
    pub fn is_empty(&self) -> bool {
        self.by_location.values().all(|v| v.is_empty())
    }

    pub fn len(&self) -> usize {
        self.by_location.values().map(|v| v.len()).sum()
    }

    /// One line per location: `pc: c1, c2, ...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (pc, cs) in &self.by_location {
            let list: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("{pc}: {{{}}}\n", list.join(", ")));
        }
        out
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InvariantError {
    #[error("invariant refers to `{0}`, which is not in scope")]
    OutOfScope(String),
    #[error("invariant `{0}` mixes variables of different types")]
    MixedTypes(String),
    #[error("empty constraint")]
    Empty,
    #[error("invariant location {0} is not an instruction")]
    BadLocation(usize),
    #[error(transparent)]
    Goto(#[from] GotoError),
}

/// Inserts one `ASSUME` per annotated location, immediately before the
/// instruction; jumps to that instruction now reach the assumption first.
pub fn instrument(p: &GotoProgram, inv: &InvariantSet) -> Result<GotoProgram, InvariantError> {
    let n = p.instrs.len();
    let mut inserts: BTreeMap<usize, Expr> = BTreeMap::new();
    for (&pc, cs) in &inv.by_location {
        if cs.is_empty() {
            continue;
        }
        if pc >= n {
            return Err(InvariantError::BadLocation(pc));
        }
        let parts = cs.iter().map(|c| c.to_expr(p)).collect::<Result<Vec<_>, _>>()?;
        inserts.insert(pc, Expr::and_all(parts));
    }
    if inserts.is_empty() {
        return Ok(p.clone());
    }
    // the first instruction placed for old pc t (an assumption when one is inserted there)
    let mut placed = vec![0; n + 1];
    let mut shift = 0;
    for (t, slot) in placed.iter_mut().enumerate() {
        *slot = t + shift;
        if inserts.contains_key(&t) {
            shift += 1;
        }
    }
    let mut instrs: Vec<Instruction> = Vec::with_capacity(n + inserts.len());
    for (pc, ins) in p.instrs.iter().enumerate() {
        if let Some(cond) = inserts.get(&pc) {
            instrs.push(Instruction {
                instr: Instr::Assume { cond: cond.clone(), origin: Origin::Invariant },
                span: ins.span,
                origin_pc: 0,
            });
        }
        let mut ins = ins.clone();
        match &mut ins.instr {
            Instr::Goto { target } | Instr::CondGoto { target, .. } => *target = placed[*target],
            _ => {}
        }
        instrs.push(ins);
    }
    for (i, ins) in instrs.iter_mut().enumerate() {
        ins.origin_pc = i;
    }
    let mut out = GotoProgram { file: p.file.clone(), vars: p.vars.clone(), instrs, loops: Vec::new() };
    out.loops = identify_loops(&out)?;
    Ok(out)
}
