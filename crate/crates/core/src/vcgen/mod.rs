//! Single-assignment form and verification conditions.
//!
//! The loop-free program is executed symbolically in instruction order. Every
//! assignment defines a fresh version `x!n`; join points merge incoming
//! states with `ite` over the branch guards. An assertion that fails aborts
//! its path and an assumption that fails blocks it, so the path guard after
//! either is conjoined with its condition.

pub mod term;

use std::collections::{BTreeMap, HashMap};

use crate::expr::{BinOp, Expr, ExprKind, UnOp, VarId};
use crate::frontend::ast::Span;
use crate::goto::{Instr, Origin};
use crate::transform::{Phase, UnwoundProgram};
use crate::types::Ty;

pub use term::{BvOp, Sort, SymId, SymKind, Symbol, Term, TermId, TermPool};

/// A guarded proof obligation.
#[derive(Clone, Debug, PartialEq)]
pub struct Obligation {
    /// Path condition of the instruction.
    pub reach: TermId,
    pub cond: TermId,
    pub pc: usize,
    pub origin: Origin,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assumption {
    pub reach: TermId,
    pub cond: TermId,
    pub pc: usize,
    pub origin: Origin,
}

#[derive(Clone, Debug)]
pub struct SsaProgram {
    pub pool: TermPool,
    /// Versioned variables in definition order.
    pub definitions: Vec<(SymId, TermId)>,
    pub assumptions: Vec<Assumption>,
    pub obligations: Vec<Obligation>,
    /// Free symbol for every nondet node `(pc, site)`.
    pub nondets: BTreeMap<(usize, usize), SymId>,
    /// Path condition of every reachable instruction.
    pub reach: Vec<Option<TermId>>,
}

/// Shape of the satisfiability query of a phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// I ∧ T ∧ σ ∧ ¬φ
    Base,
    /// I ∧ T ∧ ¬(σ ∧ φ)
    Forward,
    /// γ ∧ σ ∧ ¬φ
    Inductive,
}

#[derive(Clone, Debug)]
pub struct VcFormula {
    pub pool: TermPool,
    /// Defined symbols, in dependency order; always part of the query.
    pub definitions: Vec<(SymId, TermId)>,
    /// Definitions whose right-hand side is a constant.
    pub init: TermId,
    /// Remaining definitions and every non-unwinding assumption (T or γ).
    pub trans: TermId,
    /// Termination conditions at the unwinding points.
    pub sigma: TermId,
    /// User assertions.
    pub prop: TermId,
    pub shape: Shape,
    /// The formula whose satisfiability is decided.
    pub query: TermId,
    /// Conjuncts of `query` other than the definitions.
    pub query_assumptions: TermId,
    pub nondets: BTreeMap<(usize, usize), SymId>,
    pub obligations: Vec<Obligation>,
}

impl VcFormula {
    /// Free and defined symbols used by the formula.
    pub fn symbols(&self) -> &[Symbol] {
        &self.pool.symbols
    }
}

struct State {
    guard: TermId,
    store: Vec<TermId>,
}

struct Ssa<'a> {
    u: &'a UnwoundProgram,
    pool: TermPool,
    definitions: Vec<(SymId, TermId)>,
    versions: Vec<u32>,
    initial: Vec<Option<TermId>>,
    nondets: BTreeMap<(usize, usize), SymId>,
}

impl Ssa<'_> {
    fn initial(&mut self, v: VarId) -> TermId {
        if let Some(t) = self.initial[v.index()] {
            return t;
        }
        let info = self.u.body.vars.get(v);
        let s = self.pool.new_symbol(
            format!("{}!0", info.name),
            Sort::Bv(info.ty.width),
            info.ty.signed,
            SymKind::Initial { var: v },
        );
        let t = self.pool.sym(s);
        self.initial[v.index()] = Some(t);
        t
    }

    fn define(&mut self, v: VarId, value: TermId) -> TermId {
        let info = self.u.body.vars.get(v);
        self.versions[v.index()] += 1;
        let version = self.versions[v.index()];
        let name = format!("{}!{}", info.name, version);
        let signed = info.ty.signed;
        let (s, t) = self.pool.define(name, value, signed, SymKind::Version { var: v, version });
        self.definitions.push((s, value));
        t
    }

    fn merge(&mut self, mut incoming: Vec<State>) -> State {
        if incoming.len() == 1 {
            return incoming.pop().expect("state");
        }
        let guard = self.pool.or(incoming.iter().map(|s| s.guard));
        let n = incoming[0].store.len();
        let mut store = Vec::with_capacity(n);
        for v in 0..n {
            let first = incoming[0].store[v];
            if incoming.iter().all(|s| s.store[v] == first) {
                store.push(first);
                continue;
            }
            let last = incoming.last().expect("state").store[v];
            let mut acc = last;
            for s in incoming.iter().rev().skip(1) {
                acc = self.pool.ite(s.guard, s.store[v], acc);
            }
            let t = self.define(VarId(v as u32), acc);
            store.push(t);
        }
        State { guard, store }
    }

    fn expr(&mut self, e: &Expr, store: &[TermId], pc: usize, site: &mut usize) -> TermId {
        match &e.kind {
            ExprKind::Const(c) => match e.ty {
                Ty::Bool => self.pool.bool_const(*c != 0),
                Ty::Int(t) => self.pool.bv_const(*c, t.width),
            },
            ExprKind::Var(v) => store[v.index()],
            ExprKind::Nondet => {
                let s = *site;
                *site += 1;
                let ty = e.ty.int().expect("integer nondet");
                let sym = *self.nondets.entry((pc, s)).or_insert_with(|| {
                    self.pool.new_symbol(
                        format!("nondet!{pc}!{s}"),
                        Sort::Bv(ty.width),
                        ty.signed,
                        SymKind::Nondet { pc, site: s },
                    )
                });
                self.pool.sym(sym)
            }
            ExprKind::Unary(op, a) => {
                let x = self.expr(a, store, pc, site);
                match op {
                    UnOp::Neg => self.pool.bvneg(x),
                    UnOp::BitNot => self.pool.bvnot(x),
                    UnOp::LogNot => self.pool.not(x),
                }
            }
            ExprKind::Cast(a) => {
                let x = self.expr(a, store, pc, site);
                match (a.ty, e.ty) {
                    (from, to) if from == to => x,
                    (_, Ty::Bool) => {
                        let w = a.ty.width();
                        let z = self.pool.bv_const(0, w);
                        let eq = self.pool.eq(x, z);
                        self.pool.not(eq)
                    }
                    (Ty::Bool, Ty::Int(t)) => self.pool.bool_to_bv(x, t.width),
                    (Ty::Int(f), Ty::Int(t)) => {
                        if t.width > f.width {
                            if f.signed {
                                self.pool.sext(x, t.width)
                            } else {
                                self.pool.zext(x, t.width)
                            }
                        } else {
                            self.pool.extract(x, t.width)
                        }
                    }
                }
            }
            ExprKind::Binary(op, a, b) => {
                let x = self.expr(a, store, pc, site);
                let y = self.expr(b, store, pc, site);
                let signed = a.ty.int().map(|t| t.signed).unwrap_or(false);
                let p = &mut self.pool;
                if a.ty.is_bool() && !op.is_logical() {
                    // comparisons of truth values
                    return match op {
                        BinOp::Eq => p.eq(x, y),
                        BinOp::Ne => {
                            let t = p.eq(x, y);
                            p.not(t)
                        }
                        _ => {
                            let xw = p.bool_to_bv(x, 1);
                            let yw = p.bool_to_bv(y, 1);
                            bv_binary(p, *op, xw, yw, false)
                        }
                    };
                }
                match op {
                    BinOp::LogAnd => p.and([x, y]),
                    BinOp::LogOr => p.or([x, y]),
                    _ => bv_binary(p, *op, x, y, signed),
                }
            }
            ExprKind::Ite(c, a, b) => {
                let c = self.expr(c, store, pc, site);
                let x = self.expr(a, store, pc, site);
                let y = self.expr(b, store, pc, site);
                self.pool.ite(c, x, y)
            }
        }
    }
}

fn bv_binary(p: &mut TermPool, op: BinOp, x: TermId, y: TermId, signed: bool) -> TermId {
    match op {
        BinOp::Add => p.bin(BvOp::Add, x, y),
        BinOp::Sub => p.bin(BvOp::Sub, x, y),
        BinOp::Mul => p.bin(BvOp::Mul, x, y),
        BinOp::Div => p.bin(if signed { BvOp::SDiv } else { BvOp::UDiv }, x, y),
        BinOp::Rem => p.bin(if signed { BvOp::SRem } else { BvOp::URem }, x, y),
        BinOp::BitAnd => p.bin(BvOp::And, x, y),
        BinOp::BitOr => p.bin(BvOp::Or, x, y),
        BinOp::BitXor => p.bin(BvOp::Xor, x, y),
        BinOp::Shl => p.bin(BvOp::Shl, x, y),
        BinOp::Shr => p.bin(if signed { BvOp::AShr } else { BvOp::LShr }, x, y),
        BinOp::Eq => p.eq(x, y),
        BinOp::Ne => {
            let t = p.eq(x, y);
            p.not(t)
        }
        BinOp::Lt => {
            if signed {
                p.slt(x, y)
            } else {
                p.ult(x, y)
            }
        }
        BinOp::Le => {
            if signed {
                p.sle(x, y)
            } else {
                p.ule(x, y)
            }
        }
        BinOp::Gt => {
            if signed {
                p.slt(y, x)
            } else {
                p.ult(y, x)
            }
        }
        BinOp::Ge => {
            if signed {
                p.sle(y, x)
            } else {
                p.ule(y, x)
            }
        }
        BinOp::LogAnd => p.and([x, y]),
        BinOp::LogOr => p.or([x, y]),
    }
}

/// Symbolically executes a loop-free program.
pub fn to_ssa(u: &UnwoundProgram) -> SsaProgram {
    let instrs = &u.body.instrs;
    let nvars = u.body.vars.len();
    let mut cx = Ssa {
        u,
        pool: TermPool::new(),
        definitions: Vec::new(),
        versions: vec![0; nvars],
        initial: vec![None; nvars],
        nondets: BTreeMap::new(),
    };
    let mut pending: HashMap<usize, Vec<State>> = HashMap::new();
    let init_store: Vec<TermId> = (0..nvars).map(|v| cx.initial(VarId(v as u32))).collect();
    let tru = cx.pool.tru();
    pending.insert(0, vec![State { guard: tru, store: init_store }]);
    let mut assumptions = Vec::new();
    let mut obligations = Vec::new();
    let mut reach = vec![None; instrs.len()];

    for pc in 0..instrs.len() {
        let Some(incoming) = pending.remove(&pc) else { continue };
        let State { guard, mut store } = cx.merge(incoming);
        if cx.pool.as_bool(guard) == Some(false) {
            continue;
        }
        reach[pc] = Some(guard);
        let ins = &instrs[pc];
        let mut site = 0;
        let push = |pending: &mut HashMap<usize, Vec<State>>, to: usize, st: State| {
            assert!(to > pc, "backjump in loop-free program");
            pending.entry(to).or_default().push(st);
        };
        match &ins.instr {
            Instr::Assign { var, value, .. } => {
                let t = cx.expr(value, &store, pc, &mut site);
                store[var.index()] = cx.define(*var, t);
                push(&mut pending, pc + 1, State { guard, store });
            }
            Instr::Havoc { var } => {
                let info = u.body.vars.get(*var);
                cx.versions[var.index()] += 1;
                let s = cx.pool.new_symbol(
                    format!("{}!{}", info.name, cx.versions[var.index()]),
                    Sort::Bv(info.ty.width),
                    info.ty.signed,
                    SymKind::Havoc { var: *var, pc },
                );
                store[var.index()] = cx.pool.sym(s);
                push(&mut pending, pc + 1, State { guard, store });
            }
            Instr::Assume { cond, origin } => {
                let c = cx.expr(cond, &store, pc, &mut site);
                assumptions.push(Assumption { reach: guard, cond: c, pc, origin: *origin });
                let g = cx.pool.and([guard, c]);
                push(&mut pending, pc + 1, State { guard: g, store });
            }
            Instr::Assert { cond, origin } => {
                let c = cx.expr(cond, &store, pc, &mut site);
                obligations.push(Obligation { reach: guard, cond: c, pc, origin: *origin, span: ins.span });
                let g = cx.pool.and([guard, c]);
                push(&mut pending, pc + 1, State { guard: g, store });
            }
            Instr::Goto { target } => push(&mut pending, *target, State { guard, store }),
            Instr::CondGoto { cond, target } => {
                let c = cx.expr(cond, &store, pc, &mut site);
                let taken = cx.pool.and([guard, c]);
                let nc = cx.pool.not(c);
                let fall = cx.pool.and([guard, nc]);
                if *target == pc + 1 {
                    push(&mut pending, pc + 1, State { guard, store });
                } else {
                    push(&mut pending, *target, State { guard: taken, store: store.clone() });
                    push(&mut pending, pc + 1, State { guard: fall, store });
                }
            }
            Instr::Skip => push(&mut pending, pc + 1, State { guard, store }),
        }
    }
    SsaProgram {
        pool: cx.pool,
        definitions: cx.definitions,
        assumptions,
        obligations,
        nondets: cx.nondets,
        reach,
    }
}

/// Builds the phase formula; the query is satisfiable iff the phase fails.
pub fn encode(s: &SsaProgram, phase: Phase) -> VcFormula {
    let mut pool = s.pool.clone();
    let is_unwinding = |o: Origin| o == Origin::Unwinding;

    let mut init_parts = Vec::new();
    let mut trans_parts = Vec::new();
    for &(sym, value) in &s.definitions {
        let st = pool.sym(sym);
        // equations are kept for presentation; the solver binds definitions directly
        let eq = pool.eq(st, value);
        if pool.as_bv(value).is_some() || pool.as_bool(value).is_some() {
            init_parts.push(eq);
        } else {
            trans_parts.push(eq);
        }
    }
    let mut assume_parts = Vec::new();
    let mut sigma_parts = Vec::new();
    for a in &s.assumptions {
        let imp = pool.implies(a.reach, a.cond);
        if is_unwinding(a.origin) {
            sigma_parts.push(imp);
        } else {
            assume_parts.push(imp);
        }
    }
    let mut prop_parts = Vec::new();
    for o in &s.obligations {
        let imp = pool.implies(o.reach, o.cond);
        if is_unwinding(o.origin) {
            sigma_parts.push(imp);
        } else {
            prop_parts.push(imp);
        }
    }
    let init = pool.and(init_parts);
    let assumptions = pool.and(assume_parts.iter().copied());
    trans_parts.extend(assume_parts);
    let trans = pool.and(trans_parts);
    let sigma = pool.and(sigma_parts);
    let prop = pool.and(prop_parts);
    let not_prop = pool.not(prop);
    let (shape, query_assumptions) = match phase {
        Phase::Base => (Shape::Base, pool.and([assumptions, sigma, not_prop])),
        Phase::Inductive => (Shape::Inductive, pool.and([assumptions, sigma, not_prop])),
        Phase::Forward => {
            let both = pool.and([sigma, prop]);
            let nb = pool.not(both);
            (Shape::Forward, pool.and([assumptions, nb]))
        }
    };
    let query = pool.and([init, trans, query_assumptions]);
    VcFormula {
        pool,
        definitions: s.definitions.clone(),
        init,
        trans,
        sigma,
        prop,
        shape,
        query,
        query_assumptions,
        nondets: s.nondets.clone(),
        obligations: s.obligations.clone(),
    }
}

/// Runs [`to_ssa`] and [`encode`] for the program's phase.
pub fn generate(u: &UnwoundProgram) -> VcFormula {
    encode(&to_ssa(u), u.phase)
}
