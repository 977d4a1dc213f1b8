//! Hash-consed bit-vector terms.

use std::collections::HashMap;
use std::fmt;

use crate::expr::VarId;
use crate::types::{mask, sign_extend};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Bool,
    Bv(u32),
}

impl Sort {
    pub fn width(self) -> u32 {
        match self {
            Sort::Bool => 1,
            Sort::Bv(w) => w,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BvOp {
    Add,
    Sub,
    Mul,
    UDiv,
    URem,
    SDiv,
    SRem,
    And,
    Or,
    Xor,
    Shl,
    LShr,
    AShr,
}

impl BvOp {
    pub fn smt_name(self) -> &'static str {
        match self {
            BvOp::Add => "bvadd",
            BvOp::Sub => "bvsub",
            BvOp::Mul => "bvmul",
            BvOp::UDiv => "bvudiv",
            BvOp::URem => "bvurem",
            BvOp::SDiv => "bvsdiv",
            BvOp::SRem => "bvsrem",
            BvOp::And => "bvand",
            BvOp::Or => "bvor",
            BvOp::Xor => "bvxor",
            BvOp::Shl => "bvshl",
            BvOp::LShr => "bvlshr",
            BvOp::AShr => "bvashr",
        }
    }

    fn commutative(self) -> bool {
        matches!(self, BvOp::Add | BvOp::Mul | BvOp::And | BvOp::Or | BvOp::Xor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    BoolConst(bool),
    BvConst { value: u64, width: u32 },
    Sym(SymId),
    Not(TermId),
    And(Vec<TermId>),
    Or(Vec<TermId>),
    Ite(TermId, TermId, TermId),
    Eq(TermId, TermId),
    Ult(TermId, TermId),
    Ule(TermId, TermId),
    Slt(TermId, TermId),
    Sle(TermId, TermId),
    BvNeg(TermId),
    BvNot(TermId),
    Bin(BvOp, TermId, TermId),
    /// Zero-extension to the given width.
    ZExt(TermId, u32),
    /// Sign-extension to the given width.
    SExt(TermId, u32),
    /// Low bits, truncating to the given width.
    Extract(TermId, u32),
    /// `1` or `0` of the given width.
    BoolToBv(TermId, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymKind {
    /// SSA version of a program variable; defined by an equation.
    Version { var: VarId, version: u32 },
    /// Value of a variable before any assignment.
    Initial { var: VarId },
    /// A nondet expression node at `(pc, site)`.
    Nondet { pc: usize, site: usize },
    /// Result of a HAVOC at `pc`.
    Havoc { var: VarId, pc: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub sort: Sort,
    pub signed: bool,
    pub kind: SymKind,
}

#[derive(Clone, Debug, Default)]
pub struct TermPool {
    terms: Vec<Term>,
    sorts: Vec<Sort>,
    index: HashMap<Term, TermId>,
    pub symbols: Vec<Symbol>,
    /// Defining term per symbol, for defined symbols.
    pub defs: HashMap<SymId, TermId>,
}

impl TermPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, t: TermId) -> &Term {
        &self.terms[t.0 as usize]
    }

    pub fn sort(&self, t: TermId) -> Sort {
        self.sorts[t.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn symbol(&self, s: SymId) -> &Symbol {
        &self.symbols[s.0 as usize]
    }

    pub fn new_symbol(&mut self, name: String, sort: Sort, signed: bool, kind: SymKind) -> SymId {
        self.symbols.push(Symbol { name, sort, signed, kind });
        SymId(self.symbols.len() as u32 - 1)
    }

    /// Introduces a symbol standing for `value`.
    pub fn define(&mut self, name: String, value: TermId, signed: bool, kind: SymKind) -> (SymId, TermId) {
        let sort = self.sort(value);
        let s = self.new_symbol(name, sort, signed, kind);
        self.defs.insert(s, value);
        (s, self.sym(s))
    }

    fn intern(&mut self, t: Term, sort: Sort) -> TermId {
        if let Some(&id) = self.index.get(&t) {
            return id;
        }
        let id = TermId(self.terms.len() as u32);
        self.terms.push(t.clone());
        self.sorts.push(sort);
        self.index.insert(t, id);
        id
    }

    pub fn bool_const(&mut self, b: bool) -> TermId {
        self.intern(Term::BoolConst(b), Sort::Bool)
    }

    pub fn tru(&mut self) -> TermId {
        self.bool_const(true)
    }

    pub fn fls(&mut self) -> TermId {
        self.bool_const(false)
    }

    pub fn bv_const(&mut self, value: u64, width: u32) -> TermId {
        self.intern(Term::BvConst { value: value & mask(width), width }, Sort::Bv(width))
    }

    pub fn sym(&mut self, s: SymId) -> TermId {
        let sort = self.symbols[s.0 as usize].sort;
        self.intern(Term::Sym(s), sort)
    }

    pub fn as_bool(&self, t: TermId) -> Option<bool> {
        match self.get(t) {
            Term::BoolConst(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_bv(&self, t: TermId) -> Option<u64> {
        match self.get(t) {
            Term::BvConst { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn not(&mut self, a: TermId) -> TermId {
        match self.get(a).clone() {
            Term::BoolConst(b) => self.bool_const(!b),
            Term::Not(x) => x,
            _ => self.intern(Term::Not(a), Sort::Bool),
        }
    }

    pub fn and(&mut self, parts: impl IntoIterator<Item = TermId>) -> TermId {
        let mut out: Vec<TermId> = Vec::new();
        for p in parts {
            match self.get(p).clone() {
                Term::BoolConst(true) => {}
                Term::BoolConst(false) => return self.fls(),
                Term::And(inner) => out.extend(inner),
                _ => out.push(p),
            }
        }
        out.sort();
        out.dedup();
        for &t in &out {
            if let Term::Not(x) = self.get(t) {
                if out.binary_search(x).is_ok() {
                    return self.fls();
                }
            }
        }
        match out.len() {
            0 => self.tru(),
            1 => out[0],
            _ => self.intern(Term::And(out), Sort::Bool),
        }
    }

    pub fn or(&mut self, parts: impl IntoIterator<Item = TermId>) -> TermId {
        let mut out: Vec<TermId> = Vec::new();
        for p in parts {
            match self.get(p).clone() {
                Term::BoolConst(false) => {}
                Term::BoolConst(true) => return self.tru(),
                Term::Or(inner) => out.extend(inner),
                _ => out.push(p),
            }
        }
        out.sort();
        out.dedup();
        for &t in &out {
            if let Term::Not(x) = self.get(t) {
                if out.binary_search(x).is_ok() {
                    return self.tru();
                }
            }
        }
        match out.len() {
            0 => self.fls(),
            1 => out[0],
            _ => self.intern(Term::Or(out), Sort::Bool),
        }
    }

    pub fn implies(&mut self, a: TermId, b: TermId) -> TermId {
        let na = self.not(a);
        self.or([na, b])
    }

    pub fn ite(&mut self, c: TermId, a: TermId, b: TermId) -> TermId {
        if a == b {
            return a;
        }
        match self.as_bool(c) {
            Some(true) => return a,
            Some(false) => return b,
            None => {}
        }
        if let Term::Not(inner) = self.get(c).clone() {
            return self.ite(inner, b, a);
        }
        let sort = self.sort(a);
        if sort == Sort::Bool {
            match (self.as_bool(a), self.as_bool(b)) {
                (Some(true), Some(false)) => return c,
                (Some(false), Some(true)) => return self.not(c),
                (Some(true), _) => return self.or([c, b]),
                (Some(false), _) => {
                    let nc = self.not(c);
                    return self.and([nc, b]);
                }
                (_, Some(true)) => {
                    let nc = self.not(c);
                    return self.or([nc, a]);
                }
                (_, Some(false)) => return self.and([c, a]),
                _ => {}
            }
        }
        self.intern(Term::Ite(c, a, b), sort)
    }

    pub fn eq(&mut self, a: TermId, b: TermId) -> TermId {
        if a == b {
            return self.tru();
        }
        if let (Some(x), Some(y)) = (self.as_bv(a), self.as_bv(b)) {
            return self.bool_const(x == y);
        }
        if let (Some(x), Some(y)) = (self.as_bool(a), self.as_bool(b)) {
            return self.bool_const(x == y);
        }
        if self.sort(a) == Sort::Bool {
            if let Some(x) = self.as_bool(a) {
                return if x { b } else { self.not(b) };
            }
            if let Some(y) = self.as_bool(b) {
                return if y { a } else { self.not(a) };
            }
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.intern(Term::Eq(a, b), Sort::Bool)
    }

    fn fold_cmp(&self, a: TermId, b: TermId, f: impl Fn(u64, u64, u32) -> bool) -> Option<bool> {
        let w = self.sort(a).width();
        Some(f(self.as_bv(a)?, self.as_bv(b)?, w))
    }

    pub fn ult(&mut self, a: TermId, b: TermId) -> TermId {
        if a == b {
            return self.fls();
        }
        if let Some(r) = self.fold_cmp(a, b, |x, y, _| x < y) {
            return self.bool_const(r);
        }
        self.intern(Term::Ult(a, b), Sort::Bool)
    }

    pub fn ule(&mut self, a: TermId, b: TermId) -> TermId {
        if a == b {
            return self.tru();
        }
        if let Some(r) = self.fold_cmp(a, b, |x, y, _| x <= y) {
            return self.bool_const(r);
        }
        self.intern(Term::Ule(a, b), Sort::Bool)
    }

    pub fn slt(&mut self, a: TermId, b: TermId) -> TermId {
        if a == b {
            return self.fls();
        }
        if let Some(r) = self.fold_cmp(a, b, |x, y, w| sign_extend(x, w) < sign_extend(y, w)) {
            return self.bool_const(r);
        }
        self.intern(Term::Slt(a, b), Sort::Bool)
    }

    pub fn sle(&mut self, a: TermId, b: TermId) -> TermId {
        if a == b {
            return self.tru();
        }
        if let Some(r) = self.fold_cmp(a, b, |x, y, w| sign_extend(x, w) <= sign_extend(y, w)) {
            return self.bool_const(r);
        }
        self.intern(Term::Sle(a, b), Sort::Bool)
    }

    pub fn bvneg(&mut self, a: TermId) -> TermId {
        let w = self.sort(a).width();
        if let Some(x) = self.as_bv(a) {
            return self.bv_const(x.wrapping_neg(), w);
        }
        self.intern(Term::BvNeg(a), Sort::Bv(w))
    }

    pub fn bvnot(&mut self, a: TermId) -> TermId {
        let w = self.sort(a).width();
        if let Some(x) = self.as_bv(a) {
            return self.bv_const(!x, w);
        }
        if let Term::BvNot(x) = self.get(a) {
            return *x;
        }
        self.intern(Term::BvNot(a), Sort::Bv(w))
    }

    pub fn bin(&mut self, op: BvOp, a: TermId, b: TermId) -> TermId {
        let w = self.sort(a).width();
        debug_assert_eq!(self.sort(a), self.sort(b));
        if let (Some(x), Some(y)) = (self.as_bv(a), self.as_bv(b)) {
            return self.bv_const(eval_bvop(op, x, y, w), w);
        }
        let zero = |p: &TermPool, t: TermId| p.as_bv(t) == Some(0);
        match op {
            BvOp::Add | BvOp::Or | BvOp::Xor if zero(self, b) => return a,
            BvOp::Add | BvOp::Or | BvOp::Xor if zero(self, a) => return b,
            BvOp::Sub | BvOp::Shl | BvOp::LShr | BvOp::AShr if zero(self, b) => return a,
            BvOp::Mul | BvOp::And if zero(self, a) || zero(self, b) => return self.bv_const(0, w),
            BvOp::Mul if self.as_bv(b) == Some(1) => return a,
            BvOp::Mul if self.as_bv(a) == Some(1) => return b,
            BvOp::Sub | BvOp::Xor if a == b => return self.bv_const(0, w),
            _ => {}
        }
        let (a, b) = if op.commutative() && b < a { (b, a) } else { (a, b) };
        self.intern(Term::Bin(op, a, b), Sort::Bv(w))
    }

    pub fn zext(&mut self, a: TermId, to: u32) -> TermId {
        let w = self.sort(a).width();
        if w == to {
            return a;
        }
        if let Some(x) = self.as_bv(a) {
            return self.bv_const(x, to);
        }
        self.intern(Term::ZExt(a, to), Sort::Bv(to))
    }

    pub fn sext(&mut self, a: TermId, to: u32) -> TermId {
        let w = self.sort(a).width();
        if w == to {
            return a;
        }
        if let Some(x) = self.as_bv(a) {
            return self.bv_const(sign_extend(x, w) as u64, to);
        }
        self.intern(Term::SExt(a, to), Sort::Bv(to))
    }

    pub fn extract(&mut self, a: TermId, to: u32) -> TermId {
        let w = self.sort(a).width();
        if w == to {
            return a;
        }
        if let Some(x) = self.as_bv(a) {
            return self.bv_const(x, to);
        }
        self.intern(Term::Extract(a, to), Sort::Bv(to))
    }

    pub fn bool_to_bv(&mut self, a: TermId, width: u32) -> TermId {
        if let Some(b) = self.as_bool(a) {
            return self.bv_const(b as u64, width);
        }
        self.intern(Term::BoolToBv(a, width), Sort::Bv(width))
    }

    pub fn children(&self, t: TermId) -> Vec<TermId> {
        match self.get(t) {
            Term::BoolConst(_) | Term::BvConst { .. } | Term::Sym(_) => vec![],
            Term::Not(a)
            | Term::BvNeg(a)
            | Term::BvNot(a)
            | Term::ZExt(a, _)
            | Term::SExt(a, _)
            | Term::Extract(a, _)
            | Term::BoolToBv(a, _) => vec![*a],
            Term::And(v) | Term::Or(v) => v.clone(),
            Term::Ite(c, a, b) => vec![*c, *a, *b],
            Term::Eq(a, b)
            | Term::Ult(a, b)
            | Term::Ule(a, b)
            | Term::Slt(a, b)
            | Term::Sle(a, b)
            | Term::Bin(_, a, b) => vec![*a, *b],
        }
    }

    /// Evaluates every term under an assignment of the free symbols. Defined
    /// symbols take the value of their definition. Returned values are
    /// indexed by term id.
    pub fn eval_all(&self, free: &HashMap<SymId, u64>) -> Vec<u64> {
        let mut val = vec![0u64; self.terms.len()];
        for i in 0..self.terms.len() {
            let t = &self.terms[i];
            let w = self.sorts[i].width();
            let g = |x: &TermId| val[x.0 as usize];
            val[i] = match t {
                Term::BoolConst(b) => *b as u64,
                Term::BvConst { value, .. } => *value,
                Term::Sym(s) => match self.defs.get(s) {
                    Some(d) => g(d),
                    None => free.get(s).copied().unwrap_or(0) & mask(w),
                },
                Term::Not(a) => (g(a) == 0) as u64,
                Term::And(v) => v.iter().all(|x| g(x) != 0) as u64,
                Term::Or(v) => v.iter().any(|x| g(x) != 0) as u64,
                Term::Ite(c, a, b) => {
                    if g(c) != 0 {
                        g(a)
                    } else {
                        g(b)
                    }
                }
                Term::Eq(a, b) => (g(a) == g(b)) as u64,
                Term::Ult(a, b) => (g(a) < g(b)) as u64,
                Term::Ule(a, b) => (g(a) <= g(b)) as u64,
                Term::Slt(a, b) | Term::Sle(a, b) => {
                    let aw = self.sorts[a.0 as usize].width();
                    let (x, y) = (sign_extend(g(a), aw), sign_extend(g(b), aw));
                    (if matches!(t, Term::Slt(..)) { x < y } else { x <= y }) as u64
                }
                Term::BvNeg(a) => g(a).wrapping_neg() & mask(w),
                Term::BvNot(a) => !g(a) & mask(w),
                Term::Bin(op, a, b) => eval_bvop(*op, g(a), g(b), w),
                Term::ZExt(a, _) => g(a),
                Term::SExt(a, _) => {
                    let aw = self.sorts[a.0 as usize].width();
                    (sign_extend(g(a), aw) as u64) & mask(w)
                }
                Term::Extract(a, _) => g(a) & mask(w),
                Term::BoolToBv(a, _) => (g(a) != 0) as u64,
            };
        }
        val
    }

    pub fn display(&self, t: TermId) -> TermDisplay<'_> {
        TermDisplay { pool: self, t }
    }
}

pub fn eval_bvop(op: BvOp, x: u64, y: u64, w: u32) -> u64 {
    use crate::expr::{sdiv, srem, udiv, urem};
    let m = mask(w);
    let (x, y) = (x & m, y & m);
    let r = match op {
        BvOp::Add => x.wrapping_add(y),
        BvOp::Sub => x.wrapping_sub(y),
        BvOp::Mul => x.wrapping_mul(y),
        BvOp::UDiv => udiv(x, y, w),
        BvOp::URem => urem(x, y),
        BvOp::SDiv => sdiv(x, y, w),
        BvOp::SRem => srem(x, y, w),
        BvOp::And => x & y,
        BvOp::Or => x | y,
        BvOp::Xor => x ^ y,
        BvOp::Shl => {
            if y >= w as u64 {
                0
            } else {
                x << y
            }
        }
        BvOp::LShr => {
            if y >= w as u64 {
                0
            } else {
                x >> y
            }
        }
        BvOp::AShr => {
            let s = sign_extend(x, w);
            if y >= w as u64 {
                if s < 0 {
                    m
                } else {
                    0
                }
            } else {
                (s >> y) as u64
            }
        }
    };
    r & m
}

/// SMT-LIB rendering of a term.
pub struct TermDisplay<'a> {
    pool: &'a TermPool,
    t: TermId,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.pool;
        let sub = |t: TermId| TermDisplay { pool: p, t };
        match p.get(self.t) {
            Term::BoolConst(b) => write!(f, "{b}"),
            Term::BvConst { value, width } => write!(f, "(_ bv{value} {width})"),
            Term::Sym(s) => write!(f, "|{}|", p.symbol(*s).name),
            Term::Not(a) => write!(f, "(not {})", sub(*a)),
            Term::And(v) | Term::Or(v) => {
                f.write_str(if matches!(p.get(self.t), Term::And(_)) { "(and" } else { "(or" })?;
                for x in v {
                    write!(f, " {}", sub(*x))?;
                }
                f.write_str(")")
            }
            Term::Ite(c, a, b) => write!(f, "(ite {} {} {})", sub(*c), sub(*a), sub(*b)),
            Term::Eq(a, b) => write!(f, "(= {} {})", sub(*a), sub(*b)),
            Term::Ult(a, b) => write!(f, "(bvult {} {})", sub(*a), sub(*b)),
            Term::Ule(a, b) => write!(f, "(bvule {} {})", sub(*a), sub(*b)),
            Term::Slt(a, b) => write!(f, "(bvslt {} {})", sub(*a), sub(*b)),
            Term::Sle(a, b) => write!(f, "(bvsle {} {})", sub(*a), sub(*b)),
            Term::BvNeg(a) => write!(f, "(bvneg {})", sub(*a)),
            Term::BvNot(a) => write!(f, "(bvnot {})", sub(*a)),
            Term::Bin(op, a, b) => write!(f, "({} {} {})", op.smt_name(), sub(*a), sub(*b)),
            Term::ZExt(a, to) => {
                let w = p.sort(*a).width();
                write!(f, "((_ zero_extend {}) {})", to - w, sub(*a))
            }
            Term::SExt(a, to) => {
                let w = p.sort(*a).width();
                write!(f, "((_ sign_extend {}) {})", to - w, sub(*a))
            }
            Term::Extract(a, to) => write!(f, "((_ extract {} 0) {})", to - 1, sub(*a)),
            Term::BoolToBv(a, w) => write!(f, "(ite {} (_ bv1 {w}) (_ bv0 {w}))", sub(*a)),
        }
    }
}
