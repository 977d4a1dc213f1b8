//! Interval analysis with modular difference and sum facts between pairs of
//! variables of the same type.

use std::collections::{BTreeMap, BTreeSet};

use crate::expr::{BinOp, Expr, ExprKind, UnOp, VarId};
use crate::goto::{GotoProgram, Instr};
use crate::types::{IntType, Ty};

use super::{AffineConstraint, InvariantSet, Relation};

const WIDEN_AFTER: u32 = 3;
const NARROWING_ROUNDS: usize = 3;

/// Closed interval of mathematical values (signed or unsigned reading).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Itv {
    lo: i128,
    hi: i128,
}

impl Itv {
    fn of(ty: IntType) -> Itv {
        Itv { lo: ty.min_value(), hi: ty.max_value() }
    }

    fn single(v: i128) -> Itv {
        Itv { lo: v, hi: v }
    }

    fn boolean() -> Itv {
        Itv { lo: 0, hi: 1 }
    }

    fn join(self, o: Itv) -> Itv {
        Itv { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    fn meet(self, o: Itv) -> Option<Itv> {
        let r = Itv { lo: self.lo.max(o.lo), hi: self.hi.min(o.hi) };
        (r.lo <= r.hi).then_some(r)
    }

    fn constant(self) -> Option<i128> {
        (self.lo == self.hi).then_some(self.lo)
    }

    fn fits(self, ty: IntType) -> bool {
        self.lo >= ty.min_value() && self.hi <= ty.max_value()
    }

    /// The interval if it fits the type, else the whole type.
    fn clamp(self, ty: IntType) -> Itv {
        if self.fits(ty) {
            self
        } else {
            Itv::of(ty)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct State {
    itv: Vec<Itv>,
    /// Assigned on every path so far.
    defined: Vec<bool>,
    /// `a - b ≡ d` for `a < b`.
    diff: BTreeMap<(VarId, VarId), u64>,
    /// `a + b ≡ d` for `a < b`.
    sum: BTreeMap<(VarId, VarId), u64>,
}

struct Analysis<'a> {
    p: &'a GotoProgram,
    types: Vec<IntType>,
    /// Widening stops at these values before jumping to the type bounds.
    thresholds: BTreeSet<i128>,
}

/// Program constants and their neighbors, in their own type's reading.
fn thresholds(p: &GotoProgram) -> BTreeSet<i128> {
    fn walk(e: &Expr, out: &mut BTreeSet<i128>) {
        if let (ExprKind::Const(c), Ty::Int(t)) = (&e.kind, e.ty) {
            let v = t.to_i128(*c);
            out.extend([v - 1, v, v + 1]);
        }
        for c in e.children() {
            walk(c, out);
        }
    }
    let mut out = BTreeSet::new();
    for ins in &p.instrs {
        match &ins.instr {
            Instr::Assign { value: e, .. }
            | Instr::Assume { cond: e, .. }
            | Instr::Assert { cond: e, .. }
            | Instr::CondGoto { cond: e, .. } => walk(e, &mut out),
            _ => {}
        }
    }
    out
}

fn modv(v: i128, ty: IntType) -> u64 {
    ty.wrap(v)
}

impl Analysis<'_> {
    fn ty(&self, v: VarId) -> IntType {
        self.types[v.index()]
    }

    fn initial(&self) -> State {
        State {
            itv: self.types.iter().map(|&t| Itv::of(t)).collect(),
            defined: vec![false; self.types.len()],
            diff: BTreeMap::new(),
            sum: BTreeMap::new(),
        }
    }

    /// `a - b` modulo the width, explicit or implied by constants.
    fn diff_of(&self, s: &State, a: VarId, b: VarId) -> Option<u64> {
        let ty = self.ty(a);
        if a == b {
            return Some(0);
        }
        if let (Some(x), Some(y)) = (s.itv[a.index()].constant(), s.itv[b.index()].constant()) {
            return Some(modv(x - y, ty));
        }
        if a < b {
            s.diff.get(&(a, b)).copied()
        } else {
            s.diff.get(&(b, a)).map(|d| modv(-(*d as i128), ty))
        }
    }

    fn sum_of(&self, s: &State, a: VarId, b: VarId) -> Option<u64> {
        let ty = self.ty(a);
        if let (Some(x), Some(y)) = (s.itv[a.index()].constant(), s.itv[b.index()].constant()) {
            return Some(modv(x + y, ty));
        }
        let key = if a < b { (a, b) } else { (b, a) };
        s.sum.get(&key).copied()
    }

    fn join(&self, a: &State, b: &State, widen: bool) -> State {
        let mut itv = Vec::with_capacity(a.itv.len());
        for (i, (x, y)) in a.itv.iter().zip(&b.itv).enumerate() {
            let j = x.join(*y);
            if widen {
                let t = self.types[i];
                let lo = if j.lo < x.lo {
                    self.thresholds.range(t.min_value()..=j.lo).next_back().copied().unwrap_or(t.min_value())
                } else {
                    x.lo
                };
                let hi = if j.hi > x.hi {
                    self.thresholds.range(j.hi..=t.max_value()).next().copied().unwrap_or(t.max_value())
                } else {
                    x.hi
                };
                itv.push(Itv { lo, hi });
            } else {
                itv.push(j);
            }
        }
        let defined: Vec<bool> = a.defined.iter().zip(&b.defined).map(|(x, y)| *x && *y).collect();
        let mut diff = BTreeMap::new();
        let mut sum = BTreeMap::new();
        for (x, y) in self.candidate_pairs(a) {
            if !defined[x.index()] || !defined[y.index()] {
                continue;
            }
            if let (Some(d1), Some(d2)) = (self.diff_of(a, x, y), self.diff_of(b, x, y)) {
                if d1 == d2 {
                    diff.insert((x, y), d1);
                }
            }
            if let (Some(d1), Some(d2)) = (self.sum_of(a, x, y), self.sum_of(b, x, y)) {
                if d1 == d2 {
                    sum.insert((x, y), d1);
                }
            }
        }
        let mut out = State { itv, defined, diff, sum };
        self.drop_constant_facts(&mut out);
        out
    }

    /// Pairs with an explicit fact or two constant members in `s`.
    fn candidate_pairs(&self, s: &State) -> BTreeSet<(VarId, VarId)> {
        let mut out: BTreeSet<(VarId, VarId)> = s.diff.keys().chain(s.sum.keys()).copied().collect();
        let consts: Vec<VarId> = (0..self.types.len())
            .map(|i| VarId(i as u32))
            .filter(|v| s.defined[v.index()] && s.itv[v.index()].constant().is_some())
            .collect();
        for (i, &a) in consts.iter().enumerate() {
            for &b in &consts[i + 1..] {
                if self.ty(a) == self.ty(b) {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    /// Facts between two constants are implied by the intervals.
    fn drop_constant_facts(&self, s: &mut State) {
        let itv = &s.itv;
        let keep = |(a, b): &(VarId, VarId)| !(itv[a.index()].constant().is_some() && itv[b.index()].constant().is_some());
        s.diff.retain(|k, _| keep(k));
        s.sum.retain(|k, _| keep(k));
    }

    fn kill(&self, s: &mut State, x: VarId) {
        s.diff.retain(|(a, b), _| *a != x && *b != x);
        s.sum.retain(|(a, b), _| *a != x && *b != x);
    }

    fn set_diff(&self, s: &mut State, a: VarId, b: VarId, d: u64) {
        let ty = self.ty(a);
        if a < b {
            s.diff.insert((a, b), d);
        } else if b < a {
            s.diff.insert((b, a), modv(-(d as i128), ty));
        }
    }

    fn set_sum(&self, s: &mut State, a: VarId, b: VarId, d: u64) {
        if a != b {
            s.sum.insert(if a < b { (a, b) } else { (b, a) }, d);
        }
    }

    fn eval(&self, e: &Expr, s: &State) -> Itv {
        let ty = match e.ty {
            Ty::Bool => None,
            Ty::Int(t) => Some(t),
        };
        let full = || ty.map(Itv::of).unwrap_or_else(Itv::boolean);
        match &e.kind {
            ExprKind::Const(c) => match ty {
                Some(t) => Itv::single(t.to_i128(*c)),
                None => Itv::single(*c as i128),
            },
            ExprKind::Var(v) => s.itv[v.index()],
            ExprKind::Nondet => full(),
            ExprKind::Cast(a) => {
                let x = self.eval(a, s);
                match e.ty {
                    Ty::Bool => {
                        if x.lo > 0 || x.hi < 0 {
                            Itv::single(1)
                        } else if x == Itv::single(0) {
                            Itv::single(0)
                        } else {
                            Itv::boolean()
                        }
                    }
                    Ty::Int(t) => x.clamp(t),
                }
            }
            ExprKind::Unary(op, a) => {
                let x = self.eval(a, s);
                match (op, ty) {
                    (UnOp::LogNot, _) => match x.constant() {
                        Some(0) => Itv::single(1),
                        _ if x.lo > 0 || x.hi < 0 => Itv::single(0),
                        _ => Itv::boolean(),
                    },
                    (UnOp::Neg, Some(t)) => Itv { lo: -x.hi, hi: -x.lo }.clamp(t),
                    (UnOp::BitNot, Some(t)) if t.signed => Itv { lo: -x.hi - 1, hi: -x.lo - 1 }.clamp(t),
                    (UnOp::BitNot, Some(t)) => Itv { lo: t.max_value() - x.hi, hi: t.max_value() - x.lo },
                    _ => full(),
                }
            }
            ExprKind::Ite(c, a, b) => match self.eval(c, s).constant() {
                Some(0) => self.eval(b, s),
                Some(_) => self.eval(a, s),
                None => self.eval(a, s).join(self.eval(b, s)),
            },
            ExprKind::Binary(op, a, b) => {
                let x = self.eval(a, s);
                let y = self.eval(b, s);
                if op.is_comparison() {
                    return match compare(*op, x, y) {
                        Some(true) => Itv::single(1),
                        Some(false) => Itv::single(0),
                        None => Itv::boolean(),
                    };
                }
                if op.is_logical() {
                    let tx = truth(x);
                    let ty_ = truth(y);
                    let r = match op {
                        BinOp::LogAnd => match (tx, ty_) {
                            (Some(false), _) | (_, Some(false)) => Some(false),
                            (Some(true), Some(true)) => Some(true),
                            _ => None,
                        },
                        _ => match (tx, ty_) {
                            (Some(true), _) | (_, Some(true)) => Some(true),
                            (Some(false), Some(false)) => Some(false),
                            _ => None,
                        },
                    };
                    return match r {
                        Some(b) => Itv::single(b as i128),
                        None => Itv::boolean(),
                    };
                }
                let Some(t) = ty else { return full() };
                let r = match op {
                    BinOp::Add => Itv { lo: x.lo + y.lo, hi: x.hi + y.hi },
                    BinOp::Sub => Itv { lo: x.lo - y.hi, hi: x.hi - y.lo },
                    BinOp::Mul => {
                        let ps = [x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi];
                        Itv { lo: *ps.iter().min().expect("4"), hi: *ps.iter().max().expect("4") }
                    }
                    BinOp::Div if x.lo >= 0 && y.lo > 0 => Itv { lo: x.lo / y.hi, hi: x.hi / y.lo },
                    BinOp::Rem if x.lo >= 0 && y.lo > 0 => Itv { lo: 0, hi: x.hi.min(y.hi - 1) },
                    BinOp::BitAnd if x.lo >= 0 && y.lo >= 0 => Itv { lo: 0, hi: x.hi.min(y.hi) },
                    BinOp::Shr if x.lo >= 0 && y.lo >= 0 => Itv { lo: 0, hi: x.hi },
                    _ => Itv::of(t),
                };
                r.clamp(t)
            }
        }
    }

    /// The variable `e` reads, if `e` has the variable's value.
    fn as_var(&self, e: &Expr, s: &State) -> Option<VarId> {
        match &e.kind {
            ExprKind::Var(v) => Some(*v),
            ExprKind::Cast(a) => {
                let t = e.ty.int()?;
                let v = self.as_var(a, s)?;
                s.itv[v.index()].fits(t).then_some(v)
            }
            _ => None,
        }
    }

    /// Restricts `s` to stores where `e` has truth value `truth`.
    fn refine(&self, e: &Expr, truth: bool, s: State) -> Option<State> {
        match &e.kind {
            ExprKind::Unary(UnOp::LogNot, a) => return self.refine(a, !truth, s),
            ExprKind::Binary(BinOp::LogAnd, a, b) if truth => {
                let s = self.refine(a, true, s)?;
                return self.refine(b, true, s);
            }
            ExprKind::Binary(BinOp::LogOr, a, b) if !truth => {
                let s = self.refine(a, false, s)?;
                return self.refine(b, false, s);
            }
            ExprKind::Binary(BinOp::LogAnd, a, b) => {
                let l = self.refine(a, false, s.clone());
                let r = self.refine(a, true, s).and_then(|s| self.refine(b, false, s));
                return self.join_opt(l, r);
            }
            ExprKind::Binary(BinOp::LogOr, a, b) => {
                let l = self.refine(a, true, s.clone());
                let r = self.refine(a, false, s).and_then(|s| self.refine(b, true, s));
                return self.join_opt(l, r);
            }
            ExprKind::Cast(a) if e.ty == Ty::Bool && a.ty != Ty::Bool => {
                let zero = Expr::new(ExprKind::Const(0), a.ty);
                let ne = Expr::binary(BinOp::Ne, (**a).clone(), zero);
                return self.refine(&ne, truth, s);
            }
            ExprKind::Binary(op, a, b) if op.is_comparison() => {
                let op = if truth { *op } else { negate(*op) };
                return self.refine_cmp(op, a, b, s);
            }
            _ => {}
        }
        match (truth, self.eval(e, &s)) {
            (true, x) if x == Itv::single(0) => None,
            (false, x) if x.lo > 0 || x.hi < 0 => None,
            _ => Some(s),
        }
    }

    fn join_opt(&self, a: Option<State>, b: Option<State>) -> Option<State> {
        match (a, b) {
            (Some(a), Some(b)) => Some(self.join(&a, &b, false)),
            (a, None) => a,
            (None, b) => b,
        }
    }

    fn refine_cmp(&self, op: BinOp, a: &Expr, b: &Expr, mut s: State) -> Option<State> {
        let x = self.eval(a, &s);
        let y = self.eval(b, &s);
        if compare(op, x, y) == Some(false) {
            return None;
        }
        let (nx, ny) = match op {
            BinOp::Lt => (x.meet(Itv { lo: x.lo, hi: y.hi - 1 })?, y.meet(Itv { lo: x.lo + 1, hi: y.hi })?),
            BinOp::Le => (x.meet(Itv { lo: x.lo, hi: y.hi })?, y.meet(Itv { lo: x.lo, hi: y.hi })?),
            BinOp::Gt => (x.meet(Itv { lo: y.lo + 1, hi: x.hi })?, y.meet(Itv { lo: y.lo, hi: x.hi - 1 })?),
            BinOp::Ge => (x.meet(Itv { lo: y.lo, hi: x.hi })?, y.meet(Itv { lo: y.lo, hi: x.hi })?),
            BinOp::Eq => {
                let m = x.meet(y)?;
                (m, m)
            }
            BinOp::Ne => (shave(x, y)?, shave(y, x)?),
            _ => (x, y),
        };
        if let Some(v) = self.as_var(a, &s) {
            s.itv[v.index()] = s.itv[v.index()].meet(nx)?;
        }
        if let Some(v) = self.as_var(b, &s) {
            s.itv[v.index()] = s.itv[v.index()].meet(ny)?;
        }
        Some(s)
    }

    /// `e` as `y + c` (modulo the width) for a variable `y` of the same width,
    /// or as a constant.
    fn affine(&self, e: &Expr) -> Option<(Option<VarId>, i128)> {
        let t = e.ty.int()?;
        match &e.kind {
            ExprKind::Const(c) => Some((None, t.to_i128(*c))),
            ExprKind::Var(v) => Some((Some(*v), 0)),
            ExprKind::Cast(a) if a.ty.int().is_some_and(|u| u.width == t.width) => self.affine(a),
            ExprKind::Binary(op @ (BinOp::Add | BinOp::Sub), a, b) => {
                let (va, ca) = self.affine(a)?;
                let (vb, cb) = self.affine(b)?;
                match (op, va, vb) {
                    (BinOp::Add, v, None) | (BinOp::Add, None, v) => Some((v, ca + cb)),
                    (BinOp::Sub, v, None) => Some((v, ca - cb)),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// `e` as `c - y` for a variable `y` of the same width.
    fn negated_affine(&self, e: &Expr) -> Option<(VarId, i128)> {
        match &e.kind {
            ExprKind::Binary(BinOp::Sub, a, b) => {
                let (None, c) = self.affine(a)? else { return None };
                let (Some(y), d) = self.affine(b)? else { return None };
                Some((y, c - d))
            }
            _ => None,
        }
    }

    fn assign(&self, x: VarId, e: &Expr, mut s: State) -> State {
        let ty = self.ty(x);
        let value = self.eval(e, &s).clamp(ty);
        let mut facts_diff = Vec::new();
        let mut facts_sum = Vec::new();
        match self.affine(e) {
            Some((Some(y), c)) if y == x => {
                // x := x + c shifts every fact on x
                for (&(a, b), &d) in &s.diff {
                    if a == x {
                        facts_diff.push((a, b, modv(d as i128 + c, ty)));
                    } else if b == x {
                        facts_diff.push((a, b, modv(d as i128 - c, ty)));
                    }
                }
                for (&(a, b), &d) in &s.sum {
                    if a == x || b == x {
                        facts_sum.push((a, b, modv(d as i128 + c, ty)));
                    }
                }
            }
            Some((Some(y), c)) if self.ty(y).width == ty.width && s.defined[y.index()] => {
                if self.ty(y) == ty {
                    facts_diff.push((x, y, modv(c, ty)));
                    for z in self.related(&s, y) {
                        if z == x || self.ty(z) != ty {
                            continue;
                        }
                        if let Some(d) = self.explicit_diff(&s, y, z) {
                            facts_diff.push((x, z, modv(c + d as i128, ty)));
                        }
                        if let Some(d) = self.explicit_sum(&s, y, z) {
                            facts_sum.push((x, z, modv(c + d as i128, ty)));
                        }
                    }
                }
            }
            _ => {
                if let Some((y, c)) = self.negated_affine(e) {
                    if y != x && self.ty(y) == ty && s.defined[y.index()] {
                        facts_sum.push((x, y, modv(c, ty)));
                    }
                }
            }
        }
        self.kill(&mut s, x);
        for (a, b, d) in facts_diff {
            self.set_diff(&mut s, a, b, d);
        }
        for (a, b, d) in facts_sum {
            self.set_sum(&mut s, a, b, d);
        }
        s.itv[x.index()] = value;
        s.defined[x.index()] = true;
        self.drop_constant_facts(&mut s);
        s
    }

    fn related(&self, s: &State, y: VarId) -> BTreeSet<VarId> {
        s.diff
            .keys()
            .chain(s.sum.keys())
            .filter_map(|&(a, b)| if a == y { Some(b) } else if b == y { Some(a) } else { None })
            .collect()
    }

    fn explicit_diff(&self, s: &State, a: VarId, b: VarId) -> Option<u64> {
        let ty = self.ty(a);
        if a < b {
            s.diff.get(&(a, b)).copied()
        } else {
            s.diff.get(&(b, a)).map(|d| modv(-(*d as i128), ty))
        }
    }

    fn explicit_sum(&self, s: &State, a: VarId, b: VarId) -> Option<u64> {
        s.sum.get(&if a < b { (a, b) } else { (b, a) }).copied()
    }

    /// Successor states of instruction `pc`.
    fn step(&self, pc: usize, s: &State) -> Vec<(usize, State)> {
        match &self.p.instrs[pc].instr {
            Instr::Assign { var, value, .. } => vec![(pc + 1, self.assign(*var, value, s.clone()))],
            Instr::Assume { cond, .. } | Instr::Assert { cond, .. } => {
                self.refine(cond, true, s.clone()).map(|s| (pc + 1, s)).into_iter().collect()
            }
            Instr::Goto { target } => vec![(*target, s.clone())],
            Instr::CondGoto { cond, target } => {
                let mut out = Vec::new();
                if let Some(t) = self.refine(cond, true, s.clone()) {
                    out.push((*target, t));
                }
                if let Some(f) = self.refine(cond, false, s.clone()) {
                    out.push((pc + 1, f));
                }
                out
            }
            Instr::Havoc { var } => {
                let mut s = s.clone();
                self.kill(&mut s, *var);
                s.itv[var.index()] = Itv::of(self.ty(*var));
                s.defined[var.index()] = true;
                vec![(pc + 1, s)]
            }
            Instr::Skip => vec![(pc + 1, s.clone())],
        }
    }

    /// Abstract states at every pc (`None` when unreachable).
    fn fixpoint(&self) -> Vec<Option<State>> {
        let n = self.p.instrs.len();
        let mut states: Vec<Option<State>> = vec![None; n];
        let mut changes = vec![0u32; n];
        let heads: BTreeSet<usize> = self.p.loops.iter().map(|l| l.head).collect();
        if n == 0 {
            return states;
        }
        states[0] = Some(self.initial());
        let mut work: BTreeSet<usize> = BTreeSet::from([0]);
        while let Some(pc) = work.pop_first() {
            let Some(s) = states[pc].clone() else { continue };
            for (to, out) in self.step(pc, &s) {
                if to >= n {
                    continue;
                }
                let new = match &states[to] {
                    None => out,
                    Some(old) => {
                        let widen = heads.contains(&to) && changes[to] >= WIDEN_AFTER;
                        self.join(old, &out, widen)
                    }
                };
                if states[to].as_ref() != Some(&new) {
                    changes[to] += 1;
                    states[to] = Some(new);
                    work.insert(to);
                }
            }
        }
        // descending iterations from the post-fixpoint
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for pc in 0..n {
            let ins = &self.p.instrs[pc].instr;
            if let Some(t) = ins.target() {
                preds[t].push(pc);
            }
            if !matches!(ins, Instr::Goto { .. }) && pc + 1 < n {
                preds[pc + 1].push(pc);
            }
        }
        for _ in 0..NARROWING_ROUNDS {
            for pc in 0..n {
                let mut acc: Option<State> = if pc == 0 { Some(self.initial()) } else { None };
                for &q in &preds[pc] {
                    let Some(s) = &states[q] else { continue };
                    for (to, out) in self.step(q, s) {
                        if to == pc {
                            acc = self.join_opt(acc, Some(out));
                        }
                    }
                }
                states[pc] = acc;
            }
        }
        states
    }
}

fn truth(x: Itv) -> Option<bool> {
    if x == Itv::single(0) {
        Some(false)
    } else if x.lo > 0 || x.hi < 0 {
        Some(true)
    } else {
        None
    }
}

fn negate(op: BinOp) -> BinOp {
    match op {
        BinOp::Lt => BinOp::Ge,
        BinOp::Le => BinOp::Gt,
        BinOp::Gt => BinOp::Le,
        BinOp::Ge => BinOp::Lt,
        BinOp::Eq => BinOp::Ne,
        BinOp::Ne => BinOp::Eq,
        o => o,
    }
}

/// Decides a comparison from intervals when possible.
fn compare(op: BinOp, x: Itv, y: Itv) -> Option<bool> {
    let (always, never) = match op {
        BinOp::Lt => (x.hi < y.lo, x.lo >= y.hi),
        BinOp::Le => (x.hi <= y.lo, x.lo > y.hi),
        BinOp::Gt => (x.lo > y.hi, x.hi <= y.lo),
        BinOp::Ge => (x.lo >= y.hi, x.hi < y.lo),
        BinOp::Eq => (x.constant().is_some() && x == y, x.meet(y).is_none()),
        BinOp::Ne => (x.meet(y).is_none(), x.constant().is_some() && x == y),
        _ => (false, false),
    };
    if always {
        Some(true)
    } else if never {
        Some(false)
    } else {
        None
    }
}

/// `x` without the single value of `y` when that value is one of its ends.
fn shave(x: Itv, y: Itv) -> Option<Itv> {
    match y.constant() {
        Some(c) if x.lo == c && x.hi == c => None,
        Some(c) if x.lo == c => Some(Itv { lo: c + 1, hi: x.hi }),
        Some(c) if x.hi == c => Some(Itv { lo: x.lo, hi: c - 1 }),
        _ => Some(x),
    }
}

/// Infers constraints at every loop head over the variables defined on all
/// paths reaching it.
pub fn infer_invariants(p: &GotoProgram) -> InvariantSet {
    let a = Analysis { p, types: p.vars.ids().map(|v| p.vars.ty(v)).collect(), thresholds: thresholds(p) };
    let states = a.fixpoint();
    let mut out = InvariantSet::default();
    for l in &p.loops {
        let Some(s) = &states[l.head] else {
            // unreachable loop: false is the strongest invariant, but an empty
            // list is always sound
            out.by_location.insert(l.head, Vec::new());
            continue;
        };
        let mut cs = Vec::new();
        for v in p.vars.ids() {
            if !s.defined[v.index()] {
                continue;
            }
            let name = p.vars.name(v);
            let t = a.ty(v);
            let i = s.itv[v.index()];
            if let Some(c) = i.constant() {
                cs.push(AffineConstraint::equals(name, c));
                continue;
            }
            if i.lo > t.min_value() || !t.signed {
                cs.push(AffineConstraint::lower(name, i.lo));
            }
            if i.hi < t.max_value() {
                cs.push(AffineConstraint::upper(name, i.hi));
            }
        }
        let signed_const = |d: u64, t: IntType| t.to_i128(d);
        for (&(x, y), &d) in &s.diff {
            if l.loop_vars.contains(&x) || l.loop_vars.contains(&y) {
                let t = a.ty(x);
                cs.push(AffineConstraint::new(
                    vec![(1, p.vars.name(x).into()), (-1, p.vars.name(y).into())],
                    Relation::Eq,
                    signed_const(d, t),
                ));
            }
        }
        for (&(x, y), &d) in &s.sum {
            if l.loop_vars.contains(&x) || l.loop_vars.contains(&y) {
                let t = a.ty(x);
                cs.push(AffineConstraint::new(
                    vec![(1, p.vars.name(x).into()), (1, p.vars.name(y).into())],
                    Relation::Eq,
                    signed_const(d, t),
                ));
            }
        }
        out.by_location.insert(l.head, cs);
    }
    out
}
