//! Bit-blasting of word-level formulas to CNF.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use thiserror::Error;

use crate::vcgen::{BvOp, Sort, SymId, Term, TermId, TermPool, VcFormula};

/// A propositional literal: variable index times two, plus one if negated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(pub u32);

impl Lit {
    pub fn new(var: u32, negated: bool) -> Lit {
        Lit(var << 1 | negated as u32)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// DIMACS form: 1-based, negative when negated.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn from_dimacs(x: i64) -> Lit {
        assert!(x != 0, "zero is not a literal");
        Lit::new((x.unsigned_abs() - 1) as u32, x < 0)
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

/// Variable 0 is constrained true by a unit clause.
pub const TRUE: Lit = Lit(0);
pub const FALSE: Lit = Lit(1);

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CnfInstance {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
    /// Bits of every symbol of the formula, least significant first.
    pub bit_map: BTreeMap<SymId, Vec<Lit>>,
}

impl CnfInstance {
    /// Builds an instance from raw clauses (no symbols).
    pub fn from_clauses(num_vars: u32, clauses: Vec<Vec<Lit>>) -> Self {
        CnfInstance { num_vars, clauses, bit_map: BTreeMap::new() }
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{} ", l.to_dimacs());
            }
            out.push_str("0\n");
        }
        out
    }

    /// Value of `lit` under a variable assignment.
    pub fn lit_value(lit: Lit, assignment: &[bool]) -> bool {
        assignment[lit.var() as usize] ^ lit.is_negated()
    }

    /// Decodes the value of every symbol.
    pub fn decode(&self, assignment: &[bool]) -> BTreeMap<SymId, u64> {
        self.bit_map
            .iter()
            .map(|(s, bits)| {
                let v = bits
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, &l)| acc | (Self::lit_value(l, assignment) as u64) << i);
                (*s, v)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BitblastError {
    #[error("bit-vector width {0} exceeds 64")]
    WidthTooLarge(u32),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Gate {
    And(Lit, Lit),
    Xor(Lit, Lit),
    Mux(Lit, Lit, Lit),
}

/// Tseitin gate builder with constant propagation and structural hashing.
#[derive(Default)]
pub struct GateBuilder {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
    cache: HashMap<Gate, Lit>,
}

impl GateBuilder {
    pub fn new() -> Self {
        GateBuilder { num_vars: 1, clauses: vec![vec![TRUE]], cache: HashMap::new() }
    }

    pub fn fresh(&mut self) -> Lit {
        self.num_vars += 1;
        Lit::new(self.num_vars - 1, false)
    }

    pub fn fresh_vec(&mut self, w: u32) -> Vec<Lit> {
        (0..w).map(|_| self.fresh()).collect()
    }

    pub fn clause(&mut self, c: Vec<Lit>) {
        if c.contains(&TRUE) {
            return;
        }
        let c: Vec<Lit> = c.into_iter().filter(|&l| l != FALSE).collect();
        self.clauses.push(c);
    }

    pub fn and2(&mut self, a: Lit, b: Lit) -> Lit {
        if a == FALSE || b == FALSE || a == !b {
            return FALSE;
        }
        if a == TRUE || a == b {
            return b;
        }
        if b == TRUE {
            return a;
        }
        let key = Gate::And(a.min(b), a.max(b));
        if let Some(&l) = self.cache.get(&key) {
            return l;
        }
        let v = self.fresh();
        self.clauses.push(vec![!v, a]);
        self.clauses.push(vec![!v, b]);
        self.clauses.push(vec![v, !a, !b]);
        self.cache.insert(key, v);
        v
    }

    pub fn or2(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and2(!a, !b)
    }

    pub fn and_all(&mut self, lits: &[Lit]) -> Lit {
        let mut ls: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            if l == FALSE {
                return FALSE;
            }
            if l != TRUE {
                ls.push(l);
            }
        }
        ls.sort();
        ls.dedup();
        if ls.windows(2).any(|w| w[0] == !w[1]) {
            return FALSE;
        }
        match ls.len() {
            0 => TRUE,
            1 => ls[0],
            2 => self.and2(ls[0], ls[1]),
            _ => {
                let v = self.fresh();
                let mut big = vec![v];
                for &l in &ls {
                    self.clauses.push(vec![!v, l]);
                    big.push(!l);
                }
                self.clauses.push(big);
                v
            }
        }
    }

    pub fn or_all(&mut self, lits: &[Lit]) -> Lit {
        let neg: Vec<Lit> = lits.iter().map(|&l| !l).collect();
        !self.and_all(&neg)
    }

    pub fn xor2(&mut self, a: Lit, b: Lit) -> Lit {
        if a == FALSE {
            return b;
        }
        if b == FALSE {
            return a;
        }
        if a == TRUE {
            return !b;
        }
        if b == TRUE {
            return !a;
        }
        if a == b {
            return FALSE;
        }
        if a == !b {
            return TRUE;
        }
        // normalize polarity so that xor(¬a, b) shares a gate with xor(a, b)
        let flip = a.is_negated() ^ b.is_negated();
        let (a, b) = (Lit(a.0 & !1), Lit(b.0 & !1));
        let key = Gate::Xor(a.min(b), a.max(b));
        let v = match self.cache.get(&key) {
            Some(&l) => l,
            None => {
                let v = self.fresh();
                self.clauses.push(vec![!v, a, b]);
                self.clauses.push(vec![!v, !a, !b]);
                self.clauses.push(vec![v, !a, b]);
                self.clauses.push(vec![v, a, !b]);
                self.cache.insert(key, v);
                v
            }
        };
        if flip {
            !v
        } else {
            v
        }
    }

    /// `c ? a : b`
    pub fn mux(&mut self, c: Lit, a: Lit, b: Lit) -> Lit {
        if c == TRUE || a == b {
            return a;
        }
        if c == FALSE {
            return b;
        }
        if c.is_negated() {
            return self.mux(!c, b, a);
        }
        if a == TRUE || a == c {
            return self.or2(c, b);
        }
        if a == FALSE || a == !c {
            return self.and2(!c, b);
        }
        if b == TRUE || b == !c {
            return self.or2(!c, a);
        }
        if b == FALSE || b == c {
            return self.and2(c, a);
        }
        if a == !b {
            return !self.xor2(c, a);
        }
        let key = Gate::Mux(c, a, b);
        if let Some(&l) = self.cache.get(&key) {
            return l;
        }
        let v = self.fresh();
        self.clauses.push(vec![!c, !a, v]);
        self.clauses.push(vec![!c, a, !v]);
        self.clauses.push(vec![c, !b, v]);
        self.clauses.push(vec![c, b, !v]);
        self.clauses.push(vec![!a, !b, v]);
        self.clauses.push(vec![a, b, !v]);
        self.cache.insert(key, v);
        v
    }

    pub fn mux_vec(&mut self, c: Lit, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        a.iter().zip(b).map(|(&x, &y)| self.mux(c, x, y)).collect()
    }

    fn full_add(&mut self, a: Lit, b: Lit, cin: Lit) -> (Lit, Lit) {
        let t = self.xor2(a, b);
        let sum = self.xor2(t, cin);
        let c1 = self.and2(a, b);
        let c2 = self.and2(t, cin);
        let cout = self.or2(c1, c2);
        (sum, cout)
    }

    /// Ripple-carry sum, truncated to the operand width.
    pub fn add(&mut self, a: &[Lit], b: &[Lit], carry_in: Lit) -> Vec<Lit> {
        let mut carry = carry_in;
        let mut out = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let (s, c) = self.full_add(x, y, carry);
            out.push(s);
            carry = c;
        }
        out
    }

    pub fn sub(&mut self, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let nb: Vec<Lit> = b.iter().map(|&l| !l).collect();
        self.add(a, &nb, TRUE)
    }

    pub fn neg(&mut self, a: &[Lit]) -> Vec<Lit> {
        let zero = vec![FALSE; a.len()];
        self.sub(&zero, a)
    }

    /// Shift-and-add product, truncated to the operand width.
    pub fn mul(&mut self, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let w = a.len();
        let mut acc = vec![FALSE; w];
        for (i, &bi) in b.iter().enumerate() {
            if bi == FALSE {
                continue;
            }
            let mut partial = vec![FALSE; w];
            for j in 0..w - i {
                partial[i + j] = self.and2(a[j], bi);
            }
            acc = self.add(&acc, &partial, FALSE);
        }
        acc
    }

    pub fn eq(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let bits: Vec<Lit> = a.iter().zip(b).map(|(&x, &y)| !self.xor2(x, y)).collect();
        self.and_all(&bits)
    }

    /// Unsigned `a < b` (or `a <= b` when `or_equal`), scanning from the
    /// least significant bit.
    pub fn ult(&mut self, a: &[Lit], b: &[Lit], or_equal: bool) -> Lit {
        let mut lt = if or_equal { TRUE } else { FALSE };
        for (&x, &y) in a.iter().zip(b) {
            let d = self.xor2(x, y);
            lt = self.mux(d, y, lt);
        }
        lt
    }

    pub fn slt(&mut self, a: &[Lit], b: &[Lit], or_equal: bool) -> Lit {
        let flip = |v: &[Lit]| {
            let mut v = v.to_vec();
            if let Some(last) = v.last_mut() {
                *last = !*last;
            }
            v
        };
        self.ult(&flip(a), &flip(b), or_equal)
    }

    /// Unsigned quotient and remainder with the SMT-LIB convention for a
    /// zero divisor.
    pub fn udivrem(&mut self, a: &[Lit], b: &[Lit]) -> (Vec<Lit>, Vec<Lit>) {
        let w = a.len();
        let q = self.fresh_vec(w as u32);
        let r = self.fresh_vec(w as u32);
        let zero = vec![FALSE; w];
        let bz = self.eq(b, &zero);
        // a = q*b + r with r < b, computed without overflow at double width
        let ext = |v: &[Lit]| {
            let mut v = v.to_vec();
            v.resize(2 * w, FALSE);
            v
        };
        let prod = self.mul(&ext(&q), &ext(b));
        let sum = self.add(&prod, &ext(&r), FALSE);
        let same = self.eq(&sum, &ext(a));
        let less = self.ult(&r, b, false);
        self.clause(vec![bz, same]);
        self.clause(vec![bz, less]);
        let ones = vec![TRUE; w];
        let q = self.mux_vec(bz, &ones, &q);
        let r = self.mux_vec(bz, a, &r);
        (q, r)
    }

    pub fn sdivrem(&mut self, a: &[Lit], b: &[Lit]) -> (Vec<Lit>, Vec<Lit>) {
        let sa = *a.last().expect("nonzero width");
        let sb = *b.last().expect("nonzero width");
        let na = self.neg(a);
        let nb = self.neg(b);
        let ua = self.mux_vec(sa, &na, a);
        let ub = self.mux_vec(sb, &nb, b);
        let (uq, ur) = self.udivrem(&ua, &ub);
        let nq = self.neg(&uq);
        let nr = self.neg(&ur);
        let qs = self.xor2(sa, sb);
        let q = self.mux_vec(qs, &nq, &uq);
        let r = self.mux_vec(sa, &nr, &ur);
        (q, r)
    }

    /// Barrel shifter; `kind` is 0 for left, 1 for logical right, 2 for
    /// arithmetic right.
    pub fn shift(&mut self, a: &[Lit], b: &[Lit], kind: u8) -> Vec<Lit> {
        let w = a.len();
        let fill = if kind == 2 { *a.last().expect("nonzero width") } else { FALSE };
        let mut cur = a.to_vec();
        let mut overflow = Vec::new();
        for (j, &bit) in b.iter().enumerate() {
            let amount = 1u64.checked_shl(j as u32).unwrap_or(u64::MAX);
            if amount >= w as u64 {
                overflow.push(bit);
                continue;
            }
            let amount = amount as usize;
            let shifted: Vec<Lit> = (0..w)
                .map(|i| match kind {
                    0 => {
                        if i >= amount {
                            cur[i - amount]
                        } else {
                            FALSE
                        }
                    }
                    _ => {
                        if i + amount < w {
                            cur[i + amount]
                        } else {
                            fill
                        }
                    }
                })
                .collect();
            cur = self.mux_vec(bit, &shifted, &cur);
        }
        let over = self.or_all(&overflow);
        let filled = vec![fill; w];
        self.mux_vec(over, &filled, &cur)
    }
}

/// Bit-blasts the query of `f`.
pub fn bitblast(f: &VcFormula) -> Result<CnfInstance, BitblastError> {
    bitblast_term(&f.pool, f.query)
}

/// Bit-blasts `root` and every symbol of the pool; `root` is asserted.
pub fn bitblast_term(pool: &TermPool, root: TermId) -> Result<CnfInstance, BitblastError> {
    let mut b = Blaster { pool, g: GateBuilder::new(), bits: HashMap::new(), sym_bits: BTreeMap::new() };
    let mut roots = vec![root];
    for i in 0..pool.symbols.len() {
        let s = SymId(i as u32);
        let w = pool.symbol(s).sort.width();
        if w > 64 {
            return Err(BitblastError::WidthTooLarge(w));
        }
        if let Some(&d) = pool.defs.get(&s) {
            roots.push(d);
        }
    }
    b.blast(&roots)?;
    let r = b.bits[&root][0];
    b.g.clause(vec![r]);
    for i in 0..pool.symbols.len() {
        let s = SymId(i as u32);
        let bits = match pool.defs.get(&s) {
            Some(d) => b.bits[d].clone(),
            None => b.free_bits(s),
        };
        b.sym_bits.insert(s, bits);
    }
    Ok(CnfInstance { num_vars: b.g.num_vars, clauses: b.g.clauses, bit_map: b.sym_bits })
}

struct Blaster<'a> {
    pool: &'a TermPool,
    g: GateBuilder,
    bits: HashMap<TermId, Vec<Lit>>,
    sym_bits: BTreeMap<SymId, Vec<Lit>>,
}

impl Blaster<'_> {
    fn free_bits(&mut self, s: SymId) -> Vec<Lit> {
        if let Some(v) = self.sym_bits.get(&s) {
            return v.clone();
        }
        let w = self.pool.symbol(s).sort.width();
        let v = self.g.fresh_vec(w);
        self.sym_bits.insert(s, v.clone());
        v
    }

    fn blast(&mut self, roots: &[TermId]) -> Result<(), BitblastError> {
        // children and symbol definitions always have smaller ids, so
        // increasing id order is a topological order
        let mut reach = vec![false; self.pool.len()];
        let mut stack: Vec<TermId> = roots.to_vec();
        while let Some(t) = stack.pop() {
            if reach[t.0 as usize] {
                continue;
            }
            reach[t.0 as usize] = true;
            stack.extend(self.pool.children(t));
            if let Term::Sym(s) = self.pool.get(t) {
                if let Some(&d) = self.pool.defs.get(s) {
                    stack.push(d);
                }
            }
        }
        for i in 0..reach.len() {
            if reach[i] {
                let t = TermId(i as u32);
                let v = self.term(t)?;
                self.bits.insert(t, v);
            }
        }
        Ok(())
    }

    fn term(&mut self, t: TermId) -> Result<Vec<Lit>, BitblastError> {
        let w = self.pool.sort(t).width();
        if w > 64 {
            return Err(BitblastError::WidthTooLarge(w));
        }
        let get = |b: &Self, x: &TermId| b.bits[x].clone();
        let g = |b: &Self, x: &TermId| b.bits[x][0];
        let out = match self.pool.get(t) {
            Term::BoolConst(v) => vec![if *v { TRUE } else { FALSE }],
            Term::BvConst { value, width } => {
                (0..*width).map(|i| if value >> i & 1 == 1 { TRUE } else { FALSE }).collect()
            }
            Term::Sym(s) => match self.pool.defs.get(s) {
                Some(d) => get(self, d),
                None => self.free_bits(*s),
            },
            Term::Not(a) => vec![!g(self, a)],
            Term::And(v) => {
                let ls: Vec<Lit> = v.iter().map(|x| g(self, x)).collect();
                vec![self.g.and_all(&ls)]
            }
            Term::Or(v) => {
                let ls: Vec<Lit> = v.iter().map(|x| g(self, x)).collect();
                vec![self.g.or_all(&ls)]
            }
            Term::Ite(c, a, b) => {
                let c = g(self, c);
                let (a, b) = (get(self, a), get(self, b));
                self.g.mux_vec(c, &a, &b)
            }
            Term::Eq(a, b) => {
                let (a, b) = (get(self, a), get(self, b));
                vec![self.g.eq(&a, &b)]
            }
            Term::Ult(a, b) | Term::Ule(a, b) => {
                let strict = matches!(self.pool.get(t), Term::Ult(..));
                let (a, b) = (get(self, a), get(self, b));
                vec![self.g.ult(&a, &b, !strict)]
            }
            Term::Slt(a, b) | Term::Sle(a, b) => {
                let strict = matches!(self.pool.get(t), Term::Slt(..));
                let (a, b) = (get(self, a), get(self, b));
                vec![self.g.slt(&a, &b, !strict)]
            }
            Term::BvNeg(a) => {
                let a = get(self, a);
                self.g.neg(&a)
            }
            Term::BvNot(a) => get(self, a).into_iter().map(|l| !l).collect(),
            Term::Bin(op, a, b) => {
                let (a, b) = (get(self, a), get(self, b));
                let gb = &mut self.g;
                match op {
                    BvOp::Add => gb.add(&a, &b, FALSE),
                    BvOp::Sub => gb.sub(&a, &b),
                    BvOp::Mul => gb.mul(&a, &b),
                    BvOp::UDiv => gb.udivrem(&a, &b).0,
                    BvOp::URem => gb.udivrem(&a, &b).1,
                    BvOp::SDiv => gb.sdivrem(&a, &b).0,
                    BvOp::SRem => gb.sdivrem(&a, &b).1,
                    BvOp::And => a.iter().zip(&b).map(|(&x, &y)| gb.and2(x, y)).collect(),
                    BvOp::Or => a.iter().zip(&b).map(|(&x, &y)| gb.or2(x, y)).collect(),
                    BvOp::Xor => a.iter().zip(&b).map(|(&x, &y)| gb.xor2(x, y)).collect(),
                    BvOp::Shl => gb.shift(&a, &b, 0),
                    BvOp::LShr => gb.shift(&a, &b, 1),
                    BvOp::AShr => gb.shift(&a, &b, 2),
                }
            }
            Term::ZExt(a, to) => {
                let mut v = get(self, a);
                v.resize(*to as usize, FALSE);
                v
            }
            Term::SExt(a, to) => {
                let mut v = get(self, a);
                let s = *v.last().expect("nonzero width");
                v.resize(*to as usize, s);
                v
            }
            Term::Extract(a, to) => {
                let mut v = get(self, a);
                v.truncate(*to as usize);
                v
            }
            Term::BoolToBv(a, w) => {
                let mut v = vec![g(self, a)];
                v.resize(*w as usize, FALSE);
                v
            }
        };
        debug_assert_eq!(out.len() as u32, w, "width mismatch for {:?}", self.pool.get(t));
        debug_assert!(self.pool.sort(t) != Sort::Bool || out.len() == 1);
        Ok(out)
    }
}
