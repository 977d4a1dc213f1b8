//! Typed, side-effect free expressions shared by the typed AST and the GOTO IR.
//!
//! Every node carries its result type. Implicit C conversions have already been
//! materialized as [`ExprKind::Cast`] nodes by the type checker, so binary
//! operands always have identical types.

use std::collections::BTreeSet;
use std::fmt;

use crate::types::{mask, sign_extend, IntType, Ty};

/// Index of a variable in the enclosing variable table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    BitNot,
    LogNot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    LogAnd,
    LogOr,
}

impl BinOp {
    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::LogAnd | BinOp::LogOr)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::LogAnd => "&&",
            BinOp::LogOr => "||",
        }
    }

    /// Binding strength used by the printers (higher binds tighter).
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::LogOr => 1,
            BinOp::LogAnd => 2,
            BinOp::BitOr => 3,
            BinOp::BitXor => 4,
            BinOp::BitAnd => 5,
            BinOp::Eq | BinOp::Ne => 6,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 7,
            BinOp::Shl | BinOp::Shr => 8,
            BinOp::Add | BinOp::Sub => 9,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprKind {
    /// Raw bits, masked to the node's width (0/1 for booleans).
    Const(u64),
    Var(VarId),
    /// A fresh unconstrained value on every evaluation.
    Nondet,
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    /// Conversion of the operand to this node's type (wraparound).
    Cast(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr {
    pub kind: ExprKind,
    pub ty: Ty,
}

impl Expr {
    pub fn new(kind: ExprKind, ty: Ty) -> Self {
        Expr { kind, ty }
    }

    pub fn constant(value: i128, ty: IntType) -> Self {
        Expr::new(ExprKind::Const(ty.wrap(value)), Ty::Int(ty))
    }

    pub fn bool_const(b: bool) -> Self {
        Expr::new(ExprKind::Const(b as u64), Ty::Bool)
    }

    pub fn var(v: VarId, ty: IntType) -> Self {
        Expr::new(ExprKind::Var(v), Ty::Int(ty))
    }

    pub fn nondet(ty: IntType) -> Self {
        Expr::new(ExprKind::Nondet, Ty::Int(ty))
    }

    pub fn not(e: Expr) -> Self {
        debug_assert!(e.ty.is_bool());
        if let ExprKind::Unary(UnOp::LogNot, inner) = e.kind {
            return *inner;
        }
        if let ExprKind::Const(c) = e.kind {
            return Expr::bool_const(c == 0);
        }
        Expr::new(ExprKind::Unary(UnOp::LogNot, Box::new(e)), Ty::Bool)
    }

    /// Builds `lhs op rhs`; operand types must already agree.
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        let ty = if op.is_comparison() || op.is_logical() {
            Ty::Bool
        } else {
            lhs.ty
        };
        Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), ty)
    }

    pub fn and_all(parts: impl IntoIterator<Item = Expr>) -> Self {
        let mut it = parts.into_iter();
        match it.next() {
            None => Expr::bool_const(true),
            Some(first) => it.fold(first, |acc, e| Expr::binary(BinOp::LogAnd, acc, e)),
        }
    }

    pub fn or_all(parts: impl IntoIterator<Item = Expr>) -> Self {
        let mut it = parts.into_iter();
        match it.next() {
            None => Expr::bool_const(false),
            Some(first) => it.fold(first, |acc, e| Expr::binary(BinOp::LogOr, acc, e)),
        }
    }

    pub fn cast(e: Expr, ty: Ty) -> Self {
        if e.ty == ty {
            return e;
        }
        if let ExprKind::Const(bits) = e.kind {
            return Expr::new(ExprKind::Const(convert(bits, e.ty, ty)), ty);
        }
        Expr::new(ExprKind::Cast(Box::new(e)), ty)
    }

    pub fn as_const(&self) -> Option<u64> {
        match self.kind {
            ExprKind::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Const(_) | ExprKind::Var(_) | ExprKind::Nondet => vec![],
            ExprKind::Unary(_, a) | ExprKind::Cast(a) => vec![a],
            ExprKind::Binary(_, a, b) => vec![a, b],
            ExprKind::Ite(c, a, b) => vec![c, a, b],
        }
    }

    /// Variables read by this expression.
    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        if let ExprKind::Var(v) = self.kind {
            out.insert(v);
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    pub fn has_nondet(&self) -> bool {
        matches!(self.kind, ExprKind::Nondet) || self.children().iter().any(|c| c.has_nondet())
    }

    /// Rebuilds the expression with every variable renamed through `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(VarId) -> VarId) -> Expr {
        let kind = match &self.kind {
            ExprKind::Const(c) => ExprKind::Const(*c),
            ExprKind::Var(v) => ExprKind::Var(f(*v)),
            ExprKind::Nondet => ExprKind::Nondet,
            ExprKind::Unary(op, a) => ExprKind::Unary(*op, Box::new(a.map_vars(f))),
            ExprKind::Cast(a) => ExprKind::Cast(Box::new(a.map_vars(f))),
            ExprKind::Binary(op, a, b) => {
                ExprKind::Binary(*op, Box::new(a.map_vars(f)), Box::new(b.map_vars(f)))
            }
            ExprKind::Ite(c, a, b) => ExprKind::Ite(
                Box::new(c.map_vars(f)),
                Box::new(a.map_vars(f)),
                Box::new(b.map_vars(f)),
            ),
        };
        Expr::new(kind, self.ty)
    }

    /// Boolean view of an expression: comparisons stay as they are, integers
    /// are compared against zero.
    pub fn truthy(self) -> Expr {
        match self.ty {
            Ty::Bool => self,
            Ty::Int(t) => Expr::binary(BinOp::Ne, self, Expr::constant(0, t)),
        }
    }

    /// Prints the expression in C syntax using `names` for variables.
    pub fn display<'a>(&'a self, names: &'a dyn Fn(VarId) -> String) -> DisplayExpr<'a> {
        DisplayExpr { expr: self, names }
    }
}

/// Converts raw bits of type `from` to type `to` with C wraparound semantics.
pub fn convert(bits: u64, from: Ty, to: Ty) -> u64 {
    match (from, to) {
        (_, Ty::Bool) => (bits != 0) as u64,
        (Ty::Bool, Ty::Int(t)) => bits & t.mask(),
        (Ty::Int(f), Ty::Int(t)) => {
            let v = if f.signed {
                sign_extend(bits & f.mask(), f.width) as u64
            } else {
                bits & f.mask()
            };
            v & t.mask()
        }
    }
}

/// Evaluates a unary operator on raw bits.
pub fn apply_unop(op: UnOp, a: u64, ty: Ty) -> u64 {
    let m = mask(ty.width());
    match op {
        UnOp::Neg => a.wrapping_neg() & m,
        UnOp::BitNot => !a & m,
        UnOp::LogNot => (a == 0) as u64,
    }
}

/// Evaluates a binary operator on raw bits of operand type `ty`.
///
/// Division and remainder follow the SMT-LIB bit-vector definitions,
/// including division by zero. Shifts by at least the width saturate.
pub fn apply_binop(op: BinOp, a: u64, b: u64, ty: Ty) -> u64 {
    let w = ty.width();
    let m = mask(w);
    let signed = ty.int().map(|t| t.signed).unwrap_or(false);
    let (a, b) = (a & m, b & m);
    let sa = sign_extend(a, w);
    let sb = sign_extend(b, w);
    match op {
        BinOp::Add => a.wrapping_add(b) & m,
        BinOp::Sub => a.wrapping_sub(b) & m,
        BinOp::Mul => a.wrapping_mul(b) & m,
        BinOp::Div if signed => sdiv(a, b, w),
        BinOp::Div => udiv(a, b, w),
        BinOp::Rem if signed => srem(a, b, w),
        BinOp::Rem => urem(a, b),
        BinOp::BitAnd => a & b,
        BinOp::BitOr => a | b,
        BinOp::BitXor => a ^ b,
        BinOp::Shl => {
            if b >= w as u64 {
                0
            } else {
                (a << b) & m
            }
        }
        BinOp::Shr if signed => {
            let amount = b.min(w as u64 - 1) as u32;
            ((sa >> amount) as u64) & m
        }
        BinOp::Shr => {
            if b >= w as u64 {
                0
            } else {
                a >> b
            }
        }
        BinOp::Eq => (a == b) as u64,
        BinOp::Ne => (a != b) as u64,
        BinOp::Lt => (if signed { sa < sb } else { a < b }) as u64,
        BinOp::Le => (if signed { sa <= sb } else { a <= b }) as u64,
        BinOp::Gt => (if signed { sa > sb } else { a > b }) as u64,
        BinOp::Ge => (if signed { sa >= sb } else { a >= b }) as u64,
        BinOp::LogAnd => (a != 0 && b != 0) as u64,
        BinOp::LogOr => (a != 0 || b != 0) as u64,
    }
}

pub fn udiv(a: u64, b: u64, w: u32) -> u64 {
    if b == 0 {
        mask(w)
    } else {
        a / b
    }
}

pub fn urem(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        a % b
    }
}

fn msb(a: u64, w: u32) -> bool {
    (a >> (w - 1)) & 1 == 1
}

fn neg(a: u64, w: u32) -> u64 {
    a.wrapping_neg() & mask(w)
}

pub fn sdiv(a: u64, b: u64, w: u32) -> u64 {
    match (msb(a, w), msb(b, w)) {
        (false, false) => udiv(a, b, w),
        (true, false) => neg(udiv(neg(a, w), b, w), w),
        (false, true) => neg(udiv(a, neg(b, w), w), w),
        (true, true) => udiv(neg(a, w), neg(b, w), w),
    }
}

pub fn srem(a: u64, b: u64, w: u32) -> u64 {
    match (msb(a, w), msb(b, w)) {
        (false, false) => urem(a, b),
        (true, false) => neg(urem(neg(a, w), b), w),
        (false, true) => urem(a, neg(b, w)),
        (true, true) => neg(urem(neg(a, w), neg(b, w)), w),
    }
}

/// Source of variable values and nondeterministic choices during evaluation.
pub trait EvalEnv {
    fn var(&self, v: VarId) -> u64;
    /// Called for each evaluated `Nondet` node; `site` is the node's preorder
    /// index among the expression's nondet nodes.
    fn nondet(&mut self, site: usize, ty: IntType) -> u64;
}

/// Evaluates `e` lazily: untaken `?:` arms and short-circuited operands of
/// `&&`/`||` are not evaluated and draw no nondet values.
pub fn eval(e: &Expr, env: &mut dyn EvalEnv) -> u64 {
    let mut site = 0;
    eval_at(e, env, &mut site)
}

fn count_sites(e: &Expr) -> usize {
    match &e.kind {
        ExprKind::Nondet => 1,
        _ => e.children().iter().map(|c| count_sites(c)).sum(),
    }
}

fn eval_at(e: &Expr, env: &mut dyn EvalEnv, site: &mut usize) -> u64 {
    match &e.kind {
        ExprKind::Const(c) => *c,
        ExprKind::Var(v) => env.var(*v) & mask(e.ty.width()),
        ExprKind::Nondet => {
            let s = *site;
            *site += 1;
            let ty = e.ty.int().expect("nondet of integer type");
            env.nondet(s, ty) & ty.mask()
        }
        ExprKind::Unary(op, a) => {
            let v = eval_at(a, env, site);
            apply_unop(*op, v, a.ty)
        }
        ExprKind::Cast(a) => {
            let v = eval_at(a, env, site);
            convert(v, a.ty, e.ty)
        }
        ExprKind::Binary(BinOp::LogAnd, a, b) => {
            if eval_at(a, env, site) == 0 {
                *site += count_sites(b);
                0
            } else {
                (eval_at(b, env, site) != 0) as u64
            }
        }
        ExprKind::Binary(BinOp::LogOr, a, b) => {
            if eval_at(a, env, site) != 0 {
                *site += count_sites(b);
                1
            } else {
                (eval_at(b, env, site) != 0) as u64
            }
        }
        ExprKind::Binary(op, a, b) => {
            let x = eval_at(a, env, site);
            let y = eval_at(b, env, site);
            apply_binop(*op, x, y, a.ty)
        }
        ExprKind::Ite(c, a, b) => {
            if eval_at(c, env, site) != 0 {
                let v = eval_at(a, env, site);
                *site += count_sites(b);
                v
            } else {
                *site += count_sites(a);
                eval_at(b, env, site)
            }
        }
    }
}

pub struct DisplayExpr<'a> {
    expr: &'a Expr,
    names: &'a dyn Fn(VarId) -> String,
}

impl DisplayExpr<'_> {
    fn write(&self, e: &Expr, f: &mut fmt::Formatter<'_>, outer: u8) -> fmt::Result {
        match &e.kind {
            ExprKind::Const(c) => match e.ty {
                Ty::Bool => write!(f, "{}", c),
                Ty::Int(t) => {
                    let v = t.to_i128(*c);
                    if v < 0 {
                        write!(f, "({})", v)
                    } else if t.signed {
                        write!(f, "{}", v)
                    } else {
                        write!(f, "{}u", v)
                    }
                }
            },
            ExprKind::Var(v) => f.write_str(&(self.names)(*v)),
            ExprKind::Nondet => write!(f, "*"),
            ExprKind::Unary(op, a) => {
                let s = match op {
                    UnOp::Neg => "-",
                    UnOp::BitNot => "~",
                    UnOp::LogNot => "!",
                };
                f.write_str(s)?;
                self.write(a, f, 11)
            }
            ExprKind::Cast(a) => {
                write!(f, "({})", e.ty)?;
                self.write(a, f, 11)
            }
            ExprKind::Binary(op, a, b) => {
                let p = op.precedence();
                if p < outer {
                    f.write_str("(")?;
                }
                self.write(a, f, p)?;
                write!(f, " {} ", op.symbol())?;
                self.write(b, f, p + 1)?;
                if p < outer {
                    f.write_str(")")?;
                }
                Ok(())
            }
            ExprKind::Ite(c, a, b) => {
                if outer > 0 {
                    f.write_str("(")?;
                }
                self.write(c, f, 1)?;
                f.write_str(" ? ")?;
                self.write(a, f, 1)?;
                f.write_str(" : ")?;
                self.write(b, f, 1)?;
                if outer > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for DisplayExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct NoEnv;
    impl EvalEnv for NoEnv {
        fn var(&self, _: VarId) -> u64 {
            0
        }
        fn nondet(&mut self, _: usize, _: IntType) -> u64 {
            0
        }
    }

    #[test]
    fn signed_division_truncates_toward_zero() {
        let w = 8;
        let m7 = IntType::I8.wrap(-7);
        assert_eq!(IntType::I8.to_i128(sdiv(m7, 2, w)), -3);
        assert_eq!(IntType::I8.to_i128(srem(m7, 2, w)), -1);
        assert_eq!(IntType::I8.to_i128(srem(7, IntType::I8.wrap(-2), w)), 1);
        assert_eq!(udiv(5, 0, 8), 0xff);
        assert_eq!(urem(5, 0), 5);
    }

    #[test]
    fn casts_wrap() {
        let e = Expr::cast(Expr::constant(300, IntType::I32), Ty::Int(IntType::U8));
        assert_eq!(eval(&e, &mut NoEnv), 44);
        let e = Expr::cast(Expr::constant(-1, IntType::I8), Ty::Int(IntType::U32));
        assert_eq!(eval(&e, &mut NoEnv), 0xffff_ffff);
    }

    #[test]
    fn shifts_saturate() {
        let t = Ty::Int(IntType::U8);
        assert_eq!(apply_binop(BinOp::Shl, 1, 8, t), 0);
        assert_eq!(apply_binop(BinOp::Shr, 0x80, 9, t), 0);
        let s = Ty::Int(IntType::I8);
        assert_eq!(apply_binop(BinOp::Shr, 0x80, 20, s), 0xff);
    }
}
