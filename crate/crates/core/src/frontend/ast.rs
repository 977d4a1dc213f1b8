//! Untyped surface syntax produced by the parser.

use std::fmt;

use crate::expr::{BinOp, UnOp};
use crate::types::IntType;

/// Line/column of a node. Spans never participate in structural equality,
/// so two ASTs compare equal when they differ only in layout.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub file: String,
    pub globals: Vec<VarDecl>,
    pub functions: Vec<FunctionDef>,
    /// Names declared by prototypes without a definition.
    pub prototypes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    /// `None` for `void`.
    pub ret: Option<IntType>,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: IntType,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    /// Position of the opening brace.
    pub open: Span,
    /// Position of the closing brace.
    pub close: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub ty: IntType,
    pub init: Option<Init>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Init {
    Expr(AExpr),
    /// The `*` initializer: an arbitrary value.
    Nondet,
    /// `T x = f(args);`
    Call { name: String, args: Vec<AExpr> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssumeKind {
    /// `assume` / `__VERIFIER_assume` / `__CPROVER_assume`.
    Plain,
    /// `__ESBMC_assume`, as produced by the invariant translator.
    Esbmc,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Decl(Vec<VarDecl>),
    /// `target op= value`, with `op == None` for plain assignment.
    Assign { target: String, op: Option<BinOp>, value: AExpr, span: Span },
    /// `x++`, `x--`, `++x`, `--x` used as statements.
    Step { target: String, increment: bool, span: Span },
    /// A call whose result, if any, is stored in `target`.
    Call { target: Option<String>, name: String, args: Vec<AExpr>, span: Span },
    If { cond: AExpr, then: Box<Stmt>, els: Option<Box<Stmt>>, span: Span },
    While { cond: AExpr, body: Box<Stmt>, span: Span },
    DoWhile { body: Box<Stmt>, cond: AExpr, span: Span },
    For { init: Vec<Stmt>, cond: Option<AExpr>, step: Vec<Stmt>, body: Box<Stmt>, span: Span },
    Block(Block),
    Assert { cond: AExpr, span: Span },
    Assume { cond: AExpr, kind: AssumeKind, span: Span },
    /// `__VERIFIER_error()`: an unreachable-location property.
    Error { span: Span },
    Return { value: Option<AExpr>, span: Span },
    Break { span: Span },
    Continue { span: Span },
    Empty { span: Span },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Decl(ds) => ds.first().map(|d| d.span).unwrap_or_default(),
            Stmt::Block(b) => b.open,
            Stmt::Assign { span, .. }
            | Stmt::Step { span, .. }
            | Stmt::Call { span, .. }
            | Stmt::If { span, .. }
            | Stmt::While { span, .. }
            | Stmt::DoWhile { span, .. }
            | Stmt::For { span, .. }
            | Stmt::Assert { span, .. }
            | Stmt::Assume { span, .. }
            | Stmt::Error { span }
            | Stmt::Return { span, .. }
            | Stmt::Break { span }
            | Stmt::Continue { span }
            | Stmt::Empty { span } => *span,
        }
    }

    /// Visits this statement and every nested statement in source order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        match self {
            Stmt::If { then, els, .. } => {
                then.walk(f);
                if let Some(e) = els {
                    e.walk(f);
                }
            }
            Stmt::While { body, .. } | Stmt::DoWhile { body, .. } => body.walk(f),
            Stmt::For { init, step, body, .. } => {
                for s in init {
                    s.walk(f);
                }
                body.walk(f);
                for s in step {
                    s.walk(f);
                }
            }
            Stmt::Block(b) => {
                for s in &b.stmts {
                    s.walk(f);
                }
            }
            _ => {}
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NondetKind {
    Int(IntType),
    /// `__VERIFIER_nondet_bool()`: zero or one.
    Bool,
    /// The bare `*` operand; takes the type of its context.
    Star,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AExprKind {
    Int { value: u64, unsigned: bool },
    Var(String),
    Nondet(NondetKind),
    Unary(UnOp, Box<AExpr>),
    Binary(BinOp, Box<AExpr>, Box<AExpr>),
    Ternary(Box<AExpr>, Box<AExpr>, Box<AExpr>),
    Cast(IntType, Box<AExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AExpr {
    pub kind: AExprKind,
    pub span: Span,
}

impl AExpr {
    pub fn new(kind: AExprKind, span: Span) -> Self {
        AExpr { kind, span }
    }
}

/// A location whose condition must hold on every execution reaching it.
#[derive(Clone, Debug, PartialEq)]
pub struct SafetyProperty {
    pub function: String,
    pub span: Span,
    pub condition: Option<AExpr>,
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    fn all_stmts(&self) -> Vec<(&str, &Stmt)> {
        let mut out = Vec::new();
        for f in &self.functions {
            for s in &f.body.stmts {
                s.walk(&mut |st| out.push((f.name.as_str(), st)));
            }
        }
        out
    }

    /// Number of loop statements (`while`, `do`, `for`) in the source.
    pub fn loop_count(&self) -> usize {
        self.all_stmts()
            .iter()
            .filter(|(_, s)| matches!(s, Stmt::While { .. } | Stmt::DoWhile { .. } | Stmt::For { .. }))
            .count()
    }

    pub fn properties(&self) -> Vec<SafetyProperty> {
        self.all_stmts()
            .into_iter()
            .filter_map(|(func, s)| match s {
                Stmt::Assert { cond, span } => Some(SafetyProperty {
                    function: func.to_string(),
                    span: *span,
                    condition: Some(cond.clone()),
                }),
                Stmt::Error { span } => {
                    Some(SafetyProperty { function: func.to_string(), span: *span, condition: None })
                }
                _ => None,
            })
            .collect()
    }
}
