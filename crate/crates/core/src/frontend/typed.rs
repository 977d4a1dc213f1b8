//! Typed program produced by the type checker.

use super::ast::{AssumeKind, Span};
use crate::expr::{Expr, VarId};
use crate::types::IntType;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarKind {
    Global,
    Local,
    Param,
    /// Return slot of an inlined call.
    Return,
    /// Pre-state shadow introduced by the inductive-step rewrite.
    Shadow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarInfo {
    /// Unique display name.
    pub name: String,
    /// Name as written in the source.
    pub source_name: String,
    pub ty: IntType,
    pub kind: VarKind,
    /// Owning function, `None` for globals.
    pub function: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VarTable {
    pub vars: Vec<VarInfo>,
}

impl VarTable {
    pub fn add(&mut self, mut info: VarInfo) -> VarId {
        if self.find(&info.name).is_some() {
            let base = info.name.clone();
            let mut n = 1;
            while self.find(&format!("{base}.{n}")).is_some() {
                n += 1;
            }
            info.name = format!("{base}.{n}");
        }
        self.vars.push(info);
        VarId(self.vars.len() as u32 - 1)
    }

    pub fn get(&self, v: VarId) -> &VarInfo {
        &self.vars[v.index()]
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.vars[v.index()].name
    }

    pub fn ty(&self, v: VarId) -> IntType {
        self.vars[v.index()].ty
    }

    pub fn find(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(|i| VarId(i as u32))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len() as u32).map(VarId)
    }

    /// Name lookup closure for expression printing.
    pub fn namer(&self) -> impl Fn(VarId) -> String + '_ {
        move |v| self.name(v).to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypedProgram {
    pub file: String,
    pub vars: VarTable,
    /// Globals in declaration order with their initial values.
    pub globals: Vec<(VarId, Expr)>,
    pub functions: Vec<TFunction>,
    /// Index of `main` in `functions`.
    pub entry: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TFunction {
    pub name: String,
    pub ret: Option<IntType>,
    pub params: Vec<VarId>,
    pub body: Vec<TStmt>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TStmt {
    pub kind: TStmtKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TStmtKind {
    /// `decl` marks the assignment that introduces a local.
    Assign { var: VarId, value: Expr, decl: bool },
    Call { target: Option<VarId>, func: usize, args: Vec<Expr> },
    If { cond: Expr, then: Vec<TStmt>, els: Vec<TStmt> },
    While { cond: Expr, body: Vec<TStmt> },
    DoWhile { body: Vec<TStmt>, cond: Expr },
    For { init: Vec<TStmt>, cond: Expr, step: Vec<TStmt>, body: Vec<TStmt> },
    Assert { cond: Expr },
    Assume { cond: Expr, kind: AssumeKind },
    Return { value: Option<Expr> },
    Break,
    Continue,
}

impl TStmt {
    pub fn new(kind: TStmtKind, span: Span) -> Self {
        TStmt { kind, span }
    }
}

impl TypedProgram {
    pub fn function(&self, name: &str) -> Option<&TFunction> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn entry_function(&self) -> &TFunction {
        &self.functions[self.entry]
    }
}
