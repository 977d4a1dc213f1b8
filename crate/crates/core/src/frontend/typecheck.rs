//! Name resolution, type annotation, and implicit-conversion insertion.

use std::collections::HashMap;

use super::ast::*;
use super::error::FrontendError;
use super::typed::*;
use crate::expr::{BinOp, Expr, ExprKind, UnOp};
use crate::types::{IntType, Ty};

type TResult<T> = Result<T, FrontendError>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TypeOptions {
    /// Forces every integer type, literals included, to this width.
    pub width_override: Option<u32>,
}

/// Usual arithmetic conversion: the larger width wins and mixed signedness
/// yields the unsigned type of that width.
pub fn common_type(a: IntType, b: IntType) -> IntType {
    IntType::new(a.width.max(b.width), a.signed && b.signed)
}

pub fn typecheck(p: &Program, opts: TypeOptions) -> TResult<TypedProgram> {
    let file = p.file.clone();
    check(p, opts).map_err(|e| e.in_file(&file))
}

fn check(p: &Program, opts: TypeOptions) -> TResult<TypedProgram> {
    let mut cx = Checker {
        opts,
        vars: VarTable::default(),
        scopes: vec![HashMap::new()],
        sigs: HashMap::new(),
        prototypes: p.prototypes.clone(),
        loop_depth: 0,
        current_ret: None,
        current_fn: None,
    };
    for (i, f) in p.functions.iter().enumerate() {
        let params: Vec<IntType> = f.params.iter().map(|pa| cx.ty(pa.ty)).collect();
        cx.sigs.insert(f.name.clone(), (i, f.ret.map(|t| cx.ty(t)), params));
    }
    let entry = p
        .functions
        .iter()
        .position(|f| f.name == "main")
        .ok_or_else(|| FrontendError::semantic(Span::new(1, 1), "no entry function `main`"))?;
    check_recursion(p)?;

    let mut globals = Vec::new();
    for d in &p.globals {
        let ty = cx.ty(d.ty);
        let value = match &d.init {
            None => Expr::constant(0, ty),
            Some(Init::Nondet) => Expr::nondet(ty),
            Some(Init::Expr(e)) => cx.rvalue(e, ty)?,
            Some(Init::Call { .. }) => {
                return Err(FrontendError::unsupported(d.span, "function call in global initializer"))
            }
        };
        if cx.scopes[0].contains_key(&d.name) {
            return Err(FrontendError::semantic(d.span, format!("redeclaration of `{}`", d.name)));
        }
        let id = cx.vars.add(VarInfo {
            name: d.name.clone(),
            source_name: d.name.clone(),
            ty,
            kind: VarKind::Global,
            function: None,
        });
        cx.scopes[0].insert(d.name.clone(), id);
        globals.push((id, value));
    }

    let mut functions = Vec::new();
    for f in &p.functions {
        cx.scopes.push(HashMap::new());
        cx.current_ret = f.ret.map(|t| cx.ty(t));
        cx.current_fn = Some(f.name.clone());
        let mut params = Vec::new();
        for pa in &f.params {
            if pa.name.is_empty() {
                return Err(FrontendError::syntax(pa.span, "unnamed parameter in definition"));
            }
            let id = cx.declare(&pa.name, pa.ty, VarKind::Param, pa.span)?;
            params.push(id);
        }
        let body = cx.block(&f.body.stmts)?;
        cx.scopes.pop();
        functions.push(TFunction {
            name: f.name.clone(),
            ret: cx.current_ret,
            params,
            body,
            span: f.span,
        });
    }
    Ok(TypedProgram { file: p.file.clone(), vars: cx.vars, globals, functions, entry })
}

fn check_recursion(p: &Program) -> TResult<()> {
    let index: HashMap<&str, usize> =
        p.functions.iter().enumerate().map(|(i, f)| (f.name.as_str(), i)).collect();
    let mut edges: Vec<Vec<(usize, Span)>> = vec![Vec::new(); p.functions.len()];
    for (i, f) in p.functions.iter().enumerate() {
        for s in &f.body.stmts {
            s.walk(&mut |st| {
                let callee = match st {
                    Stmt::Call { name, span, .. } => Some((name, *span)),
                    Stmt::Decl(ds) => ds.iter().find_map(|d| match &d.init {
                        Some(Init::Call { name, .. }) => Some((name, d.span)),
                        _ => None,
                    }),
                    _ => None,
                };
                if let Some((name, span)) = callee {
                    if let Some(&j) = index.get(name.as_str()) {
                        edges[i].push((j, span));
                    }
                }
            });
        }
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    fn dfs(n: usize, edges: &[Vec<(usize, Span)>], state: &mut [u8]) -> Option<Span> {
        state[n] = 1;
        for &(m, span) in &edges[n] {
            if state[m] == 1 {
                return Some(span);
            }
            if state[m] == 0 {
                if let Some(s) = dfs(m, edges, state) {
                    return Some(s);
                }
            }
        }
        state[n] = 2;
        None
    }
    let mut state = vec![0u8; p.functions.len()];
    for n in 0..p.functions.len() {
        if state[n] == 0 {
            if let Some(span) = dfs(n, &edges, &mut state) {
                return Err(FrontendError::unsupported(span, "recursion"));
            }
        }
    }
    Ok(())
}

struct Checker {
    opts: TypeOptions,
    vars: VarTable,
    scopes: Vec<HashMap<String, crate::expr::VarId>>,
    sigs: HashMap<String, (usize, Option<IntType>, Vec<IntType>)>,
    prototypes: Vec<String>,
    loop_depth: usize,
    current_ret: Option<IntType>,
    current_fn: Option<String>,
}

impl Checker {
    fn ty(&self, t: IntType) -> IntType {
        match self.opts.width_override {
            Some(w) => IntType::new(w, t.signed),
            None => t,
        }
    }

    fn default_int(&self) -> IntType {
        self.ty(IntType::I32)
    }

    fn declare(&mut self, name: &str, ty: IntType, kind: VarKind, span: Span) -> TResult<crate::expr::VarId> {
        let scope = self.scopes.last().expect("scope");
        if scope.contains_key(name) {
            return Err(FrontendError::semantic(span, format!("redeclaration of `{name}`")));
        }
        let id = self.vars.add(VarInfo {
            name: name.to_string(),
            source_name: name.to_string(),
            ty: self.ty(ty),
            kind,
            function: self.current_fn.clone(),
        });
        self.scopes.last_mut().expect("scope").insert(name.to_string(), id);
        Ok(id)
    }

    fn lookup(&self, name: &str, span: Span) -> TResult<crate::expr::VarId> {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name).copied())
            .ok_or_else(|| FrontendError::UndeclaredVariable { loc: span.into(), name: name.to_string() })
    }

    fn block(&mut self, stmts: &[Stmt]) -> TResult<Vec<TStmt>> {
        self.scopes.push(HashMap::new());
        let mut out = Vec::new();
        for s in stmts {
            self.stmt(s, &mut out)?;
        }
        self.scopes.pop();
        Ok(out)
    }

    /// Checks a statement that forms its own scope (a branch or loop body).
    fn body(&mut self, s: &Stmt) -> TResult<Vec<TStmt>> {
        match s {
            Stmt::Block(b) => self.block(&b.stmts),
            other => self.block(std::slice::from_ref(other)),
        }
    }

    fn cond(&mut self, e: &AExpr) -> TResult<Expr> {
        Ok(self.expr(e, None)?.truthy())
    }

    fn stmt(&mut self, s: &Stmt, out: &mut Vec<TStmt>) -> TResult<()> {
        let span = s.span();
        match s {
            Stmt::Decl(ds) => {
                for d in ds {
                    let ty = self.ty(d.ty);
                    // the initializer is checked before the name comes into scope
                    let init = match &d.init {
                        None | Some(Init::Nondet) => Some(Expr::nondet(ty)),
                        Some(Init::Expr(e)) => Some(self.rvalue(e, ty)?),
                        Some(Init::Call { .. }) => None,
                    };
                    let id = self.declare(&d.name, d.ty, VarKind::Local, d.span)?;
                    match (init, &d.init) {
                        (Some(value), _) => out.push(TStmt::new(
                            TStmtKind::Assign { var: id, value, decl: true },
                            d.span,
                        )),
                        (None, Some(Init::Call { name, args })) => {
                            out.push(TStmt::new(
                                TStmtKind::Assign { var: id, value: Expr::nondet(ty), decl: true },
                                d.span,
                            ));
                            out.push(self.call(Some(id), name, args, d.span)?);
                        }
                        _ => unreachable!(),
                    }
                }
            }
            Stmt::Assign { target, op, value, span } => {
                let var = self.lookup(target, *span)?;
                let ty = self.vars.ty(var);
                let value = match op {
                    None => self.rvalue(value, ty)?,
                    Some(op) => {
                        let cur = Expr::var(var, ty);
                        let rhs = self.expr(value, Some(ty))?;
                        let combined = self.binary(*op, cur, rhs, *span)?;
                        Expr::cast(combined, Ty::Int(ty))
                    }
                };
                out.push(TStmt::new(TStmtKind::Assign { var, value, decl: false }, *span));
            }
            Stmt::Step { target, increment, span } => {
                let var = self.lookup(target, *span)?;
                let ty = self.vars.ty(var);
                let op = if *increment { BinOp::Add } else { BinOp::Sub };
                let value = Expr::binary(op, Expr::var(var, ty), Expr::constant(1, ty));
                out.push(TStmt::new(TStmtKind::Assign { var, value, decl: false }, *span));
            }
            Stmt::Call { target, name, args, span } => {
                let target = match target {
                    Some(t) => Some(self.lookup(t, *span)?),
                    None => None,
                };
                out.push(self.call(target, name, args, *span)?);
            }
            Stmt::If { cond, then, els, .. } => {
                let cond = self.cond(cond)?;
                let then = self.body(then)?;
                let els = match els {
                    Some(e) => self.body(e)?,
                    None => Vec::new(),
                };
                out.push(TStmt::new(TStmtKind::If { cond, then, els }, span));
            }
            Stmt::While { cond, body, .. } => {
                let cond = self.cond(cond)?;
                self.loop_depth += 1;
                let body = self.body(body)?;
                self.loop_depth -= 1;
                out.push(TStmt::new(TStmtKind::While { cond, body }, span));
            }
            Stmt::DoWhile { body, cond, .. } => {
                self.loop_depth += 1;
                let body = self.body(body)?;
                self.loop_depth -= 1;
                let cond = self.cond(cond)?;
                out.push(TStmt::new(TStmtKind::DoWhile { body, cond }, span));
            }
            Stmt::For { init, cond, step, body, .. } => {
                self.scopes.push(HashMap::new());
                let mut tinit = Vec::new();
                for s in init {
                    self.stmt(s, &mut tinit)?;
                }
                let cond = match cond {
                    Some(c) => self.cond(c)?,
                    None => Expr::bool_const(true),
                };
                self.loop_depth += 1;
                let tbody = self.body(body)?;
                self.loop_depth -= 1;
                let mut tstep = Vec::new();
                for s in step {
                    self.stmt(s, &mut tstep)?;
                }
                self.scopes.pop();
                out.push(TStmt::new(
                    TStmtKind::For { init: tinit, cond, step: tstep, body: tbody },
                    span,
                ));
            }
            Stmt::Block(b) => {
                let inner = self.block(&b.stmts)?;
                out.extend(inner);
            }
            Stmt::Assert { cond, .. } => {
                let cond = self.cond(cond)?;
                out.push(TStmt::new(TStmtKind::Assert { cond }, span));
            }
            Stmt::Assume { cond, kind, .. } => {
                let cond = self.cond(cond)?;
                out.push(TStmt::new(TStmtKind::Assume { cond, kind: *kind }, span));
            }
            Stmt::Error { .. } => {
                out.push(TStmt::new(TStmtKind::Assert { cond: Expr::bool_const(false) }, span));
            }
            Stmt::Return { value, .. } => {
                let value = match (value, self.current_ret) {
                    (Some(v), Some(t)) => Some(self.rvalue(v, t)?),
                    (None, None) => None,
                    // `return;` in an int function and `return e;` in main are tolerated
                    (None, Some(_)) => None,
                    (Some(v), None) => {
                        self.expr(v, None)?;
                        None
                    }
                };
                out.push(TStmt::new(TStmtKind::Return { value }, span));
            }
            Stmt::Break { .. } | Stmt::Continue { .. } => {
                if self.loop_depth == 0 {
                    let what = if matches!(s, Stmt::Break { .. }) { "break" } else { "continue" };
                    return Err(FrontendError::semantic(span, format!("`{what}` outside of a loop")));
                }
                let kind = if matches!(s, Stmt::Break { .. }) { TStmtKind::Break } else { TStmtKind::Continue };
                out.push(TStmt::new(kind, span));
            }
            Stmt::Empty { .. } => {}
        }
        Ok(())
    }

    fn call(
        &mut self,
        target: Option<crate::expr::VarId>,
        name: &str,
        args: &[AExpr],
        span: Span,
    ) -> TResult<TStmt> {
        let Some((func, ret, params)) = self.sigs.get(name).cloned() else {
            if self.prototypes.iter().any(|p| p == name) || is_library_function(name) {
                return Err(FrontendError::unsupported(span, "external function call"));
            }
            return Err(FrontendError::UndeclaredFunction { loc: span.into(), name: name.to_string() });
        };
        if params.len() != args.len() {
            return Err(FrontendError::semantic(
                span,
                format!("`{name}` expects {} arguments, got {}", params.len(), args.len()),
            ));
        }
        if target.is_some() && ret.is_none() {
            return Err(FrontendError::TypeMismatch {
                loc: span.into(),
                expected: "a value".into(),
                found: format!("void result of `{name}`"),
            });
        }
        let args = args
            .iter()
            .zip(&params)
            .map(|(a, t)| self.rvalue(a, *t))
            .collect::<TResult<Vec<_>>>()?;
        Ok(TStmt::new(TStmtKind::Call { target, func, args }, span))
    }

    /// Checks `e` and converts it to `ty`.
    fn rvalue(&mut self, e: &AExpr, ty: IntType) -> TResult<Expr> {
        let v = self.expr(e, Some(ty))?;
        Ok(Expr::cast(v, Ty::Int(ty)))
    }

    fn to_int(&self, e: Expr) -> Expr {
        match e.ty {
            Ty::Bool => Expr::cast(e, Ty::Int(self.default_int())),
            Ty::Int(_) => e,
        }
    }

    /// `hint` types a bare `*` operand.
    fn expr(&mut self, e: &AExpr, hint: Option<IntType>) -> TResult<Expr> {
        let span = e.span;
        Ok(match &e.kind {
            AExprKind::Int { value, unsigned } => {
                let ty = self.ty(IntType::new(32, !*unsigned));
                Expr::new(ExprKind::Const(*value & ty.mask()), Ty::Int(ty))
            }
            AExprKind::Var(name) => {
                let v = self.lookup(name, span)?;
                Expr::var(v, self.vars.ty(v))
            }
            AExprKind::Nondet(kind) => match kind {
                NondetKind::Int(t) => Expr::nondet(self.ty(*t)),
                NondetKind::Star => Expr::nondet(hint.unwrap_or(self.default_int())),
                NondetKind::Bool => {
                    let bit = Expr::cast(Expr::nondet(self.ty(IntType::U8)), Ty::Bool);
                    Expr::cast(bit, Ty::Int(self.default_int()))
                }
            },
            AExprKind::Unary(op, a) => match op {
                UnOp::LogNot => Expr::not(self.expr(a, None)?.truthy()),
                UnOp::Neg | UnOp::BitNot => {
                    let a = self.expr(a, hint)?;
                    let a = self.to_int(a);
                    let ty = a.ty;
                    if let Some(c) = a.as_const() {
                        return Ok(Expr::new(ExprKind::Const(crate::expr::apply_unop(*op, c, ty)), ty));
                    }
                    Expr::new(ExprKind::Unary(*op, Box::new(a)), ty)
                }
            },
            AExprKind::Binary(op, a, b) => {
                if op.is_logical() {
                    let a = self.expr(a, None)?.truthy();
                    let b = self.expr(b, None)?.truthy();
                    Expr::binary(*op, a, b)
                } else {
                    let a = self.expr(a, hint)?;
                    let b = self.expr(b, hint)?;
                    self.binary(*op, a, b, span)?
                }
            }
            AExprKind::Ternary(c, a, b) => {
                let c = self.expr(c, None)?.truthy();
                let a = self.expr(a, hint)?;
                let b = self.expr(b, hint)?;
                let (a, b) = if a.ty.is_bool() && b.ty.is_bool() {
                    (a, b)
                } else {
                    self.unify(self.to_int(a), self.to_int(b))
                };
                let ty = a.ty;
                Expr::new(ExprKind::Ite(Box::new(c), Box::new(a), Box::new(b)), ty)
            }
            AExprKind::Cast(t, a) => {
                let ty = self.ty(*t);
                let a = self.expr(a, Some(ty))?;
                Expr::cast(a, Ty::Int(ty))
            }
        })
    }

    fn unify(&self, a: Expr, b: Expr) -> (Expr, Expr) {
        let (ta, tb) = (a.ty.int().expect("int"), b.ty.int().expect("int"));
        let t = Ty::Int(common_type(ta, tb));
        (Expr::cast(a, t), Expr::cast(b, t))
    }

    /// Builds an arithmetic or comparison node after the usual conversions.
    fn binary(&self, op: BinOp, a: Expr, b: Expr, span: Span) -> TResult<Expr> {
        let (a, b) = self.unify(self.to_int(a), self.to_int(b));
        if matches!(op, BinOp::Div | BinOp::Rem) {
            if b.has_nondet() {
                return Err(FrontendError::unsupported(span, "nondet value in divisor"));
            }
            let ty = a.ty.int().expect("int");
            if let Some(c) = b.as_const() {
                if c != 0 {
                    return Ok(fold(Expr::binary(op, a, b)));
                }
                return Ok(Expr::nondet(ty));
            }
            let zero = Expr::binary(BinOp::Eq, b.clone(), Expr::constant(0, ty));
            let q = Expr::binary(op, a, b);
            return Ok(Expr::new(
                ExprKind::Ite(Box::new(zero), Box::new(Expr::nondet(ty)), Box::new(q)),
                Ty::Int(ty),
            ));
        }
        Ok(fold(Expr::binary(op, a, b)))
    }
}

fn fold(e: Expr) -> Expr {
    if let ExprKind::Binary(op, a, b) = &e.kind {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            let v = crate::expr::apply_binop(*op, x, y, a.ty);
            return Expr::new(ExprKind::Const(v), e.ty);
        }
    }
    e
}

fn is_library_function(name: &str) -> bool {
    matches!(
        name,
        "printf" | "scanf" | "puts" | "putchar" | "getchar" | "exit" | "abort" | "rand" | "srand"
            | "memset" | "memcpy" | "strlen" | "abs"
    ) || name.starts_with("__VERIFIER_") || name.starts_with("__CPROVER_")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parser::parse_program;

    fn tc(src: &str) -> TResult<TypedProgram> {
        typecheck(&parse_program("t.c", src)?, TypeOptions::default())
    }

    #[test]
    fn promotion_mixed_signedness() {
        assert_eq!(common_type(IntType::I8, IntType::U8), IntType::U8);
        assert_eq!(common_type(IntType::I8, IntType::I32), IntType::I32);
        assert_eq!(common_type(IntType::U16, IntType::I32), IntType::U32);
    }

    #[test]
    fn undeclared_variable_reported_at_use() {
        let err = tc("int main() {\n  int x = 1;\n  x = y + 1;\n}").unwrap_err();
        match err {
            FrontendError::UndeclaredVariable { loc, name } => {
                assert_eq!(name, "y");
                assert_eq!((loc.line, loc.col), (3, 7));
                assert_eq!(loc.file, "t.c");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn recursion_rejected() {
        let err = tc("int f(int a) { int r; r = g(a); return r; }\nint g(int a) { int r; r = f(a); return r; }\nint main() { int x; x = f(1); }")
            .unwrap_err();
        assert_eq!(err.construct(), Some("recursion"));
    }

    #[test]
    fn assert_on_integer_compares_with_zero() {
        let p = tc("int main() { int x = *; assert(x); }").unwrap();
        let body = &p.entry_function().body;
        match &body[1].kind {
            TStmtKind::Assert { cond } => match &cond.kind {
                ExprKind::Binary(BinOp::Ne, _, z) => assert_eq!(z.as_const(), Some(0)),
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn width_override_applies_to_literals() {
        let p = typecheck(
            &parse_program("t.c", "int main() { unsigned x = 300; }").unwrap(),
            TypeOptions { width_override: Some(8) },
        )
        .unwrap();
        match &p.entry_function().body[0].kind {
            TStmtKind::Assign { value, .. } => {
                assert_eq!(value.ty, Ty::Int(IntType::U8));
                assert_eq!(value.as_const(), Some(300 & 0xff));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
