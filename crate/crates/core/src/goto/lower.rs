use std::collections::HashMap;

use super::{Builder, GotoError, GotoProgram, Instr, Label, Origin};
use crate::expr::{Expr, VarId};
use crate::frontend::ast::{AssumeKind, Span};
use crate::frontend::typed::*;

/// Lowers to GOTO form with calls inlined. Do-while loops are emitted
/// bottom-tested and left for [`super::normalize_loops`].
pub(super) fn lower_program(p: &TypedProgram) -> Result<GotoProgram, GotoError> {
    let mut cx = Lowering { prog: p, vars: p.vars.clone(), b: Builder::default(), stack: Vec::new() };
    let end = cx.b.new_label();
    for (v, init) in &p.globals {
        cx.b.emit(Instr::Assign { var: *v, value: init.clone(), decl: true }, Span::default(), 0);
    }
    let main = p.entry_function();
    let mut frame = Frame { rename: HashMap::new(), ret: None, exit: end, loops: Vec::new() };
    for &param in &main.params {
        let ty = p.vars.ty(param);
        cx.b.emit(Instr::Assign { var: param, value: Expr::nondet(ty), decl: true }, main.span, 0);
    }
    cx.stack.push(main.name.clone());
    cx.stmts(&main.body, &mut frame)?;
    cx.b.place(end);
    cx.b.emit(Instr::Skip, Span::default(), 0);
    let mut instrs = cx.b.finish();
    for (i, ins) in instrs.iter_mut().enumerate() {
        ins.origin_pc = i;
    }
    Ok(GotoProgram { file: p.file.clone(), vars: cx.vars, instrs, loops: Vec::new() })
}

struct Lowering<'a> {
    prog: &'a TypedProgram,
    vars: VarTable,
    b: Builder,
    /// Functions currently being inlined.
    stack: Vec<String>,
}

struct LoopLabels {
    brk: Label,
    cont: Label,
}

struct Frame {
    rename: HashMap<VarId, VarId>,
    /// Return slot and exit label of the function being inlined.
    ret: Option<VarId>,
    exit: Label,
    loops: Vec<LoopLabels>,
}

impl Frame {
    fn var(&self, v: VarId) -> VarId {
        self.rename.get(&v).copied().unwrap_or(v)
    }

    fn expr(&self, e: &Expr) -> Expr {
        if self.rename.is_empty() {
            return e.clone();
        }
        e.map_vars(&mut |v| self.var(v))
    }
}

impl Lowering<'_> {
    fn stmts(&mut self, ss: &[TStmt], f: &mut Frame) -> Result<(), GotoError> {
        for s in ss {
            self.stmt(s, f)?;
        }
        Ok(())
    }

    fn stmt(&mut self, s: &TStmt, f: &mut Frame) -> Result<(), GotoError> {
        let span = s.span;
        match &s.kind {
            TStmtKind::Assign { var, value, decl } => {
                let value = f.expr(value);
                self.b.emit(Instr::Assign { var: f.var(*var), value, decl: *decl }, span, 0);
            }
            TStmtKind::Call { target, func, args } => self.call(*target, *func, args, span, f)?,
            TStmtKind::If { cond, then, els } => {
                let else_l = self.b.new_label();
                let end = self.b.new_label();
                self.b.cond_goto(Expr::not(f.expr(cond)), else_l, span, 0);
                self.stmts(then, f)?;
                if els.is_empty() {
                    self.b.place(else_l);
                    self.b.place(end);
                } else {
                    self.b.goto(end, span, 0);
                    self.b.place(else_l);
                    self.stmts(els, f)?;
                    self.b.place(end);
                }
                // labels may coincide with the next instruction; a SKIP keeps
                // join points distinct from loop heads
                self.b.emit(Instr::Skip, span, 0);
            }
            TStmtKind::While { cond, body } => {
                self.while_loop(cond, body, &[], span, f)?;
            }
            TStmtKind::For { init, cond, step, body } => {
                self.stmts(init, f)?;
                self.while_loop(cond, body, step, span, f)?;
            }
            TStmtKind::DoWhile { body, cond } => {
                let head = self.b.new_label();
                let cont = self.b.new_label();
                let exit = self.b.new_label();
                self.b.place(head);
                f.loops.push(LoopLabels { brk: exit, cont });
                self.stmts(body, f)?;
                f.loops.pop();
                self.b.place(cont);
                self.b.cond_goto(f.expr(cond), head, span, 0);
                self.b.place(exit);
                self.b.emit(Instr::Skip, span, 0);
            }
            TStmtKind::Assert { cond } => {
                self.b.emit(Instr::Assert { cond: f.expr(cond), origin: Origin::User }, span, 0);
            }
            TStmtKind::Assume { cond, kind } => {
                let origin = match kind {
                    AssumeKind::Plain | AssumeKind::Esbmc => Origin::User,
                };
                self.b.emit(Instr::Assume { cond: f.expr(cond), origin }, span, 0);
            }
            TStmtKind::Return { value } => {
                if let (Some(v), Some(ret)) = (value, f.ret) {
                    let value = f.expr(v);
                    self.b.emit(Instr::Assign { var: ret, value, decl: false }, span, 0);
                }
                self.b.goto(f.exit, span, 0);
            }
            TStmtKind::Break => {
                let l = f.loops.last().expect("break outside loop").brk;
                self.b.goto(l, span, 0);
            }
            TStmtKind::Continue => {
                let l = f.loops.last().expect("continue outside loop").cont;
                self.b.goto(l, span, 0);
            }
        }
        Ok(())
    }

    /// `head: COND-GOTO !c exit; body; latch: step; GOTO head; exit:`
    fn while_loop(
        &mut self,
        cond: &Expr,
        body: &[TStmt],
        step: &[TStmt],
        span: Span,
        f: &mut Frame,
    ) -> Result<(), GotoError> {
        let head = self.b.new_label();
        let latch = self.b.new_label();
        let exit = self.b.new_label();
        self.b.place(head);
        self.b.cond_goto(Expr::not(f.expr(cond)), exit, span, 0);
        f.loops.push(LoopLabels { brk: exit, cont: latch });
        self.stmts(body, f)?;
        f.loops.pop();
        self.b.place(latch);
        self.stmts(step, f)?;
        self.b.goto(head, span, 0);
        self.b.place(exit);
        self.b.emit(Instr::Skip, span, 0);
        Ok(())
    }

    fn call(
        &mut self,
        target: Option<VarId>,
        func: usize,
        args: &[Expr],
        span: Span,
        caller: &mut Frame,
    ) -> Result<(), GotoError> {
        let callee = &self.prog.functions[func];
        if self.stack.contains(&callee.name) {
            return Err(GotoError::Recursion(callee.name.clone()));
        }
        // fresh instances of every parameter and local of the callee
        let mut rename = HashMap::new();
        for id in self.prog.vars.ids() {
            let info = self.prog.vars.get(id);
            if info.function.as_deref() == Some(callee.name.as_str()) {
                let mut fresh = info.clone();
                fresh.name = format!("{}::{}", callee.name, info.source_name);
                rename.insert(id, self.vars.add(fresh));
            }
        }
        let ret = callee.ret.map(|ty| {
            self.vars.add(VarInfo {
                name: format!("{}::return", callee.name),
                source_name: "return".into(),
                ty,
                kind: VarKind::Return,
                function: Some(callee.name.clone()),
            })
        });
        for (p, a) in callee.params.iter().zip(args) {
            let value = caller.expr(a);
            self.b.emit(Instr::Assign { var: rename[p], value, decl: true }, span, 0);
        }
        if let Some(r) = ret {
            let ty = self.vars.ty(r);
            self.b.emit(Instr::Assign { var: r, value: Expr::nondet(ty), decl: true }, span, 0);
        }
        let exit = self.b.new_label();
        let mut frame = Frame { rename, ret, exit, loops: Vec::new() };
        self.stack.push(callee.name.clone());
        self.stmts(&callee.body, &mut frame)?;
        self.stack.pop();
        self.b.place(exit);
        match (target, ret) {
            (Some(t), Some(r)) => {
                let ty = self.vars.ty(r);
                let t = caller.var(t);
                let value = Expr::cast(Expr::var(r, ty), crate::types::Ty::Int(self.vars.ty(t)));
                self.b.emit(Instr::Assign { var: t, value, decl: false }, span, 0);
            }
            _ => self.b.emit(Instr::Skip, span, 0),
        }
        Ok(())
    }
}
