//! Prints the surface AST back to MiniC source.

use std::fmt::Write;

use super::ast::*;
use crate::expr::UnOp;
use crate::types::IntType;

pub fn pretty_program(p: &Program) -> String {
    let mut out = String::new();
    for name in &p.prototypes {
        let _ = writeln!(out, "int {name}();");
    }
    for d in &p.globals {
        let _ = writeln!(out, "{}", decl_line(std::slice::from_ref(d)));
    }
    for f in &p.functions {
        if !out.is_empty() {
            out.push('\n');
        }
        let ret = f.ret.map(type_name).unwrap_or("void");
        let params: Vec<String> =
            f.params.iter().map(|p| format!("{} {}", type_name(p.ty), p.name)).collect();
        let _ = writeln!(out, "{ret} {}({}) {{", f.name, params.join(", "));
        for s in &f.body.stmts {
            stmt(&mut out, s, 1);
        }
        out.push_str("}\n");
    }
    out
}

pub fn type_name(t: IntType) -> &'static str {
    t.c_name()
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn decl_line(ds: &[VarDecl]) -> String {
    let ty = ds.first().map(|d| type_name(d.ty)).unwrap_or("int");
    let parts: Vec<String> = ds
        .iter()
        .map(|d| match &d.init {
            None => d.name.clone(),
            Some(Init::Nondet) => format!("{} = *", d.name),
            Some(Init::Expr(e)) => format!("{} = {}", d.name, pretty_expr(e)),
            Some(Init::Call { name, args }) => format!("{} = {}", d.name, call(name, args)),
        })
        .collect();
    format!("{ty} {};", parts.join(", "))
}

fn call(name: &str, args: &[AExpr]) -> String {
    let args: Vec<String> = args.iter().map(pretty_expr).collect();
    format!("{name}({})", args.join(", "))
}

fn simple(s: &Stmt) -> String {
    match s {
        Stmt::Assign { target, op, value, .. } => match op {
            None => format!("{target} = {}", pretty_expr(value)),
            Some(op) => format!("{target} {}= {}", op.symbol(), pretty_expr(value)),
        },
        Stmt::Step { target, increment, .. } => {
            format!("{target}{}", if *increment { "++" } else { "--" })
        }
        Stmt::Call { target, name, args, .. } => match target {
            Some(t) => format!("{t} = {}", call(name, args)),
            None => call(name, args),
        },
        Stmt::Assert { cond, .. } => format!("assert({})", pretty_expr(cond)),
        Stmt::Assume { cond, kind, .. } => {
            let f = match kind {
                AssumeKind::Plain => "__VERIFIER_assume",
                AssumeKind::Esbmc => "__ESBMC_assume",
            };
            format!("{f}({})", pretty_expr(cond))
        }
        Stmt::Error { .. } => "__VERIFIER_error()".into(),
        _ => unreachable!("not a simple statement"),
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    match s {
        Stmt::Decl(ds) => {
            indent(out, depth);
            out.push_str(&decl_line(ds));
            out.push('\n');
        }
        Stmt::Assign { .. }
        | Stmt::Step { .. }
        | Stmt::Call { .. }
        | Stmt::Assert { .. }
        | Stmt::Assume { .. }
        | Stmt::Error { .. } => {
            indent(out, depth);
            out.push_str(&simple(s));
            out.push_str(";\n");
        }
        Stmt::If { cond, then, els, .. } => {
            indent(out, depth);
            let _ = writeln!(out, "if ({})", pretty_expr(cond));
            nested(out, then, depth);
            if let Some(e) = els {
                indent(out, depth);
                out.push_str("else\n");
                nested(out, e, depth);
            }
        }
        Stmt::While { cond, body, .. } => {
            indent(out, depth);
            let _ = writeln!(out, "while ({})", pretty_expr(cond));
            nested(out, body, depth);
        }
        Stmt::DoWhile { body, cond, .. } => {
            indent(out, depth);
            out.push_str("do\n");
            nested(out, body, depth);
            indent(out, depth);
            let _ = writeln!(out, "while ({});", pretty_expr(cond));
        }
        Stmt::For { init, cond, step, body, .. } => {
            indent(out, depth);
            let init = match init.as_slice() {
                [Stmt::Decl(ds)] => decl_line(ds),
                list => format!("{};", list.iter().map(simple).collect::<Vec<_>>().join(", ")),
            };
            let cond = cond.as_ref().map(pretty_expr).unwrap_or_default();
            let step = step.iter().map(simple).collect::<Vec<_>>().join(", ");
            let _ = writeln!(out, "for ({init} {cond}; {step})");
            nested(out, body, depth);
        }
        Stmt::Block(b) => {
            indent(out, depth);
            out.push_str("{\n");
            for s in &b.stmts {
                stmt(out, s, depth + 1);
            }
            indent(out, depth);
            out.push_str("}\n");
        }
        Stmt::Return { value, .. } => {
            indent(out, depth);
            match value {
                Some(v) => {
                    let _ = writeln!(out, "return {};", pretty_expr(v));
                }
                None => out.push_str("return;\n"),
            }
        }
        Stmt::Break { .. } => {
            indent(out, depth);
            out.push_str("break;\n");
        }
        Stmt::Continue { .. } => {
            indent(out, depth);
            out.push_str("continue;\n");
        }
        Stmt::Empty { .. } => {
            indent(out, depth);
            out.push_str(";\n");
        }
    }
}

fn nested(out: &mut String, s: &Stmt, depth: usize) {
    if matches!(s, Stmt::Block(_)) {
        stmt(out, s, depth);
    } else {
        stmt(out, s, depth + 1);
    }
}

fn is_atom(e: &AExpr) -> bool {
    matches!(e.kind, AExprKind::Int { .. } | AExprKind::Var(_) | AExprKind::Nondet(_))
}

fn operand(e: &AExpr) -> String {
    if is_atom(e) {
        pretty_expr(e)
    } else {
        format!("({})", pretty_expr(e))
    }
}

pub fn pretty_expr(e: &AExpr) -> String {
    match &e.kind {
        AExprKind::Int { value, unsigned } => {
            if *unsigned && *value <= i32::MAX as u64 {
                format!("{value}u")
            } else {
                value.to_string()
            }
        }
        AExprKind::Var(v) => v.clone(),
        AExprKind::Nondet(k) => match k {
            NondetKind::Star => "(*)".into(),
            NondetKind::Bool => "__VERIFIER_nondet_bool()".into(),
            NondetKind::Int(t) => {
                let suffix = match (t.width, t.signed) {
                    (8, true) => "char",
                    (8, false) => "uchar",
                    (16, true) => "short",
                    (16, false) => "ushort",
                    (_, false) => "uint",
                    _ => "int",
                };
                format!("__VERIFIER_nondet_{suffix}()")
            }
        },
        AExprKind::Unary(op, a) => {
            let sym = match op {
                UnOp::Neg => "-",
                UnOp::BitNot => "~",
                UnOp::LogNot => "!",
            };
            format!("{sym}{}", operand(a))
        }
        AExprKind::Binary(op, a, b) => format!("{} {} {}", operand(a), op.symbol(), operand(b)),
        AExprKind::Ternary(c, a, b) => format!("{} ? {} : {}", operand(c), operand(a), operand(b)),
        AExprKind::Cast(t, a) => format!("({}){}", type_name(*t), operand(a)),
    }
}
