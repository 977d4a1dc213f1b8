//! SMT-LIB2 (QF_BV) export.

use std::fmt::Write;

use crate::vcgen::{Sort, SymId, Term, TermId, TermPool, VcFormula};

fn sort_name(s: Sort) -> String {
    match s {
        Sort::Bool => "Bool".into(),
        Sort::Bv(w) => format!("(_ BitVec {w})"),
    }
}

/// Script asserting the query of `f`.
pub fn emit_smtlib(f: &VcFormula) -> String {
    emit_term(&f.pool, f.query)
}

/// Script asserting `root`. Free symbols are declared, defined symbols and
/// shared subterms become `define-fun`s in dependency order.
pub fn emit_term(pool: &TermPool, root: TermId) -> String {
    let n = pool.len();
    let mut refs = vec![0u32; n];
    let mut reach = vec![false; n];
    let mut stack = vec![root];
    while let Some(t) = stack.pop() {
        refs[t.0 as usize] += 1;
        if reach[t.0 as usize] {
            continue;
        }
        reach[t.0 as usize] = true;
        stack.extend(pool.children(t));
        if let Term::Sym(s) = pool.get(t) {
            if let Some(&d) = pool.defs.get(s) {
                stack.push(d);
            }
        }
    }
    let mut out = String::from("(set-logic QF_BV)\n(set-option :produce-models true)\n");
    let named = |i: usize| {
        reach[i]
            && refs[i] > 1
            && !matches!(pool.get(TermId(i as u32)), Term::Sym(_) | Term::BoolConst(_) | Term::BvConst { .. })
    };
    for i in 0..n {
        if !reach[i] {
            continue;
        }
        let t = TermId(i as u32);
        if let Term::Sym(s) = pool.get(t) {
            let sym = pool.symbol(*s);
            match pool.defs.get(s) {
                None => {
                    let _ = writeln!(out, "(declare-fun |{}| () {})", sym.name, sort_name(sym.sort));
                }
                Some(&d) => {
                    let _ = writeln!(
                        out,
                        "(define-fun |{}| () {} {})",
                        sym.name,
                        sort_name(sym.sort),
                        render(pool, d, &named, true)
                    );
                }
            }
        } else if named(i) {
            let _ = writeln!(
                out,
                "(define-fun |t!{i}| () {} {})",
                sort_name(pool.sort(t)),
                render(pool, t, &named, true)
            );
        }
    }
    let _ = writeln!(out, "(assert {})", render(pool, root, &named, true));
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

fn render(pool: &TermPool, t: TermId, named: &dyn Fn(usize) -> bool, top: bool) -> String {
    if !top && named(t.0 as usize) {
        return format!("|t!{}|", t.0);
    }
    let sub = |x: &TermId| render(pool, *x, named, false);
    match pool.get(t) {
        Term::BoolConst(b) => b.to_string(),
        Term::BvConst { value, width } => format!("(_ bv{value} {width})"),
        Term::Sym(s) => sym_ref(pool, *s),
        Term::Not(a) => format!("(not {})", sub(a)),
        Term::And(v) => format!("(and {})", v.iter().map(sub).collect::<Vec<_>>().join(" ")),
        Term::Or(v) => format!("(or {})", v.iter().map(sub).collect::<Vec<_>>().join(" ")),
        Term::Ite(c, a, b) => format!("(ite {} {} {})", sub(c), sub(a), sub(b)),
        Term::Eq(a, b) => format!("(= {} {})", sub(a), sub(b)),
        Term::Ult(a, b) => format!("(bvult {} {})", sub(a), sub(b)),
        Term::Ule(a, b) => format!("(bvule {} {})", sub(a), sub(b)),
        Term::Slt(a, b) => format!("(bvslt {} {})", sub(a), sub(b)),
        Term::Sle(a, b) => format!("(bvsle {} {})", sub(a), sub(b)),
        Term::BvNeg(a) => format!("(bvneg {})", sub(a)),
        Term::BvNot(a) => format!("(bvnot {})", sub(a)),
        Term::Bin(op, a, b) => format!("({} {} {})", op.smt_name(), sub(a), sub(b)),
        Term::ZExt(a, to) => format!("((_ zero_extend {}) {})", to - pool.sort(*a).width(), sub(a)),
        Term::SExt(a, to) => format!("((_ sign_extend {}) {})", to - pool.sort(*a).width(), sub(a)),
        Term::Extract(a, to) => format!("((_ extract {} 0) {})", to - 1, sub(a)),
        Term::BoolToBv(a, w) => format!("(ite {} (_ bv1 {w}) (_ bv0 {w}))", sub(a)),
    }
}

fn sym_ref(pool: &TermPool, s: SymId) -> String {
    format!("|{}|", pool.symbol(s).name)
}
