mod common;

use common::{corpus, lower, workspace_root};
use kinduct_core::expr::{eval, EvalEnv, Expr};
use kinduct_core::frontend::ast::Stmt;
use kinduct_core::frontend::pretty::pretty_program;
use kinduct_core::frontend::typed::{TStmt, TStmtKind, TypedProgram};
use kinduct_core::frontend::{load, parse, FrontendError, TypeOptions};
use kinduct_core::goto::Instr;
use kinduct_core::interp::{self, NondetSource, Outcome, RunConfig, SequenceSource};
use kinduct_core::{IntType, VarId};
use proptest::prelude::*;

#[test]
fn corpus_round_trips_through_pretty_printer() {
    for prog in corpus() {
        let a = parse("t.c", &prog.source).unwrap();
        let printed = pretty_program(&a);
        let b = parse("t.c", &printed).unwrap_or_else(|e| panic!("{}: {e}\n{printed}", prog.path));
        assert_eq!(a, b, "{}", prog.path);
        assert_eq!(pretty_program(&b), printed);
    }
}

#[test]
fn negative_corpus_is_rejected_with_named_construct() {
    let dir = workspace_root().join("corpus/negative");
    let expected = std::fs::read_to_string(dir.join("expected.tsv")).unwrap();
    let mut n = 0;
    for line in expected.lines() {
        let (file, construct) = line.split_once('\t').unwrap();
        let src = std::fs::read_to_string(dir.join(file)).unwrap();
        let err = load(file, &src, TypeOptions::default()).expect_err(file);
        assert_eq!(err.construct(), Some(construct), "{file}: {err}");
        assert!(err.to_string().starts_with(&format!("{file}:")), "{err}");
        n += 1;
    }
    assert!(n >= 20);
}

fn count(src: &str, pred: fn(&Stmt) -> bool) -> usize {
    let p = parse("t.c", src).unwrap();
    let mut n = 0;
    for f in &p.functions {
        for s in &f.body.stmts {
            s.walk(&mut |st| n += pred(st) as usize);
        }
    }
    n
}

fn is_loop(s: &Stmt) -> bool {
    matches!(s, Stmt::While { .. } | Stmt::For { .. } | Stmt::DoWhile { .. })
}

fn is_assert(s: &Stmt) -> bool {
    matches!(s, Stmt::Assert { .. })
}

#[test]
fn parse_examples() {
    let drain = "int main() { unsigned int x = *; while (x > 0) x--; assert(x == 0); }";
    assert_eq!((count(drain, is_loop), count(drain, is_assert)), (1, 1));
    let empty = "int main() { }";
    assert_eq!((count(empty, is_loop), count(empty, is_assert)), (0, 0));
    let sum = "int main() { int i; int s = 0; for (i = 0; i < 10; i++) s = s + i; assert(s == 45); }";
    assert_eq!((count(sum, is_loop), count(sum, is_assert)), (1, 1));
    let p = load("t.c", sum, TypeOptions::default()).unwrap();
    let out = AstInterp::new(&p, vec![]).run();
    assert_eq!(out.outcome, AstOutcome::Completed);
    assert_eq!(out.value("s"), 45);
}

#[test]
fn errors_carry_locations() {
    let err = load("t.c", "int main() {\n  int x = y;\n}", TypeOptions::default()).unwrap_err();
    assert!(matches!(err, FrontendError::UndeclaredVariable { ref name, .. } if name == "y"));
    assert_eq!((err.loc().line, err.loc().col), (2, 11));
    let err = load("t.c", "int main() { int x = ; }", TypeOptions::default()).unwrap_err();
    assert!(matches!(err, FrontendError::Syntax { .. }));
}

/// Direct interpreter over the typed AST, used as an oracle for lowering.
struct AstInterp<'a> {
    p: &'a TypedProgram,
    store: Vec<u64>,
    inputs: SequenceSource,
    steps: usize,
}

#[derive(Debug, PartialEq)]
enum AstOutcome {
    Completed,
    AssertionFailed { line: u32 },
    Blocked,
    StepLimit,
}

struct AstRun {
    outcome: AstOutcome,
    store: Vec<(String, u64)>,
}

impl AstRun {
    fn value(&self, name: &str) -> u64 {
        self.store.iter().find(|(n, _)| n == name).unwrap().1
    }
}

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Option<u64>),
    Stop(AstOutcome),
}

struct Env<'a> {
    store: &'a [u64],
    inputs: &'a mut SequenceSource,
}

impl EvalEnv for Env<'_> {
    fn var(&self, v: VarId) -> u64 {
        self.store[v.index()]
    }

    fn nondet(&mut self, site: usize, ty: IntType) -> u64 {
        self.inputs.next(0, site, ty)
    }
}

const STEP_LIMIT: usize = 200_000;

impl<'a> AstInterp<'a> {
    fn new(p: &'a TypedProgram, inputs: Vec<u64>) -> Self {
        AstInterp { p, store: vec![0; p.vars.len()], inputs: SequenceSource::new(inputs), steps: 0 }
    }

    fn eval(&mut self, e: &Expr) -> u64 {
        eval(e, &mut Env { store: &self.store, inputs: &mut self.inputs })
    }

    fn run(mut self) -> AstRun {
        for (v, init) in &self.p.globals {
            let x = self.eval(init);
            self.store[v.index()] = x;
        }
        let body = &self.p.entry_function().body;
        let outcome = match self.block(body) {
            Flow::Stop(o) => o,
            _ => AstOutcome::Completed,
        };
        let store = self.p.vars.ids().map(|v| (self.p.vars.name(v).to_string(), self.store[v.index()])).collect();
        AstRun { outcome, store }
    }

    fn block(&mut self, stmts: &[TStmt]) -> Flow {
        for s in stmts {
            match self.stmt(s) {
                Flow::Normal => {}
                other => return other,
            }
        }
        Flow::Normal
    }

    fn tick(&mut self) -> bool {
        self.steps += 1;
        self.steps > STEP_LIMIT
    }

    fn looped(&mut self, cond: &Expr, body: &[TStmt], step: &[TStmt], first: bool) -> Flow {
        let mut first = first;
        loop {
            if self.tick() {
                return Flow::Stop(AstOutcome::StepLimit);
            }
            if !first && self.eval(cond) == 0 {
                return Flow::Normal;
            }
            first = false;
            match self.block(body) {
                Flow::Break => return Flow::Normal,
                Flow::Normal | Flow::Continue => {}
                other => return other,
            }
            if let f @ (Flow::Return(_) | Flow::Stop(_)) = self.block(step) {
                return f;
            }
        }
    }

    fn stmt(&mut self, s: &TStmt) -> Flow {
        if self.tick() {
            return Flow::Stop(AstOutcome::StepLimit);
        }
        match &s.kind {
            TStmtKind::Assign { var, value, .. } => {
                let x = self.eval(value);
                self.store[var.index()] = x;
                Flow::Normal
            }
            TStmtKind::Call { target, func, args } => {
                let f = &self.p.functions[*func];
                let vals: Vec<u64> = args.iter().map(|a| self.eval(a)).collect();
                for (p, v) in f.params.iter().zip(vals) {
                    self.store[p.index()] = v;
                }
                match self.block(&f.body) {
                    Flow::Stop(o) => Flow::Stop(o),
                    Flow::Return(Some(v)) => {
                        if let Some(t) = target {
                            self.store[t.index()] = v;
                        }
                        Flow::Normal
                    }
                    _ => Flow::Normal,
                }
            }
            TStmtKind::If { cond, then, els } => {
                if self.eval(cond) != 0 {
                    self.block(then)
                } else {
                    self.block(els)
                }
            }
            TStmtKind::While { cond, body } => self.looped(cond, body, &[], false),
            TStmtKind::DoWhile { body, cond } => self.looped(cond, body, &[], true),
            TStmtKind::For { init, cond, step, body } => match self.block(init) {
                Flow::Normal => self.looped(cond, body, step, false),
                other => other,
            },
            TStmtKind::Assert { cond } => {
                if self.eval(cond) == 0 {
                    Flow::Stop(AstOutcome::AssertionFailed { line: s.span.line })
                } else {
                    Flow::Normal
                }
            }
            TStmtKind::Assume { cond, .. } => {
                if self.eval(cond) == 0 {
                    Flow::Stop(AstOutcome::Blocked)
                } else {
                    Flow::Normal
                }
            }
            TStmtKind::Return { value } => {
                let v = value.as_ref().map(|e| self.eval(e));
                Flow::Return(v)
            }
            TStmtKind::Break => Flow::Break,
            TStmtKind::Continue => Flow::Continue,
        }
    }
}

fn check_lowering(src: &str, inputs: Vec<u64>) -> Result<(), TestCaseError> {
    let typed = load("t.c", src, TypeOptions::default()).unwrap();
    let ast = AstInterp::new(&typed, inputs.clone()).run();
    if ast.outcome == AstOutcome::StepLimit {
        return Ok(());
    }
    let g = lower(src);
    let run = interp::run(&g.instrs, &g.vars, &mut SequenceSource::new(inputs), RunConfig { max_steps: 10 * STEP_LIMIT, ..Default::default() });
    let got = match run.outcome {
        Outcome::Completed => AstOutcome::Completed,
        Outcome::AssertionFailed { pc, .. } => AstOutcome::AssertionFailed { line: g.instrs[pc].span.line },
        Outcome::Blocked { .. } => AstOutcome::Blocked,
        Outcome::StepLimit => AstOutcome::StepLimit,
    };
    prop_assert_eq!(&got, &ast.outcome, "{}", src);
    if got == AstOutcome::Completed {
        // main's locals and the globals keep their source names
        for v in typed.vars.ids() {
            let info = typed.vars.get(v);
            if info.function.as_deref().is_some_and(|f| f != "main") {
                continue;
            }
            if let Some(gv) = g.vars.find(&info.name) {
                prop_assert_eq!(run.store[gv.index()], ast.value(&info.name), "{} in {}", info.name, src);
            }
        }
    }
    Ok(())
}

#[test]
fn assertion_statements_lower_to_asserts() {
    let g = lower("int main() { int x = 1; assert(x); }");
    assert_eq!(g.instrs.iter().filter(|i| matches!(i.instr, Instr::Assert { .. })).count(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Lowering preserves the behaviour of every corpus program on concrete
    /// inputs.
    #[test]
    fn lowering_preserves_corpus_semantics(seed in proptest::collection::vec(0u64..12, 16)) {
        for prog in corpus() {
            check_lowering(&prog.source, seed.clone())?;
        }
    }
}
