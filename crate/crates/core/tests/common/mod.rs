//! Helpers shared by the integration tests: corpus access and an
//! explicit-state enumerator used as an independent oracle for the base case.
#![allow(dead_code)]

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use kinduct_core::bench::{Expected, Manifest};
use kinduct_core::expr::{eval, EvalEnv, Expr, ExprKind};
use kinduct_core::frontend::{self, TypeOptions};
use kinduct_core::goto::{self, GotoProgram, Instr, Origin};
use kinduct_core::{IntType, VarId};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn corpus_manifest() -> Manifest {
    Manifest::load(&workspace_root().join("corpus/manifest.tsv")).expect("corpus manifest")
}

pub struct CorpusProgram {
    pub path: String,
    pub expected: Expected,
    pub source: String,
}

pub fn corpus() -> Vec<CorpusProgram> {
    let m = corpus_manifest();
    m.entries
        .iter()
        .map(|e| CorpusProgram {
            path: e.path.clone(),
            expected: e.expected,
            source: std::fs::read_to_string(m.resolve(e)).expect("corpus file"),
        })
        .collect()
}

pub fn lower_with(src: &str, opts: TypeOptions) -> GotoProgram {
    goto::lower(&frontend::load("t.c", src, opts).expect("front end")).expect("lowering")
}

pub fn lower(src: &str) -> GotoProgram {
    lower_with(src, TypeOptions::default())
}

fn nondet_types(e: &Expr, out: &mut Vec<IntType>) {
    if let ExprKind::Nondet = e.kind {
        out.push(e.ty.int().expect("integer nondet"));
    }
    for c in e.children() {
        nondet_types(c, out);
    }
}

struct Env<'a> {
    store: &'a [u64],
    choice: &'a [u64],
}

impl EvalEnv for Env<'_> {
    fn var(&self, v: VarId) -> u64 {
        self.store[v.index()]
    }

    fn nondet(&mut self, site: usize, ty: IntType) -> u64 {
        self.choice[site] & ty.mask()
    }
}

/// Every assignment of values to the given types.
fn choices(types: &[IntType]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for t in types {
        assert!(t.width <= 8, "enumeration needs narrow nondet values");
        let n = 1u64 << t.width;
        out = out.into_iter().flat_map(|c| (0..n).map(move |v| [c.clone(), vec![v]].concat())).collect();
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    pc: usize,
    store: Vec<u64>,
    /// Iterations started by the current execution of each loop.
    iters: Vec<u32>,
}

/// Whether some run fails a user assertion while no loop execution performs
/// more than `k` iterations. Explores every nondet choice explicitly.
pub fn violates_within(p: &GotoProgram, k: u32) -> bool {
    let n = p.instrs.len();
    let start = State { pc: 0, store: vec![0; p.vars.len()], iters: vec![0; p.loops.len()] };
    let mut seen = HashSet::new();
    let mut stack = vec![start];
    while let Some(s) = stack.pop() {
        if s.pc >= n || !seen.insert(s.clone()) {
            continue;
        }
        let ins = &p.instrs[s.pc].instr;
        let mut types = Vec::new();
        match ins {
            Instr::Assign { value: e, .. } | Instr::Assume { cond: e, .. } | Instr::Assert { cond: e, .. } => {
                nondet_types(e, &mut types)
            }
            Instr::CondGoto { cond, .. } => nondet_types(cond, &mut types),
            Instr::Havoc { var } => types.push(p.vars.ty(*var)),
            _ => {}
        }
        for choice in choices(&types) {
            let mut env = Env { store: &s.store, choice: &choice };
            let mut next = s.clone();
            match ins {
                Instr::Assign { var, value, .. } => {
                    next.store[var.index()] = eval(value, &mut env);
                    next.pc += 1;
                }
                Instr::Assume { cond, .. } => {
                    if eval(cond, &mut env) == 0 {
                        continue;
                    }
                    next.pc += 1;
                }
                Instr::Assert { cond, origin } => {
                    if eval(cond, &mut env) == 0 {
                        if *origin == Origin::User {
                            return true;
                        }
                        continue;
                    }
                    next.pc += 1;
                }
                Instr::Goto { target } => next.pc = *target,
                Instr::CondGoto { cond, target } => {
                    next.pc = if eval(cond, &mut env) != 0 { *target } else { s.pc + 1 };
                }
                Instr::Havoc { var } => {
                    next.store[var.index()] = choice[0];
                    next.pc += 1;
                }
                Instr::Skip => next.pc += 1,
            }
            let mut blocked = false;
            for (i, l) in p.loops.iter().enumerate() {
                if next.pc == l.head && !l.contains(s.pc) {
                    next.iters[i] = 0;
                }
                if s.pc == l.guard && next.pc == l.guard + 1 {
                    next.iters[i] += 1;
                    blocked |= next.iters[i] > k;
                }
            }
            if !blocked {
                stack.push(next);
            }
        }
    }
    false
}

/// Smallest `k <= max_k` at which a violation is reachable.
pub fn earliest_violation(p: &GotoProgram, max_k: u32) -> Option<u32> {
    (1..=max_k).find(|&k| violates_within(p, k))
}

/// The external SMT solver, when installed.
pub fn z3() -> Option<PathBuf> {
    let p = Path::new("/usr/local/bin/z3");
    if p.exists() {
        return Some(p.to_path_buf());
    }
    std::env::var_os("PATH")?
        .to_str()?
        .split(':')
        .map(|d| Path::new(d).join("z3"))
        .find(|p| p.exists())
}

/// `Some(true)` for sat, `Some(false)` for unsat, `None` otherwise.
pub fn z3_sat(z3: &Path, script: &str) -> Option<bool> {
    use std::io::Write;
    use std::process::{Command, Stdio};
    let mut child = Command::new(z3)
        .args(["-in", "-smt2", "-T:60"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .ok()?;
    child.stdin.take()?.write_all(script.as_bytes()).ok()?;
    let out = child.wait_with_output().ok()?;
    let text = String::from_utf8_lossy(&out.stdout);
    match text.lines().next()?.trim() {
        "sat" => Some(true),
        "unsat" => Some(false),
        _ => None,
    }
}

/// One invariant-comment translation case from `corpus/goldens`.
pub struct Golden {
    pub name: String,
    pub input: String,
    /// Translated source, or the error message when translation must fail.
    pub expected: Result<String, String>,
}

pub fn goldens() -> Vec<Golden> {
    let dir = workspace_root().join("corpus/goldens");
    let mut names: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    names
        .into_iter()
        .map(|d| {
            let read = |f: &str| std::fs::read_to_string(d.join(f));
            let expected = match read("expected.c") {
                Ok(s) => Ok(s),
                Err(_) => Err(read("error.txt").unwrap().trim().to_string()),
            };
            Golden { name: d.file_name().unwrap().to_string_lossy().into_owned(), input: read("input.c").unwrap(), expected }
        })
        .collect()
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Compares modulo whitespace; a successful translation must also load.
pub fn check_golden(g: &Golden) -> Result<(), String> {
    match (kinduct_core::invariants::translate_invariants(&g.input), &g.expected) {
        (Ok(out), Ok(want)) if squash(&out) == squash(want) => {
            frontend::load("golden.c", &out, TypeOptions::default()).map(|_| ()).map_err(|e| e.to_string())
        }
        (Err(e), Err(want)) if &e.to_string() == want => Ok(()),
        (got, want) => Err(format!("{}: got {got:?}, want {want:?}", g.name)),
    }
}
