//! The k-induction loop, its three phases, and counterexample
//! reconstruction.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::{self, FrontendError, TypeOptions};
use crate::goto::{self, GotoError, GotoProgram, Origin};
use crate::interp::{self, MapSource, Outcome, RunConfig, SequenceSource};
use crate::invariants::{self, InvariantError, InvariantSet, PipsError};
use crate::solver::{self, Budget, SolverError, Status};
use crate::transform::{self, Phase, TransformError, UnwoundProgram};
use crate::vcgen::{self, SymKind, VcFormula};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InvariantsMode {
    #[default]
    None,
    Builtin,
    Comments,
}

impl InvariantsMode {
    pub fn parse(s: &str) -> Option<InvariantsMode> {
        match s {
            "none" => Some(InvariantsMode::None),
            "builtin" => Some(InvariantsMode::Builtin),
            "comments" => Some(InvariantsMode::Comments),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KInductionConfig {
    pub max_iterations: usize,
    pub recheck_increment: usize,
    pub timeout_seconds: f64,
    pub invariants_mode: InvariantsMode,
    /// Conflicts allowed per solver call.
    pub conflict_limit: u64,
    /// Directory receiving one `.smt2` file per discharged VC.
    pub emit_smt: Option<PathBuf>,
    /// Directory receiving one DIMACS file per discharged VC.
    pub emit_cnf: Option<PathBuf>,
}

impl Default for KInductionConfig {
    fn default() -> Self {
        KInductionConfig {
            max_iterations: 100,
            recheck_increment: 5,
            timeout_seconds: 900.0,
            invariants_mode: InvariantsMode::None,
            conflict_limit: 1_000_000,
            emit_smt: None,
            emit_cnf: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    #[serde(rename = "TRUE")]
    True,
    #[serde(rename = "FALSE")]
    False,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::True => "TRUE",
            VerdictStatus::False => "FALSE",
            VerdictStatus::Unknown => "UNKNOWN",
        })
    }
}

/// A step of the algorithm as recorded in the phase log.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogPhase {
    Base,
    Forward,
    Inductive,
    /// The base case run after a proof, at the increased k.
    Recheck,
}

impl fmt::Display for LogPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogPhase::Base => "base",
            LogPhase::Forward => "forward",
            LogPhase::Inductive => "inductive",
            LogPhase::Recheck => "recheck",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceState {
    /// Program point of the snapshot: a loop head, or the violated assertion.
    pub pc: usize,
    pub line: u32,
    /// Value of every variable assigned so far, as a C integer.
    pub values: BTreeMap<String, i128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub pc: usize,
    pub line: u32,
    pub col: u32,
}

/// A concrete run reaching a violated assertion: the store at every loop-head
/// visit, then the store at the violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub states: Vec<TraceState>,
    pub violated: Violation,
    /// Nondet values, as raw bits, in the order the run draws them.
    pub inputs: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub decided_by: Option<LogPhase>,
    pub k_at_decision: Option<usize>,
    pub counterexample: Option<Trace>,
    pub phase_log: Vec<(LogPhase, usize)>,
    /// Why the run ended without a decision, when it did.
    pub reason: Option<String>,
}

impl Verdict {
    fn unknown(log: Vec<(LogPhase, usize)>, reason: impl Into<String>) -> Self {
        Verdict {
            status: VerdictStatus::Unknown,
            decided_by: None,
            k_at_decision: None,
            counterexample: None,
            phase_log: log,
            reason: Some(reason.into()),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Goto(#[from] GotoError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Pips(#[from] PipsError),
}

#[derive(Debug, Error)]
pub enum PhaseError {
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("timeout")]
    Timeout,
    #[error("internal error: counterexample does not replay: {0}")]
    Replay(String),
    #[error("cannot write {path}: {message}")]
    Emit { path: String, message: String },
}

/// A program ready for verification.
#[derive(Clone, Debug)]
pub struct Task {
    /// Stem used for emitted file names.
    pub name: String,
    /// The program as written.
    pub plain: GotoProgram,
    /// The program with invariant assumptions; equal to `plain` without invariants.
    pub instrumented: GotoProgram,
    pub invariants: Option<InvariantSet>,
}

/// Parses, lowers, and instruments a program according to `mode`.
pub fn load_task(file: &str, source: &str, mode: InvariantsMode, opts: TypeOptions) -> Result<Task, LoadError> {
    let name = std::path::Path::new(file)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("program")
        .to_string();
    let plain = goto::lower(&frontend::load(file, source, opts)?)?;
    let (instrumented, invariants) = match mode {
        InvariantsMode::None => (plain.clone(), None),
        InvariantsMode::Builtin => {
            let inv = invariants::infer_invariants(&plain);
            (invariants::instrument(&plain, &inv)?, Some(inv))
        }
        InvariantsMode::Comments => {
            let translated = invariants::translate_invariants(source)?;
            (goto::lower(&frontend::load(file, &translated, opts)?)?, None)
        }
    };
    Ok(Task { name, plain, instrumented, invariants })
}

/// Shared state of one verification run.
pub struct Context {
    pub name: String,
    pub budget: Budget,
    pub deadline: Instant,
    pub emit_smt: Option<PathBuf>,
    pub emit_cnf: Option<PathBuf>,
}

impl Context {
    pub fn new(name: &str, cfg: &KInductionConfig) -> Self {
        let deadline = Instant::now() + Duration::from_secs_f64(cfg.timeout_seconds.max(0.0));
        Context {
            name: name.to_string(),
            budget: Budget { conflict_limit: cfg.conflict_limit, deadline: Some(deadline) },
            deadline,
            emit_smt: cfg.emit_smt.clone(),
            emit_cnf: cfg.emit_cnf.clone(),
        }
    }

    /// Unlimited time, default conflict limit, nothing emitted.
    pub fn unbounded(name: &str) -> Self {
        Context::new(name, &KInductionConfig { timeout_seconds: 1e9, ..KInductionConfig::default() })
    }
}

/// Result of one discharged VC.
pub struct PhaseRun {
    pub unwound: UnwoundProgram,
    pub formula: VcFormula,
    /// Symbol values when the query is satisfiable.
    pub model: Option<BTreeMap<vcgen::SymId, u64>>,
}

fn write_artifact(dir: &PathBuf, file: String, text: &str) -> Result<(), PhaseError> {
    let path = dir.join(file);
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&path, text))
        .map_err(|e| PhaseError::Emit { path: path.display().to_string(), message: e.to_string() })
}

/// Builds and decides the phase's query.
pub fn run_phase(p: &GotoProgram, phase: Phase, k: usize, ctx: &Context) -> Result<PhaseRun, PhaseError> {
    if Instant::now() >= ctx.deadline {
        return Err(PhaseError::Timeout);
    }
    let unwound = transform::prepare(p, k, phase)?;
    let formula = vcgen::generate(&unwound);
    let stem = format!("{}_{}_k{}", ctx.name, phase.name(), k);
    if let Some(dir) = &ctx.emit_smt {
        write_artifact(dir, format!("{stem}.smt2"), &solver::emit_smtlib(&formula))?;
    }
    let cnf = solver::bitblast(&formula).map_err(SolverError::from)?;
    if let Some(dir) = &ctx.emit_cnf {
        write_artifact(dir, format!("{stem}.cnf"), &cnf.to_dimacs())?;
    }
    let out = match solver::solve(&cnf, ctx.budget) {
        Err(SolverError::BudgetExhausted(_)) if Instant::now() >= ctx.deadline => return Err(PhaseError::Timeout),
        r => r?,
    };
    let model = match out.status {
        Status::Sat => out.model,
        Status::Unsat => None,
    };
    Ok(PhaseRun { unwound, formula, model })
}

/// Searches for a violation within `k` iterations of every loop.
pub fn base_case(p: &GotoProgram, plain: &GotoProgram, k: usize, ctx: &Context) -> Result<Option<Trace>, PhaseError> {
    let run = run_phase(p, Phase::Base, k, ctx)?;
    match &run.model {
        None => Ok(None),
        Some(model) => reconstruct(model, &run.unwound, &run.formula, plain).map(Some),
    }
}

/// Holds when every loop exits within `k` iterations and no assertion fails.
pub fn forward_condition(p: &GotoProgram, k: usize, ctx: &Context) -> Result<bool, PhaseError> {
    Ok(run_phase(p, Phase::Forward, k, ctx)?.model.is_none())
}

/// Holds when `k` violation-free iterations from an arbitrary state imply a
/// violation-free exit.
pub fn inductive_step(p: &GotoProgram, k: usize, ctx: &Context) -> Result<bool, PhaseError> {
    Ok(run_phase(p, Phase::Inductive, k, ctx)?.model.is_none())
}

/// Turns a model of a base-case query into a concrete trace of `plain`.
///
/// The unwound program is executed with the model's nondet values; the
/// values it draws are then fed in order to the original program, which must
/// fail the same assertion.
pub fn reconstruct(
    model: &BTreeMap<vcgen::SymId, u64>,
    u: &UnwoundProgram,
    f: &VcFormula,
    plain: &GotoProgram,
) -> Result<Trace, PhaseError> {
    let mut values = HashMap::new();
    let mut initial = vec![0u64; u.body.vars.len()];
    for (s, v) in model {
        match f.pool.symbol(*s).kind {
            SymKind::Nondet { pc, site } => {
                values.insert((pc, site), *v);
            }
            SymKind::Havoc { pc, .. } => {
                values.insert((pc, 0), *v);
            }
            SymKind::Initial { var } => initial[var.index()] = *v,
            SymKind::Version { .. } => {}
        }
    }
    let mut source = MapSource { values };
    let sim = interp::run(
        &u.body.instrs,
        &u.body.vars,
        &mut source,
        RunConfig { initial: Some(initial), ..RunConfig::default() },
    );
    let Outcome::AssertionFailed { pc, origin: Origin::User } = sim.outcome else {
        return Err(PhaseError::Replay(format!("unwound program ended with {:?}", sim.outcome)));
    };
    let ordinal = user_assert_ordinal(&u.body.instrs, pc);
    replay(plain, &sim.draws, ordinal)
}

/// Position of the user assertion at `pc` among all user assertions of the
/// program it was copied from.
fn user_assert_ordinal(instrs: &[goto::Instruction], pc: usize) -> usize {
    let origin = instrs[pc].origin_pc;
    let mut seen = BTreeSet::new();
    for ins in instrs {
        if matches!(ins.instr, goto::Instr::Assert { origin: Origin::User, .. }) && ins.origin_pc < origin {
            seen.insert(ins.origin_pc);
        }
    }
    seen.len()
}

/// Runs `p` on a sequence of nondet values and checks that it fails its
/// `ordinal`-th user assertion after consuming exactly those values.
pub fn replay(p: &GotoProgram, draws: &[u64], ordinal: usize) -> Result<Trace, PhaseError> {
    let heads: BTreeSet<usize> = p.loops.iter().map(|l| l.head).collect();
    let mut source = SequenceSource::new(draws.iter().copied());
    let run = interp::run(&p.instrs, &p.vars, &mut source, RunConfig { record_at: Some(&heads), ..RunConfig::default() });
    let Outcome::AssertionFailed { pc, origin: Origin::User } = run.outcome else {
        return Err(PhaseError::Replay(format!("original program ended with {:?}", run.outcome)));
    };
    let got = user_assert_ordinal(&p.instrs, pc);
    if got != ordinal || source.exhausted || !source.values.is_empty() {
        return Err(PhaseError::Replay(format!(
            "original program failed assertion #{got} instead of #{ordinal} ({} inputs left)",
            source.values.len()
        )));
    }
    let state = |at: usize, store: &[u64]| {
        let values = p
            .vars
            .ids()
            .map(|v| (p.vars.name(v).to_string(), p.vars.ty(v).to_i128(store[v.index()])))
            .collect();
        TraceState { pc: at, line: p.instrs[at].span.line, values }
    };
    let mut states: Vec<TraceState> = run.snapshots.iter().map(|(at, store)| state(*at, store)).collect();
    states.push(state(pc, &run.store));
    let span = p.instrs[pc].span;
    Ok(Trace { states, violated: Violation { pc, line: span.line, col: span.col }, inputs: draws.to_vec() })
}

/// Runs the k-induction loop on a loaded task.
///
/// Base cases run on the instrumented program; the re-check after a proof
/// runs on the plain one, so an unsound invariant cannot hide a violation
/// reachable within the re-check bound.
pub fn kinduction(task: &Task, cfg: &KInductionConfig) -> Result<Verdict, PhaseError> {
    let ctx = Context::new(&task.name, cfg);
    let mut log = Vec::new();
    match kinduction_loop(task, cfg, &ctx, &mut log) {
        Err(PhaseError::Timeout) => Ok(Verdict::unknown(log, "timeout")),
        Err(PhaseError::Solver(SolverError::BudgetExhausted(_))) => Ok(Verdict::unknown(log, "conflict limit reached")),
        r => r,
    }
}

fn kinduction_loop(
    task: &Task,
    cfg: &KInductionConfig,
    ctx: &Context,
    log: &mut Vec<(LogPhase, usize)>,
) -> Result<Verdict, PhaseError> {
    let p = &task.instrumented;
    let mut k = 1;
    let mut force = false;
    let mut last: Option<(LogPhase, usize)> = None;
    while k <= cfg.max_iterations {
        if force {
            k += cfg.recheck_increment;
        }
        let (phase, target) = if force { (LogPhase::Recheck, &task.plain) } else { (LogPhase::Base, p) };
        log.push((phase, k));
        if let Some(trace) = base_case(target, &task.plain, k, ctx)? {
            return Ok(Verdict {
                status: VerdictStatus::False,
                decided_by: Some(phase),
                k_at_decision: Some(k),
                counterexample: Some(trace),
                phase_log: std::mem::take(log),
                reason: None,
            });
        }
        if force {
            let (by, at) = last.expect("force implies a proof");
            return Ok(Verdict {
                status: VerdictStatus::True,
                decided_by: Some(by),
                k_at_decision: Some(at),
                counterexample: None,
                phase_log: std::mem::take(log),
                reason: None,
            });
        }
        k += 1;
        log.push((LogPhase::Forward, k));
        if forward_condition(p, k, ctx)? {
            force = true;
            last = Some((LogPhase::Forward, k));
            continue;
        }
        log.push((LogPhase::Inductive, k));
        if inductive_step(p, k, ctx)? {
            force = true;
            last = Some((LogPhase::Inductive, k));
        }
    }
    Ok(Verdict::unknown(std::mem::take(log), "iteration bound reached"))
}

/// Loads `source` and runs [`kinduction`] on it.
pub fn verify_source(file: &str, source: &str, cfg: &KInductionConfig, opts: TypeOptions) -> Result<Verdict, VerifyError> {
    let task = load_task(file, source, cfg.invariants_mode, opts)?;
    Ok(kinduction(&task, cfg)?)
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// Renders the phase log as `phase k` lines.
pub fn format_log(log: &[(LogPhase, usize)]) -> String {
    log.iter().map(|(p, k)| format!("{p} {k}\n")).collect()
}
