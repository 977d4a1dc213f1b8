//! Concrete interpreter for GOTO programs.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::expr::{eval, EvalEnv, VarId};
use crate::frontend::typed::VarTable;
use crate::goto::{Instr, Instruction, Origin};
use crate::types::IntType;

/// Supplies values for nondet expressions and havocs.
///
/// `site` is the preorder index of the nondet node within the instruction's
/// expression; havocs use site 0.
pub trait NondetSource {
    fn next(&mut self, pc: usize, site: usize, ty: IntType) -> u64;
}

/// Values consumed in order; running out yields zero and is recorded.
#[derive(Clone, Debug, Default)]
pub struct SequenceSource {
    pub values: VecDeque<u64>,
    pub exhausted: bool,
}

impl SequenceSource {
    pub fn new(values: impl IntoIterator<Item = u64>) -> Self {
        SequenceSource { values: values.into_iter().collect(), exhausted: false }
    }
}

impl NondetSource for SequenceSource {
    fn next(&mut self, _pc: usize, _site: usize, ty: IntType) -> u64 {
        match self.values.pop_front() {
            Some(v) => v & ty.mask(),
            None => {
                self.exhausted = true;
                0
            }
        }
    }
}

/// Values looked up by `(pc, site)`; missing keys yield zero.
#[derive(Clone, Debug, Default)]
pub struct MapSource {
    pub values: HashMap<(usize, usize), u64>,
}

impl NondetSource for MapSource {
    fn next(&mut self, pc: usize, site: usize, ty: IntType) -> u64 {
        self.values.get(&(pc, site)).copied().unwrap_or(0) & ty.mask()
    }
}

/// Always returns the same value.
pub struct ConstSource(pub u64);

impl NondetSource for ConstSource {
    fn next(&mut self, _: usize, _: usize, ty: IntType) -> u64 {
        self.0 & ty.mask()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Reached the end of the program.
    Completed,
    AssertionFailed { pc: usize, origin: Origin },
    /// An assumption was false; the run is infeasible from here on.
    Blocked { pc: usize },
    StepLimit,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub outcome: Outcome,
    pub store: Vec<u64>,
    /// Store at every visit of a recorded pc, in execution order.
    pub snapshots: Vec<(usize, Vec<u64>)>,
    /// Every nondet value drawn, in order.
    pub draws: Vec<u64>,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct RunConfig<'a> {
    pub max_steps: usize,
    /// Program points at which the store is snapshotted.
    pub record_at: Option<&'a BTreeSet<usize>>,
    /// Starting store; zeros when absent.
    pub initial: Option<Vec<u64>>,
}

impl Default for RunConfig<'_> {
    fn default() -> Self {
        RunConfig { max_steps: 1_000_000, record_at: None, initial: None }
    }
}

struct Env<'a> {
    store: &'a [u64],
    source: &'a mut dyn NondetSource,
    pc: usize,
    draws: &'a mut Vec<u64>,
}

impl EvalEnv for Env<'_> {
    fn var(&self, v: VarId) -> u64 {
        self.store[v.index()]
    }

    fn nondet(&mut self, site: usize, ty: IntType) -> u64 {
        let v = self.source.next(self.pc, site, ty) & ty.mask();
        self.draws.push(v);
        v
    }
}

/// Executes `instrs` from pc 0 until the end, a failed assertion, a blocking
/// assumption, or the step limit.
pub fn run(
    instrs: &[Instruction],
    vars: &VarTable,
    source: &mut dyn NondetSource,
    cfg: RunConfig<'_>,
) -> Run {
    let num_vars = vars.len();
    let mut store = cfg.initial.clone().unwrap_or_else(|| vec![0; num_vars]);
    store.resize(num_vars.max(store.len()), 0);
    let mut draws = Vec::new();
    let mut snapshots = Vec::new();
    let mut pc = 0;
    let mut steps = 0;
    let outcome = loop {
        if pc >= instrs.len() {
            break Outcome::Completed;
        }
        if steps >= cfg.max_steps {
            break Outcome::StepLimit;
        }
        steps += 1;
        if cfg.record_at.is_some_and(|r| r.contains(&pc)) {
            snapshots.push((pc, store.clone()));
        }
        let mut env = Env { store: &store, source, pc, draws: &mut draws };
        match &instrs[pc].instr {
            Instr::Assign { var, value, .. } => {
                let v = eval(value, &mut env);
                store[var.index()] = v;
                pc += 1;
            }
            Instr::Assume { cond, .. } => {
                if eval(cond, &mut env) == 0 {
                    break Outcome::Blocked { pc };
                }
                pc += 1;
            }
            Instr::Assert { cond, origin } => {
                if eval(cond, &mut env) == 0 {
                    break Outcome::AssertionFailed { pc, origin: *origin };
                }
                pc += 1;
            }
            Instr::Goto { target } => pc = *target,
            Instr::CondGoto { cond, target } => {
                if eval(cond, &mut env) != 0 {
                    pc = *target;
                } else {
                    pc += 1;
                }
            }
            Instr::Havoc { var } => {
                let ty = vars.ty(*var);
                let v = env.source.next(pc, 0, ty) & ty.mask();
                env.draws.push(v);
                store[var.index()] = v;
                pc += 1;
            }
            Instr::Skip => pc += 1,
        }
    };
    Run { outcome, store, snapshots, draws, steps }
}
