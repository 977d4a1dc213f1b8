//! Decision procedure for verification conditions.

pub mod cdcl;
pub mod cnf;
pub mod smtlib;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::vcgen::{SymId, VcFormula};

pub use cdcl::{solve_clauses, Budget, SatResult, Solver, Stats};
pub use cnf::{bitblast, bitblast_term, BitblastError, CnfInstance, GateBuilder, Lit};
pub use smtlib::{emit_smtlib, emit_term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOutcome {
    pub status: Status,
    /// Value of every symbol, present iff SAT.
    pub model: Option<BTreeMap<SymId, u64>>,
    pub stats: Stats,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Bitblast(#[from] BitblastError),
    #[error("solver budget exhausted after {} conflicts", .0.conflicts)]
    BudgetExhausted(Stats),
}

/// Solves a CNF instance and decodes the model through its bit map.
pub fn solve(c: &CnfInstance, budget: Budget) -> Result<SolverOutcome, SolverError> {
    let (r, stats) = solve_clauses(c.num_vars, &c.clauses, budget);
    match r {
        SatResult::Sat(a) => Ok(SolverOutcome { status: Status::Sat, model: Some(c.decode(&a)), stats }),
        SatResult::Unsat => Ok(SolverOutcome { status: Status::Unsat, model: None, stats }),
        SatResult::BudgetExhausted => Err(SolverError::BudgetExhausted(stats)),
    }
}

/// Bit-blasts and solves the query of `f`.
pub fn check(f: &VcFormula, budget: Budget) -> Result<SolverOutcome, SolverError> {
    let cnf = bitblast(f)?;
    solve(&cnf, budget)
}
