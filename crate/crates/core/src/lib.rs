//! k-induction model checker for MiniC programs.

pub mod bench;
pub mod driver;
pub mod expr;
pub mod frontend;
pub mod goto;
pub mod interp;
pub mod invariants;
pub mod solver;
pub mod transform;
pub mod types;
pub mod vcgen;

pub use expr::{BinOp, Expr, ExprKind, UnOp, VarId};
pub use types::{IntType, Ty};
