//! MiniC front end: lexing, parsing, pretty printing, and type checking.

pub mod ast;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod typecheck;
pub mod typed;

pub use ast::Program;
pub use error::{FrontendError, Loc};
pub use parser::{parse_expression, parse_program};
pub use pretty::{pretty_expr, pretty_program};
pub use typecheck::{common_type, TypeOptions};
pub use typed::{TypedProgram, VarInfo, VarKind, VarTable};

/// Parses MiniC source text.
pub fn parse(file: &str, source: &str) -> Result<Program, FrontendError> {
    parse_program(file, source)
}

/// Type-checks a parsed program.
pub fn typecheck(p: &Program, opts: TypeOptions) -> Result<TypedProgram, FrontendError> {
    typecheck::typecheck(p, opts)
}

/// Parses and type-checks in one step.
pub fn load(file: &str, source: &str, opts: TypeOptions) -> Result<TypedProgram, FrontendError> {
    typecheck(&parse(file, source)?, opts)
}
