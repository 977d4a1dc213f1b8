use std::fmt;

use thiserror::Error;

use super::ast::Span;

/// Errors reported while reading MiniC source.
#[derive(Debug, Clone, Error)]
pub enum FrontendError {
    #[error("{loc}: syntax error: {message}")]
    Syntax { loc: Loc, message: String },
    #[error("{loc}: unsupported construct: {construct}")]
    Unsupported { loc: Loc, construct: String },
    #[error("{loc}: undeclared variable `{name}`")]
    UndeclaredVariable { loc: Loc, name: String },
    #[error("{loc}: undeclared function `{name}`")]
    UndeclaredFunction { loc: Loc, name: String },
    #[error("{loc}: type mismatch: expected {expected}, found {found}")]
    TypeMismatch { loc: Loc, expected: String, found: String },
    #[error("{loc}: {message}")]
    Semantic { loc: Loc, message: String },
}

/// A resolved source position, printed as `file:line:col`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loc {
    pub file: String,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

impl From<Span> for Loc {
    fn from(s: Span) -> Self {
        Loc { file: String::new(), line: s.line, col: s.col }
    }
}

impl FrontendError {
    pub fn syntax(span: Span, message: impl Into<String>) -> Self {
        FrontendError::Syntax { loc: span.into(), message: message.into() }
    }

    pub fn unsupported(span: Span, construct: impl Into<String>) -> Self {
        FrontendError::Unsupported { loc: span.into(), construct: construct.into() }
    }

    pub fn semantic(span: Span, message: impl Into<String>) -> Self {
        FrontendError::Semantic { loc: span.into(), message: message.into() }
    }

    pub fn loc(&self) -> &Loc {
        match self {
            FrontendError::Syntax { loc, .. }
            | FrontendError::Unsupported { loc, .. }
            | FrontendError::UndeclaredVariable { loc, .. }
            | FrontendError::UndeclaredFunction { loc, .. }
            | FrontendError::TypeMismatch { loc, .. }
            | FrontendError::Semantic { loc, .. } => loc,
        }
    }

    fn loc_mut(&mut self) -> &mut Loc {
        match self {
            FrontendError::Syntax { loc, .. }
            | FrontendError::Unsupported { loc, .. }
            | FrontendError::UndeclaredVariable { loc, .. }
            | FrontendError::UndeclaredFunction { loc, .. }
            | FrontendError::TypeMismatch { loc, .. }
            | FrontendError::Semantic { loc, .. } => loc,
        }
    }

    /// Attaches the file name to the error location.
    pub fn in_file(mut self, file: &str) -> Self {
        self.loc_mut().file = file.to_string();
        self
    }

    /// Name of the rejected construct, for unsupported-construct errors.
    pub fn construct(&self) -> Option<&str> {
        match self {
            FrontendError::Unsupported { construct, .. } => Some(construct),
            _ => None,
        }
    }
}
