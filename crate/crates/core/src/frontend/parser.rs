//! Recursive-descent parser for MiniC.

use super::ast::*;
use super::error::FrontendError;
use super::lexer::{tokenize, Tok, Token};
use crate::expr::{BinOp, UnOp};
use crate::types::IntType;

type PResult<T> = Result<T, FrontendError>;

/// Parses a complete translation unit.
pub fn parse_program(file: &str, src: &str) -> PResult<Program> {
    let tokens = tokenize(src).map_err(|e| e.in_file(file))?;
    let mut p = Parser { tokens, pos: 0 };
    p.program(file).map_err(|e| e.in_file(file))
}

/// Parses a standalone expression, e.g. a rewritten invariant.
pub fn parse_expression(src: &str) -> PResult<AExpr> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

const QUALIFIERS: &[&str] = &["const", "volatile", "static", "extern", "register", "auto", "inline"];
const TYPE_WORDS: &[&str] = &["unsigned", "signed", "int", "char", "short", "long"];
const TYPEDEFS: &[(&str, IntType)] = &[
    ("int8_t", IntType::I8),
    ("uint8_t", IntType::U8),
    ("int16_t", IntType::I16),
    ("uint16_t", IntType::U16),
    ("int32_t", IntType::I32),
    ("uint32_t", IntType::U32),
];

fn nondet_builtin(name: &str) -> Option<NondetKind> {
    let suffix = name
        .strip_prefix("__VERIFIER_nondet_")
        .or_else(|| name.strip_prefix("nondet_"))?;
    Some(match suffix {
        "int" | "long" => NondetKind::Int(IntType::I32),
        "uint" | "unsigned" | "ulong" => NondetKind::Int(IntType::U32),
        "char" => NondetKind::Int(IntType::I8),
        "uchar" => NondetKind::Int(IntType::U8),
        "short" => NondetKind::Int(IntType::I16),
        "ushort" => NondetKind::Int(IntType::U16),
        "bool" => NondetKind::Bool,
        _ => return None,
    })
}

fn assume_builtin(name: &str) -> Option<AssumeKind> {
    match name {
        "assume" | "__VERIFIER_assume" | "__CPROVER_assume" => Some(AssumeKind::Plain),
        "__ESBMC_assume" => Some(AssumeKind::Esbmc),
        _ => None,
    }
}

fn is_assert(name: &str) -> bool {
    matches!(name, "assert" | "__VERIFIER_assert" | "__CPROVER_assert")
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Span> {
        if self.is_punct(p) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn unexpected(&self, wanted: &str) -> FrontendError {
        let span = self.span();
        let found = match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int { value, .. } => format!("`{value}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Float => "floating-point literal".into(),
            Tok::Str => "string literal".into(),
            Tok::Hash => "`#`".into(),
            Tok::Eof => "end of input".into(),
        };
        FrontendError::syntax(span, format!("expected {wanted}, found {found}"))
    }

    /// Rejects tokens that always start an unsupported construct.
    fn reject_unsupported_token(&self) -> PResult<()> {
        let span = self.span();
        match self.peek() {
            Tok::Float => Err(FrontendError::unsupported(span, "float")),
            Tok::Str => Err(FrontendError::unsupported(span, "string literal")),
            Tok::Hash => Err(FrontendError::unsupported(span, "preprocessor directive")),
            Tok::Ident(w) => match w.as_str() {
                "float" | "double" => Err(FrontendError::unsupported(span, "float")),
                "struct" => Err(FrontendError::unsupported(span, "struct")),
                "union" => Err(FrontendError::unsupported(span, "union")),
                "enum" => Err(FrontendError::unsupported(span, "enum")),
                "typedef" => Err(FrontendError::unsupported(span, "typedef")),
                "goto" => Err(FrontendError::unsupported(span, "goto")),
                "switch" | "case" => Err(FrontendError::unsupported(span, "switch")),
                "sizeof" => Err(FrontendError::unsupported(span, "sizeof")),
                "_Bool" | "bool" => Err(FrontendError::unsupported(span, "_Bool")),
                "malloc" | "calloc" | "realloc" | "free" | "alloca" => {
                    Err(FrontendError::unsupported(span, "heap"))
                }
                _ => Ok(()),
            },
            Tok::Punct("...") => Err(FrontendError::unsupported(span, "varargs")),
            _ => Ok(()),
        }
    }

    fn starts_type(&self) -> bool {
        match self.peek() {
            Tok::Ident(w) => {
                TYPE_WORDS.contains(&w.as_str())
                    || QUALIFIERS.contains(&w.as_str())
                    || w == "void"
                    || TYPEDEFS.iter().any(|(n, _)| n == w)
                    || matches!(
                        w.as_str(),
                        "float" | "double" | "struct" | "union" | "enum" | "typedef" | "_Bool" | "bool"
                    )
            }
            _ => false,
        }
    }

    /// Parses a type specifier; `Ok(None)` means `void`.
    fn type_spec(&mut self) -> PResult<Option<IntType>> {
        let start = self.span();
        let mut words: Vec<String> = Vec::new();
        let mut typedef = None;
        let mut void = false;
        loop {
            self.reject_unsupported_token()?;
            let w = match self.peek() {
                Tok::Ident(w) => w.clone(),
                _ => break,
            };
            if QUALIFIERS.contains(&w.as_str()) {
                self.bump();
            } else if TYPE_WORDS.contains(&w.as_str()) && typedef.is_none() && !void {
                words.push(w);
                self.bump();
            } else if let Some((_, t)) = TYPEDEFS.iter().find(|(n, _)| *n == w) {
                if !words.is_empty() || typedef.is_some() {
                    return Err(FrontendError::syntax(self.span(), "conflicting type specifiers"));
                }
                typedef = Some(*t);
                self.bump();
            } else if w == "void" && words.is_empty() && typedef.is_none() {
                void = true;
                self.bump();
            } else {
                break;
            }
        }
        if void {
            return Ok(None);
        }
        if let Some(t) = typedef {
            return Ok(Some(t));
        }
        if words.is_empty() {
            return Err(FrontendError::syntax(start, "expected a type"));
        }
        let unsigned = words.iter().any(|w| w == "unsigned");
        let signed_kw = words.iter().any(|w| w == "signed");
        if unsigned && signed_kw {
            return Err(FrontendError::syntax(start, "both `signed` and `unsigned`"));
        }
        let longs = words.iter().filter(|w| *w == "long").count();
        let width = if words.iter().any(|w| w == "char") {
            8
        } else if words.iter().any(|w| w == "short") {
            16
        } else if longs >= 2 {
            return Err(FrontendError::unsupported(start, "64-bit integer"));
        } else {
            32
        };
        Ok(Some(IntType::new(width, !unsigned)))
    }

    fn program(&mut self, file: &str) -> PResult<Program> {
        let mut prog = Program {
            file: file.to_string(),
            globals: Vec::new(),
            functions: Vec::new(),
            prototypes: Vec::new(),
        };
        while !matches!(self.peek(), Tok::Eof) {
            self.reject_unsupported_token()?;
            let span = self.span();
            let ret = self.type_spec()?;
            self.reject_pointer()?;
            let (name, name_span) = self.ident()?;
            if self.is_punct("(") {
                let params = self.params()?;
                if self.eat_punct(";") {
                    if !prog.prototypes.contains(&name) {
                        prog.prototypes.push(name);
                    }
                    continue;
                }
                let body = self.block()?;
                if prog.functions.iter().any(|f| f.name == name) {
                    return Err(FrontendError::semantic(name_span, format!("redefinition of `{name}`")));
                }
                prog.functions.push(FunctionDef { name, ret, params, body, span });
            } else {
                let ty = ret.ok_or_else(|| FrontendError::semantic(span, "variable of type void"))?;
                let decls = self.declarators_after_first(ty, name, name_span)?;
                prog.globals.extend(decls);
            }
        }
        Ok(prog)
    }

    fn reject_pointer(&self) -> PResult<()> {
        if self.is_punct("*") {
            return Err(FrontendError::unsupported(self.span(), "pointer"));
        }
        Ok(())
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if self.eat_punct(")") {
            return Ok(params);
        }
        if self.is_word("void") && matches!(self.peek_at(1), Tok::Punct(")")) {
            self.bump();
            self.bump();
            return Ok(params);
        }
        loop {
            self.reject_unsupported_token()?;
            let span = self.span();
            let ty = self
                .type_spec()?
                .ok_or_else(|| FrontendError::semantic(span, "parameter of type void"))?;
            self.reject_pointer()?;
            let (name, nspan) = match self.peek() {
                Tok::Ident(_) => self.ident()?,
                _ => (String::new(), span),
            };
            if self.is_punct("[") {
                return Err(FrontendError::unsupported(self.span(), "array"));
            }
            params.push(Param { name, ty, span: nspan });
            if self.eat_punct(")") {
                break;
            }
            self.expect_punct(",")?;
        }
        Ok(params)
    }

    fn block(&mut self) -> PResult<Block> {
        let open = self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.unexpected("`}`"));
            }
            stmts.push(self.statement()?);
        }
        let close = self.expect_punct("}")?;
        Ok(Block { stmts, open, close })
    }

    fn declarators_after_first(&mut self, ty: IntType, name: String, span: Span) -> PResult<Vec<VarDecl>> {
        let mut out = Vec::new();
        let mut current = Some((name, span));
        loop {
            let (name, span) = match current.take() {
                Some(x) => x,
                None => {
                    self.reject_pointer()?;
                    self.ident()?
                }
            };
            if self.is_punct("[") {
                return Err(FrontendError::unsupported(self.span(), "array"));
            }
            let init = if self.eat_punct("=") { Some(self.initializer()?) } else { None };
            out.push(VarDecl { name, ty, init, span });
            if self.eat_punct(";") {
                return Ok(out);
            }
            self.expect_punct(",")?;
        }
    }

    fn initializer(&mut self) -> PResult<Init> {
        if self.is_punct("*") && matches!(self.peek_at(1), Tok::Punct(";") | Tok::Punct(",")) {
            self.bump();
            return Ok(Init::Nondet);
        }
        if self.is_punct("{") {
            return Err(FrontendError::unsupported(self.span(), "array"));
        }
        if let Some((name, args)) = self.try_user_call()? {
            return Ok(Init::Call { name, args });
        }
        Ok(Init::Expr(self.expr()?))
    }

    /// Parses `f(args)` when `f` is not a nondet builtin.
    fn try_user_call(&mut self) -> PResult<Option<(String, Vec<AExpr>)>> {
        if let (Tok::Ident(name), Tok::Punct("(")) = (self.peek().clone(), self.peek_at(1).clone()) {
            if nondet_builtin(&name).is_none() {
                self.reject_unsupported_token()?;
                let span = self.span();
                self.bump();
                let args = self.call_args()?;
                if !matches!(self.peek(), Tok::Punct(";") | Tok::Punct(",")) {
                    return Err(FrontendError::unsupported(span, "function call inside expression"));
                }
                return Ok(Some((name, args)));
            }
        }
        Ok(None)
    }

    fn call_args(&mut self) -> PResult<Vec<AExpr>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(args);
        }
        loop {
            self.reject_unsupported_token()?;
            args.push(self.expr()?);
            if self.eat_punct(")") {
                return Ok(args);
            }
            self.expect_punct(",")?;
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        self.reject_unsupported_token()?;
        let span = self.span();
        if self.is_punct("{") {
            return Ok(Stmt::Block(self.block()?));
        }
        if self.eat_punct(";") {
            return Ok(Stmt::Empty { span });
        }
        if self.starts_type() {
            let ty = self
                .type_spec()?
                .ok_or_else(|| FrontendError::semantic(span, "variable of type void"))?;
            self.reject_pointer()?;
            let (name, nspan) = self.ident()?;
            if self.is_punct("(") {
                return Err(FrontendError::unsupported(nspan, "nested function"));
            }
            return Ok(Stmt::Decl(self.declarators_after_first(ty, name, nspan)?));
        }
        let word = match self.peek() {
            Tok::Ident(w) => Some(w.clone()),
            _ => None,
        };
        match word.as_deref() {
            Some("if") => {
                self.bump();
                let cond = self.paren_expr()?;
                let then = Box::new(self.statement()?);
                let els = if self.is_word("else") {
                    self.bump();
                    Some(Box::new(self.statement()?))
                } else {
                    None
                };
                Ok(Stmt::If { cond, then, els, span })
            }
            Some("while") => {
                self.bump();
                let cond = self.paren_expr()?;
                let body = Box::new(self.statement()?);
                Ok(Stmt::While { cond, body, span })
            }
            Some("do") => {
                self.bump();
                let body = Box::new(self.statement()?);
                if !self.is_word("while") {
                    return Err(self.unexpected("`while`"));
                }
                self.bump();
                let cond = self.paren_expr()?;
                self.expect_punct(";")?;
                Ok(Stmt::DoWhile { body, cond, span })
            }
            Some("for") => {
                self.bump();
                self.expect_punct("(")?;
                let init = if self.eat_punct(";") {
                    Vec::new()
                } else if self.starts_type() {
                    let dspan = self.span();
                    let ty = self
                        .type_spec()?
                        .ok_or_else(|| FrontendError::semantic(dspan, "variable of type void"))?;
                    let (name, nspan) = self.ident()?;
                    vec![Stmt::Decl(self.declarators_after_first(ty, name, nspan)?)]
                } else {
                    let list = self.simple_list()?;
                    self.expect_punct(";")?;
                    list
                };
                let cond = if self.is_punct(";") { None } else { Some(self.expr()?) };
                self.expect_punct(";")?;
                let step = if self.is_punct(")") { Vec::new() } else { self.simple_list()? };
                self.expect_punct(")")?;
                let body = Box::new(self.statement()?);
                Ok(Stmt::For { init, cond, step, body, span })
            }
            Some("return") => {
                self.bump();
                let value = if self.is_punct(";") { None } else { Some(self.expr()?) };
                self.expect_punct(";")?;
                Ok(Stmt::Return { value, span })
            }
            Some("break") => {
                self.bump();
                self.expect_punct(";")?;
                Ok(Stmt::Break { span })
            }
            Some("continue") => {
                self.bump();
                self.expect_punct(";")?;
                Ok(Stmt::Continue { span })
            }
            Some("else") => Err(FrontendError::syntax(span, "`else` without `if`")),
            _ => {
                if matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Punct(":")) {
                    return Err(FrontendError::unsupported(span, "goto"));
                }
                let s = self.simple()?;
                self.expect_punct(";")?;
                Ok(s)
            }
        }
    }

    fn simple_list(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = vec![self.simple()?];
        while self.eat_punct(",") {
            out.push(self.simple()?);
        }
        Ok(out)
    }

    /// Assignment, increment, or call statement (without the trailing `;`).
    fn simple(&mut self) -> PResult<Stmt> {
        self.reject_unsupported_token()?;
        let span = self.span();
        if self.is_punct("*") {
            return Err(FrontendError::unsupported(span, "pointer"));
        }
        if self.is_punct("++") || self.is_punct("--") {
            let increment = self.is_punct("++");
            self.bump();
            let (target, _) = self.ident()?;
            return Ok(Stmt::Step { target, increment, span });
        }
        let (name, _) = self.ident()?;
        if self.is_punct("(") {
            if is_assert(&name) {
                let mut args = self.call_args()?;
                if args.len() != 1 {
                    return Err(FrontendError::syntax(span, "assert takes one argument"));
                }
                return Ok(Stmt::Assert { cond: args.remove(0), span });
            }
            if let Some(kind) = assume_builtin(&name) {
                let mut args = self.call_args()?;
                if args.len() != 1 {
                    return Err(FrontendError::syntax(span, "assume takes one argument"));
                }
                return Ok(Stmt::Assume { cond: args.remove(0), kind, span });
            }
            if name == "__VERIFIER_error" {
                let args = self.call_args()?;
                if !args.is_empty() {
                    return Err(FrontendError::syntax(span, "__VERIFIER_error takes no arguments"));
                }
                return Ok(Stmt::Error { span });
            }
            let args = self.call_args()?;
            return Ok(Stmt::Call { target: None, name, args, span });
        }
        if self.is_punct("[") {
            return Err(FrontendError::unsupported(self.span(), "array"));
        }
        if self.is_punct(".") || self.is_punct("->") {
            return Err(FrontendError::unsupported(self.span(), "struct"));
        }
        if self.is_punct("++") || self.is_punct("--") {
            let increment = self.is_punct("++");
            self.bump();
            return Ok(Stmt::Step { target: name, increment, span });
        }
        let op = match self.peek() {
            Tok::Punct("=") => None,
            Tok::Punct("+=") => Some(BinOp::Add),
            Tok::Punct("-=") => Some(BinOp::Sub),
            Tok::Punct("*=") => Some(BinOp::Mul),
            Tok::Punct("/=") => Some(BinOp::Div),
            Tok::Punct("%=") => Some(BinOp::Rem),
            Tok::Punct("&=") => Some(BinOp::BitAnd),
            Tok::Punct("|=") => Some(BinOp::BitOr),
            Tok::Punct("^=") => Some(BinOp::BitXor),
            Tok::Punct("<<=") => Some(BinOp::Shl),
            Tok::Punct(">>=") => Some(BinOp::Shr),
            _ => return Err(self.unexpected("assignment")),
        };
        self.bump();
        if op.is_none() {
            if let Some((callee, args)) = self.try_user_call()? {
                return Ok(Stmt::Call { target: Some(name), name: callee, args, span });
            }
        }
        let value = self.expr()?;
        Ok(Stmt::Assign { target: name, op, value, span })
    }

    fn paren_expr(&mut self) -> PResult<AExpr> {
        self.expect_punct("(")?;
        let e = self.expr()?;
        self.expect_punct(")")?;
        Ok(e)
    }

    pub fn expr(&mut self) -> PResult<AExpr> {
        let cond = self.binary(1)?;
        if self.is_punct("?") {
            let span = self.bump().span;
            let a = self.expr()?;
            self.expect_punct(":")?;
            let b = self.expr()?;
            return Ok(AExpr::new(AExprKind::Ternary(Box::new(cond), Box::new(a), Box::new(b)), span));
        }
        if matches!(self.peek(), Tok::Punct(p) if p.ends_with('=') && !matches!(*p, "==" | "!=" | "<=" | ">=")) {
            return Err(FrontendError::unsupported(self.span(), "assignment inside expression"));
        }
        Ok(cond)
    }

    fn binop_at(&self, level: u8) -> Option<BinOp> {
        let op = match self.peek() {
            Tok::Punct(p) => match *p {
                "||" => BinOp::LogOr,
                "&&" => BinOp::LogAnd,
                "|" => BinOp::BitOr,
                "^" => BinOp::BitXor,
                "&" => BinOp::BitAnd,
                "==" => BinOp::Eq,
                "!=" => BinOp::Ne,
                "<" => BinOp::Lt,
                "<=" => BinOp::Le,
                ">" => BinOp::Gt,
                ">=" => BinOp::Ge,
                "<<" => BinOp::Shl,
                ">>" => BinOp::Shr,
                "+" => BinOp::Add,
                "-" => BinOp::Sub,
                "*" => BinOp::Mul,
                "/" => BinOp::Div,
                "%" => BinOp::Rem,
                _ => return None,
            },
            _ => return None,
        };
        (op.precedence() == level).then_some(op)
    }

    fn binary(&mut self, level: u8) -> PResult<AExpr> {
        if level > 10 {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self.binop_at(level) {
            let span = self.bump().span;
            let rhs = self.binary(level + 1)?;
            lhs = AExpr::new(AExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<AExpr> {
        self.reject_unsupported_token()?;
        let span = self.span();
        let op = match self.peek() {
            Tok::Punct("-") => Some(UnOp::Neg),
            Tok::Punct("~") => Some(UnOp::BitNot),
            Tok::Punct("!") => Some(UnOp::LogNot),
            Tok::Punct("+") => {
                self.bump();
                return self.unary();
            }
            Tok::Punct("*") => {
                if matches!(self.peek_at(1), Tok::Punct(";") | Tok::Punct(")") | Tok::Punct(",")) {
                    self.bump();
                    return Ok(AExpr::new(AExprKind::Nondet(NondetKind::Star), span));
                }
                return Err(FrontendError::unsupported(span, "pointer"));
            }
            Tok::Punct("&") => return Err(FrontendError::unsupported(span, "pointer")),
            Tok::Punct("++") | Tok::Punct("--") => {
                return Err(FrontendError::unsupported(span, "increment inside expression"))
            }
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let e = self.unary()?;
            return Ok(AExpr::new(AExprKind::Unary(op, Box::new(e)), span));
        }
        if self.is_punct("(") && self.type_follows() {
            self.bump();
            let ty = self
                .type_spec()?
                .ok_or_else(|| FrontendError::semantic(span, "cast to void"))?;
            self.reject_pointer()?;
            self.expect_punct(")")?;
            let e = self.unary()?;
            return Ok(AExpr::new(AExprKind::Cast(ty, Box::new(e)), span));
        }
        self.postfix()
    }

    fn type_follows(&self) -> bool {
        match self.peek_at(1) {
            Tok::Ident(w) => {
                TYPE_WORDS.contains(&w.as_str())
                    || QUALIFIERS.contains(&w.as_str())
                    || w == "void"
                    || TYPEDEFS.iter().any(|(n, _)| n == w)
                    || matches!(w.as_str(), "float" | "double" | "struct" | "union" | "enum" | "_Bool")
            }
            _ => false,
        }
    }

    fn postfix(&mut self) -> PResult<AExpr> {
        let e = self.primary()?;
        let span = self.span();
        match self.peek() {
            Tok::Punct("[") => Err(FrontendError::unsupported(span, "array")),
            Tok::Punct(".") | Tok::Punct("->") => Err(FrontendError::unsupported(span, "struct")),
            Tok::Punct("++") | Tok::Punct("--") => {
                Err(FrontendError::unsupported(span, "increment inside expression"))
            }
            _ => Ok(e),
        }
    }

    fn primary(&mut self) -> PResult<AExpr> {
        self.reject_unsupported_token()?;
        let span = self.span();
        match self.peek().clone() {
            Tok::Int { value, unsigned } => {
                self.bump();
                Ok(AExpr::new(AExprKind::Int { value, unsigned }, span))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.is_punct("(") {
                    if let Some(kind) = nondet_builtin(&name) {
                        let args = self.call_args()?;
                        if !args.is_empty() {
                            return Err(FrontendError::syntax(span, "nondet functions take no arguments"));
                        }
                        return Ok(AExpr::new(AExprKind::Nondet(kind), span));
                    }
                    return Err(FrontendError::unsupported(span, "function call inside expression"));
                }
                Ok(AExpr::new(AExprKind::Var(name), span))
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}
