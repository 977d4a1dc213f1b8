//! Translation of invariant comments of the form
//! `// P(vars) {c1, c2, ...}` into `__ESBMC_assume` statements.
//!
//! A constraint may mention `v#init`, the value of `v` on entry to the
//! enclosing function; the translator declares a snapshot `T v_init = v;` for
//! each such variable.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::{Captures, Regex};
use thiserror::Error;

use crate::frontend::ast::{Block, FunctionDef, Program, Stmt};
use crate::frontend::{parse_expression, parse_program, pretty::type_name, FrontendError};
use crate::types::IntType;

static COMMENT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"//\s*P\(([^)]*)\)\s*\{([^}]*)\}").expect("valid regex"));
static COMMENT_START: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"//\s*P\(").expect("valid regex"));
static INIT_MARKER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([a-zA-Z0-9_]+)#init").expect("valid regex"));
static IMPLICIT_MUL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(\d+)([A-Za-z_][A-Za-z0-9_]*)").expect("valid regex"));
static LITERAL_SUFFIX: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[uUlL]+$").expect("valid regex"));
static HEX_TAIL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[xX][0-9a-fA-F]+[uUlL]*$").expect("valid regex"));

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PipsError {
    #[error("line {line}: malformed invariant comment `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: `{var}#init` does not name a variable of the enclosing function")]
    UnknownVariable { line: usize, var: String },
    #[error("line {line}: invariant comment outside any function")]
    OutsideFunction { line: usize },
    #[error("constraint `{raw}` rewritten to `{rewritten}` does not parse: {message}")]
    Unparseable { raw: String, rewritten: String, message: String },
    #[error("source does not parse: {0}")]
    Source(String),
}

/// One invariant comment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipsComment {
    /// 1-based line.
    pub line: usize,
    pub raw: String,
    pub constraints: Vec<String>,
}

impl PipsComment {
    fn parse(line: usize, text: &str) -> Option<(PipsComment, std::ops::Range<usize>)> {
        let c = COMMENT.captures(text)?;
        let whole = c.get(0).expect("group 0");
        let constraints = c[2].split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        Some((PipsComment { line, raw: whole.as_str().to_string(), constraints }, whole.range()))
    }
}

/// Result of scanning: marked variables by line, plus malformed comments
/// that were skipped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Markers {
    pub by_line: BTreeMap<usize, Vec<String>>,
    pub skipped: Vec<PipsError>,
}

/// Every invariant comment, in source order; malformed ones are reported.
pub fn scan_comments(source: &str) -> (Vec<PipsComment>, Vec<PipsError>) {
    let mut out = Vec::new();
    let mut bad = Vec::new();
    for (i, text) in source.lines().enumerate() {
        match PipsComment::parse(i + 1, text) {
            Some((c, _)) => out.push(c),
            None if COMMENT_START.is_match(text) => {
                bad.push(PipsError::Malformed { line: i + 1, text: text.trim().to_string() })
            }
            None => {}
        }
    }
    (out, bad)
}

/// Lines whose invariant comment uses `v#init`, with the variables marked.
pub fn scan_init_markers(source: &str) -> Markers {
    let (comments, skipped) = scan_comments(source);
    let mut by_line = BTreeMap::new();
    for c in comments {
        let mut vars: Vec<String> = Vec::new();
        for cons in &c.constraints {
            for m in INIT_MARKER.captures_iter(cons) {
                let v = m[1].to_string();
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        if !vars.is_empty() {
            by_line.insert(c.line, vars);
        }
    }
    Markers { by_line, skipped }
}

fn line_starts(source: &str) -> Vec<usize> {
    let mut starts = vec![0];
    for (i, b) in source.bytes().enumerate() {
        if b == b'\n' {
            starts.push(i + 1);
        }
    }
    starts
}

fn block_decl(b: &Block, name: &str) -> Option<IntType> {
    let mut found = None;
    for s in &b.stmts {
        s.walk(&mut |st| {
            if let Stmt::Decl(ds) = st {
                for d in ds {
                    if d.name == name && found.is_none() {
                        found = Some(d.ty);
                    }
                }
            }
            if let Stmt::For { init, .. } = st {
                for i in init {
                    if let Stmt::Decl(ds) = i {
                        for d in ds {
                            if d.name == name && found.is_none() {
                                found = Some(d.ty);
                            }
                        }
                    }
                }
            }
        });
    }
    found
}

fn declared_type(p: &Program, f: &FunctionDef, name: &str) -> Option<IntType> {
    f.params
        .iter()
        .find(|q| q.name == name)
        .map(|q| q.ty)
        .or_else(|| block_decl(&f.body, name))
        .or_else(|| p.globals.iter().find(|g| g.name == name).map(|g| g.ty))
}

/// The function whose body spans `line`.
fn enclosing<'a>(p: &'a Program, line: usize) -> Option<&'a FunctionDef> {
    p.functions
        .iter()
        .find(|f| (f.body.open.line as usize) <= line && line <= f.body.close.line as usize)
}

/// Declares `T v_init = v;` at the start of every function containing a
/// marked line, one per marked variable in order of first marking.
pub fn synthesize_snapshots(source: &str, markers: &Markers) -> Result<String, PipsError> {
    if markers.by_line.is_empty() {
        return Ok(source.to_string());
    }
    let p = parse_program("<invariants>", source).map_err(|e: FrontendError| PipsError::Source(e.to_string()))?;
    // brace offset -> snapshot declarations
    let mut per_function: BTreeMap<usize, (String, Vec<String>)> = BTreeMap::new();
    let starts = line_starts(source);
    for (&line, vars) in &markers.by_line {
        let f = enclosing(&p, line).ok_or(PipsError::OutsideFunction { line })?;
        let open = starts[f.body.open.line as usize - 1] + f.body.open.col as usize - 1;
        let entry = per_function.entry(open).or_insert_with(|| (f.name.clone(), Vec::new()));
        for v in vars {
            let ty = declared_type(&p, f, v).ok_or_else(|| PipsError::UnknownVariable { line, var: v.clone() })?;
            let decl = format!("{} {v}_init = {v};", type_name(ty));
            if !entry.1.contains(&decl) {
                entry.1.push(decl);
            }
        }
    }
    let mut out = String::with_capacity(source.len() + 64);
    let mut last = 0;
    for (open, (_, decls)) in &per_function {
        debug_assert_eq!(source.as_bytes()[*open], b'{');
        out.push_str(&source[last..=*open]);
        for d in decls {
            out.push_str("\n    ");
            out.push_str(d);
        }
        last = open + 1;
    }
    out.push_str(&source[last..]);
    Ok(out)
}

/// Makes a constraint valid C: `2j` becomes `2*j` and `v#init` becomes
/// `v_init`. Literal suffixes (`10u`) and hexadecimal literals are kept.
pub fn rewrite_expression(raw: &str) -> Result<String, PipsError> {
    let replaced = IMPLICIT_MUL.replace_all(raw, |c: &Captures| {
        let digits = &c[1];
        let tail = &c[2];
        if LITERAL_SUFFIX.is_match(tail) || (digits == "0" && HEX_TAIL.is_match(tail)) {
            c[0].to_string()
        } else {
            format!("{digits}*{tail}")
        }
    });
    let rewritten = replaced.replace("#init", "_init");
    parse_expression(&rewritten).map_err(|e| PipsError::Unparseable {
        raw: raw.to_string(),
        rewritten: rewritten.clone(),
        message: e.to_string(),
    })?;
    Ok(rewritten)
}

/// Replaces every invariant comment with `__ESBMC_assume(c1 && ... && cn);`
/// after declaring the snapshots it needs. Comments without constraints are
/// removed.
pub fn translate_invariants(source: &str) -> Result<String, PipsError> {
    let markers = scan_init_markers(source);
    if let Some(e) = markers.skipped.first() {
        return Err(e.clone());
    }
    let with_snapshots = synthesize_snapshots(source, &markers)?;
    let mut out = String::with_capacity(with_snapshots.len());
    for (i, text) in with_snapshots.split_inclusive('\n').enumerate() {
        match PipsComment::parse(i + 1, text) {
            Some((c, range)) => {
                let parts = c.constraints.iter().map(|r| rewrite_expression(r)).collect::<Result<Vec<_>, _>>()?;
                out.push_str(&text[..range.start]);
                if !parts.is_empty() {
                    out.push_str(&format!("__ESBMC_assume({});", parts.join(" && ")));
                }
                out.push_str(&text[range.end..]);
            }
            None => out.push_str(text),
        }
    }
    Ok(out)
}
