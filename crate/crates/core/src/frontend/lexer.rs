use super::ast::Span;
use super::error::FrontendError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int { value: u64, unsigned: bool },
    Float,
    Str,
    Hash,
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const PUNCTS: &[&str] = &[
    "<<=", ">>=", "...", "&&", "||", "==", "!=", "<=", ">=", "<<", ">>", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "->", "+", "-", "*", "/", "%", "&", "|", "^", "~", "!",
    "<", ">", "=", "(", ")", "{", "}", "[", "]", ";", ",", "?", ":", ".",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, FrontendError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! advance {
        ($n:expr) => {
            for _ in 0..$n {
                if bytes[i] == b'\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        };
    }

    while i < bytes.len() {
        let c = bytes[i];
        let span = Span::new(line, col);
        if c.is_ascii_whitespace() {
            advance!(1);
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                advance!(1);
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            advance!(2);
            loop {
                if i >= bytes.len() {
                    return Err(FrontendError::syntax(span, "unterminated block comment"));
                }
                if src[i..].starts_with("*/") {
                    advance!(2);
                    break;
                }
                advance!(1);
            }
            continue;
        }
        if c == b'#' {
            out.push(Token { tok: Tok::Hash, span });
            advance!(1);
            continue;
        }
        if c == b'"' {
            advance!(1);
            while i < bytes.len() && bytes[i] != b'"' && bytes[i] != b'\n' {
                if bytes[i] == b'\\' && i + 1 < bytes.len() {
                    advance!(1);
                }
                advance!(1);
            }
            if i < bytes.len() && bytes[i] == b'"' {
                advance!(1);
            }
            out.push(Token { tok: Tok::Str, span });
            continue;
        }
        if c == b'\'' {
            advance!(1);
            let value = match bytes.get(i) {
                Some(b'\\') => {
                    advance!(1);
                    let v = match bytes.get(i) {
                        Some(b'n') => b'\n',
                        Some(b't') => b'\t',
                        Some(b'0') => 0,
                        Some(b'\\') => b'\\',
                        Some(b'\'') => b'\'',
                        _ => return Err(FrontendError::syntax(span, "bad character escape")),
                    };
                    advance!(1);
                    v
                }
                Some(&b) if b != b'\'' && b != b'\n' => {
                    advance!(1);
                    b
                }
                _ => return Err(FrontendError::syntax(span, "bad character literal")),
            };
            if bytes.get(i) != Some(&b'\'') {
                return Err(FrontendError::syntax(span, "unterminated character literal"));
            }
            advance!(1);
            out.push(Token { tok: Tok::Int { value: value as u64, unsigned: false }, span });
            continue;
        }
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()))
        {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'.' || bytes[i] == b'_') {
                // exponent signs belong to float literals
                if (bytes[i] == b'e' || bytes[i] == b'E')
                    && !src[start..i].starts_with("0x")
                    && matches!(bytes.get(i + 1), Some(b'+') | Some(b'-'))
                {
                    advance!(1);
                }
                advance!(1);
            }
            let text = &src[start..i];
            out.push(Token { tok: lex_number(text, span)?, span });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                advance!(1);
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), span });
            continue;
        }
        if let Some(p) = PUNCTS.iter().find(|p| src[i..].starts_with(**p)) {
            out.push(Token { tok: Tok::Punct(p), span });
            advance!(p.len());
            continue;
        }
        let ch = src[i..].chars().next().unwrap_or('?');
        return Err(FrontendError::syntax(span, format!("unexpected character `{ch}`")));
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(line, col) });
    Ok(out)
}

fn lex_number(text: &str, span: Span) -> Result<Tok, FrontendError> {
    let lower = text.to_ascii_lowercase();
    let is_hex = lower.starts_with("0x");
    if !is_hex && (lower.contains('.') || lower.contains('e') || lower.ends_with('f')) {
        return Ok(Tok::Float);
    }
    let digits_end = lower
        .char_indices()
        .skip(if is_hex { 2 } else { 0 })
        .find(|(_, ch)| if is_hex { !ch.is_ascii_hexdigit() } else { !ch.is_ascii_digit() })
        .map(|(idx, _)| idx)
        .unwrap_or(lower.len());
    let (digits, suffix) = lower.split_at(digits_end);
    if !suffix.chars().all(|ch| ch == 'u' || ch == 'l') || suffix.matches('u').count() > 1 {
        return Err(FrontendError::syntax(span, format!("malformed integer literal `{text}`")));
    }
    let value = if is_hex {
        u64::from_str_radix(&digits[2..], 16)
    } else if digits.len() > 1 && digits.starts_with('0') {
        u64::from_str_radix(&digits[1..], 8)
    } else {
        digits.parse::<u64>()
    }
    .map_err(|_| FrontendError::syntax(span, format!("malformed integer literal `{text}`")))?;
    if value > u32::MAX as u64 {
        return Err(FrontendError::unsupported(span, "integer literal wider than 32 bits"));
    }
    let unsigned = suffix.contains('u') || (value > i32::MAX as u64);
    Ok(Tok::Int { value, unsigned })
}
