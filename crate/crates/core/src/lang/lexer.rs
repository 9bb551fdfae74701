use alloc::string::String;
use alloc::vec::Vec;

use super::parser::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    Str(String),
    Ident(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

// Longest first. Anything outside the modeled operator set is still lexed so
// the parser can name it in an "unsupported construct" error.
const PUNCTUATORS: &[&str] = &[
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=", "=>", "==",
    "!=", "<=", ">=", "&&", "||", "??", "?.", "++", "--", "**", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "<<", ">>", "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-",
    "*", "/", "%", "&", "|", "^", "!", "~", "?", ":", "=", ".", "@", "#",
];

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = src[i..].chars().next().unwrap();
        if c.is_whitespace() || c == '\u{FEFF}' {
            i += c.len_utf8();
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            match src[i + 2..].find("*/") {
                Some(end) => i += end + 4,
                None => return Err(ParseError::syntax("unterminated comment", src, i)),
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit())) {
            let (value, len) = lex_number(src, i)?;
            i += len;
            out.push(Token { tok: Tok::Num(value), start, end: i });
            continue;
        }
        if c == '"' || c == '\'' {
            let (value, len) = lex_string(src, i, c)?;
            i += len;
            out.push(Token { tok: Tok::Str(value), start, end: i });
            continue;
        }
        if c == '`' {
            return Err(ParseError::unsupported("template literal", src, i));
        }
        if c == '_' || c == '$' || c.is_alphabetic() {
            while i < bytes.len() {
                let d = src[i..].chars().next().unwrap();
                if d == '_' || d == '$' || d.is_alphanumeric() {
                    i += d.len_utf8();
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(String::from(&src[start..i])), start, end: i });
            continue;
        }
        match PUNCTUATORS.iter().find(|p| src[i..].starts_with(**p)) {
            Some(p) => {
                i += p.len();
                out.push(Token { tok: Tok::Punct(p), start, end: i });
            }
            None => {
                return Err(ParseError::syntax(
                    &alloc::format!("unexpected character `{c}`"),
                    src,
                    i,
                ))
            }
        }
    }
    out.push(Token { tok: Tok::Eof, start: bytes.len(), end: bytes.len() });
    Ok(out)
}

fn lex_number(src: &str, start: usize) -> Result<(f64, usize), ParseError> {
    let b = src.as_bytes();
    let mut i = start;
    if b[i] == b'0' && matches!(b.get(i + 1), Some(b'x' | b'X' | b'o' | b'O' | b'b' | b'B')) {
        let radix = match b[i + 1] {
            b'x' | b'X' => 16,
            b'o' | b'O' => 8,
            _ => 2,
        };
        i += 2;
        let digits_start = i;
        while i < b.len() && (b[i] as char).is_digit(radix) {
            i += 1;
        }
        if i == digits_start {
            return Err(ParseError::syntax("malformed numeric literal", src, start));
        }
        let mut acc = 0.0f64;
        for d in src[digits_start..i].chars() {
            acc = acc * radix as f64 + d.to_digit(radix).unwrap() as f64;
        }
        return finish_number(src, start, i, acc);
    }
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let exp_start = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j == exp_start {
            return Err(ParseError::syntax("malformed numeric literal", src, start));
        }
        i = j;
    }
    let value = src[start..i]
        .parse::<f64>()
        .map_err(|_| ParseError::syntax("malformed numeric literal", src, start))?;
    finish_number(src, start, i, value)
}

fn finish_number(src: &str, start: usize, end: usize, value: f64) -> Result<(f64, usize), ParseError> {
    // `3in`, `1abc`: an identifier may not start right after a numeric literal.
    if let Some(c) = src[end..].chars().next() {
        if c == '_' || c == '$' || c.is_alphanumeric() {
            return Err(ParseError::syntax("identifier starts immediately after numeric literal", src, end));
        }
    }
    Ok((value, end - start))
}

fn lex_string(src: &str, start: usize, quote: char) -> Result<(String, usize), ParseError> {
    let mut out = String::new();
    let mut chars = src[start + 1..].char_indices();
    while let Some((off, c)) = chars.next() {
        match c {
            c if c == quote => return Ok((out, off + 2)),
            '\n' | '\r' => break,
            '\\' => {
                let Some((_, e)) = chars.next() else { break };
                match e {
                    'n' => out.push('\n'),
                    't' => out.push('\t'),
                    'r' => out.push('\r'),
                    'b' => out.push('\u{8}'),
                    'f' => out.push('\u{C}'),
                    'v' => out.push('\u{B}'),
                    '0' => out.push('\0'),
                    'x' => {
                        let code = take_hex(&mut chars, 2)
                            .ok_or_else(|| ParseError::syntax("malformed \\x escape", src, start + 1 + off))?;
                        out.push(char::from_u32(code).unwrap_or('\u{FFFD}'));
                    }
                    'u' => {
                        let code = take_hex(&mut chars, 4)
                            .ok_or_else(|| ParseError::syntax("malformed \\u escape", src, start + 1 + off))?;
                        out.push(char::from_u32(code).unwrap_or('\u{FFFD}'));
                    }
                    '\n' => {}
                    other => out.push(other),
                }
            }
            c => out.push(c),
        }
    }
    Err(ParseError::syntax("unterminated string literal", src, start))
}

fn take_hex(chars: &mut core::str::CharIndices<'_>, n: usize) -> Option<u32> {
    let mut code = 0;
    for _ in 0..n {
        let (_, h) = chars.next()?;
        code = code * 16 + h.to_digit(16)?;
    }
    Some(code)
}
