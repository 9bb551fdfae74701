//! Recursive-descent parser for the expression subset, plus the
//! `function f(..) { return e; } console.log(f(..));` wrapper form.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::ast::{BinaryOp, Expr, ExprKind, FunctionHeader, Program, Span, UnaryOp};
use super::lexer::{tokenize, Tok, Token};
use super::unparse;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    /// Valid JavaScript outside the modeled subset; names the construct.
    Unsupported(String),
    Empty,
}

/// A parse failure with its byte offset and 1-based line/column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error at {}:{}: {msg}", self.line, self.column),
            ParseErrorKind::Unsupported(what) => {
                write!(f, "unsupported construct at {}:{}: {what}", self.line, self.column)
            }
            ParseErrorKind::Empty => f.write_str("empty source"),
        }
    }
}

impl ParseError {
    fn at(kind: ParseErrorKind, src: &str, offset: usize) -> Self {
        let offset = offset.min(src.len());
        let before = &src[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError { kind, offset, line, column }
    }

    pub(crate) fn syntax(msg: &str, src: &str, offset: usize) -> Self {
        Self::at(ParseErrorKind::Syntax(msg.to_string()), src, offset)
    }

    pub(crate) fn unsupported(what: &str, src: &str, offset: usize) -> Self {
        Self::at(ParseErrorKind::Unsupported(what.to_string()), src, offset)
    }

    pub fn is_unsupported(&self) -> bool {
        matches!(self.kind, ParseErrorKind::Unsupported(_))
    }
}

/// Parses a program: a bare expression, optionally wrapped in
/// `console.log(...)`, or one function declaration followed by a single
/// call of it. Calls are inlined so the result is always closed.
pub fn parse(source: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(source)?;
    if matches!(tokens[0].tok, Tok::Eof) {
        return Err(ParseError::at(ParseErrorKind::Empty, source, 0));
    }
    let mut p = Parser { src: source, tokens, pos: 0, params: None };

    if p.peek_ident("function") {
        let header = p.function_decl()?;
        let call_start = p.peek().start;
        let logged = p.open_console_log()?;
        let args = p.call_of(&header)?;
        if logged {
            p.expect(")")?;
        }
        p.eat(";");
        p.expect_eof()?;
        let inlined = inline_call(&header, args, source, call_start)?;
        let text = unparse(&inlined);
        let expr = parse_expr(&text).expect("canonical rendering always parses");
        return Ok(Program::new(expr, text, Some(header)));
    }

    let logged = p.open_console_log()?;
    let expr = p.expression()?;
    if logged {
        p.expect(")")?;
    }
    p.eat(";");
    p.expect_eof()?;
    Ok(Program::new(expr, source.to_string(), None))
}

/// Parses a single bare expression (no wrapper forms).
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(source)?;
    if matches!(tokens[0].tok, Tok::Eof) {
        return Err(ParseError::at(ParseErrorKind::Empty, source, 0));
    }
    let mut p = Parser { src: source, tokens, pos: 0, params: None };
    let e = p.expression()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser<'s> {
    src: &'s str,
    tokens: Vec<Token>,
    pos: usize,
    /// Parameter names while parsing a function body.
    params: Option<Vec<String>>,
}

fn node(kind: ExprKind, span: Span) -> Expr {
    let mut e = Expr::new(kind);
    e.span = span;
    e
}

impl<'s> Parser<'s> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].end
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek().tok, Tok::Punct(q) if q == p)
    }

    fn peek_ident(&self, name: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == name)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<Token, ParseError> {
        if self.is_punct(p) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&format!("expected `{p}`")))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Token), ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => Ok((s, self.bump())),
            _ => Err(self.unexpected("expected an identifier")),
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        let after_semicolon = self.pos > 0 && matches!(self.tokens[self.pos - 1].tok, Tok::Punct(";"));
        match &self.peek().tok {
            Tok::Eof => Ok(()),
            Tok::Punct(";") => Err(ParseError::unsupported("multiple statements", self.src, self.peek().start)),
            _ if after_semicolon => Err(ParseError::unsupported("multiple statements", self.src, self.peek().start)),
            Tok::Punct(p) if is_unsupported_operator(p) => Err(self.unsupported_operator(p)),
            _ => Err(self.unexpected("expected end of input")),
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let t = self.peek();
        let found = match &t.tok {
            Tok::Eof => String::from("end of input"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(_) | Tok::Str(_) => format!("`{}`", &self.src[t.start..t.end]),
        };
        ParseError::syntax(&format!("{what}, found {found}"), self.src, t.start)
    }

    fn unsupported_operator(&self, op: &str) -> ParseError {
        let what = match op {
            "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "**=" | "<<=" | ">>=" | ">>>=" | "&=" | "|="
            | "^=" | "&&=" | "||=" | "??=" => format!("assignment `{op}`"),
            "=>" => String::from("arrow function"),
            "?." => String::from("optional chaining `?.`"),
            "..." => String::from("spread `...`"),
            _ => format!("operator `{op}`"),
        };
        ParseError::unsupported(&what, self.src, self.peek().start)
    }

    /// Consumes `console.log(` if present.
    fn open_console_log(&mut self) -> Result<bool, ParseError> {
        if self.peek_ident("console") && matches!(self.peek_at(1).tok, Tok::Punct(".")) {
            self.bump();
            self.bump();
            let (name, tok) = self.expect_ident()?;
            if name != "log" {
                return Err(ParseError::unsupported(&format!("console.{name}"), self.src, tok.start));
            }
            self.expect("(")?;
            return Ok(true);
        }
        Ok(false)
    }

    fn function_decl(&mut self) -> Result<FunctionHeader, ParseError> {
        self.bump(); // `function`
        let (name, _) = self.expect_ident()?;
        self.expect("(")?;
        let mut params = Vec::new();
        while !self.is_punct(")") {
            let (p, tok) = self.expect_ident()?;
            if params.contains(&p) {
                return Err(ParseError::syntax("duplicate parameter name", self.src, tok.start));
            }
            params.push(p);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        self.expect("{")?;
        if !self.peek_ident("return") {
            return Err(ParseError::unsupported(
                "function body other than a single return statement",
                self.src,
                self.peek().start,
            ));
        }
        self.bump();
        self.params = Some(params.clone());
        let body = self.expression()?;
        self.params = None;
        self.eat(";");
        if !self.is_punct("}") {
            return Err(ParseError::unsupported(
                "function body other than a single return statement",
                self.src,
                self.peek().start,
            ));
        }
        self.bump();
        Ok(FunctionHeader { name, params, body })
    }

    fn call_of(&mut self, header: &FunctionHeader) -> Result<Vec<Expr>, ParseError> {
        let (name, tok) = self.expect_ident()?;
        if name != header.name {
            return Err(ParseError::syntax(
                &format!("expected a call of `{}`", header.name),
                self.src,
                tok.start,
            ));
        }
        self.expect("(")?;
        let mut args = Vec::new();
        while !self.is_punct(")") {
            args.push(self.conditional()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(args)
    }

    fn expression(&mut self) -> Result<Expr, ParseError> {
        let e = self.conditional()?;
        if self.is_punct(",") {
            return Err(ParseError::unsupported("comma operator", self.src, self.peek().start));
        }
        if let Tok::Punct(p) = self.peek().tok {
            if is_unsupported_operator(p) {
                return Err(self.unsupported_operator(p));
            }
        }
        Ok(e)
    }

    fn conditional(&mut self) -> Result<Expr, ParseError> {
        let cond = self.short_circuit()?;
        if self.eat("?") {
            let then = self.conditional()?;
            self.expect(":")?;
            let other = self.conditional()?;
            let span = cond.span.to(other.span);
            return Ok(node(
                ExprKind::Conditional(Box::new(cond), Box::new(then), Box::new(other)),
                span,
            ));
        }
        Ok(cond)
    }

    /// `||` chains and `??` chains, which may not be mixed unparenthesized.
    fn short_circuit(&mut self) -> Result<Expr, ParseError> {
        let (first, had_and) = self.logical_and()?;
        if self.is_punct("??") {
            if had_and {
                return Err(self.mixed_coalesce());
            }
            let mut lhs = first;
            while self.eat("??") {
                let rhs = self.equality()?;
                lhs = binary(BinaryOp::Nullish, lhs, rhs);
            }
            if self.is_punct("||") || self.is_punct("&&") {
                return Err(self.mixed_coalesce());
            }
            return Ok(lhs);
        }
        let mut lhs = first;
        while self.eat("||") {
            let (rhs, _) = self.logical_and()?;
            lhs = binary(BinaryOp::Or, lhs, rhs);
        }
        if self.is_punct("??") {
            return Err(self.mixed_coalesce());
        }
        Ok(lhs)
    }

    fn mixed_coalesce(&self) -> ParseError {
        ParseError::syntax(
            "`??` cannot be mixed with `&&` or `||` without parentheses",
            self.src,
            self.peek().start,
        )
    }

    fn logical_and(&mut self) -> Result<(Expr, bool), ParseError> {
        let mut lhs = self.equality()?;
        let mut had_and = false;
        while self.eat("&&") {
            let rhs = self.equality()?;
            lhs = binary(BinaryOp::And, lhs, rhs);
            had_and = true;
        }
        Ok((lhs, had_and))
    }

    fn equality(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.relational()?;
        loop {
            let op = if self.eat("===") {
                BinaryOp::StrictEq
            } else if self.eat("==") {
                BinaryOp::LooseEq
            } else {
                return Ok(lhs);
            };
            let rhs = self.relational()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn relational(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.additive()?;
        loop {
            let op = if self.eat("<") {
                BinaryOp::Lt
            } else if self.eat(">=") {
                BinaryOp::Ge
            } else if self.peek_ident("instanceof") || self.peek_ident("in") {
                let Tok::Ident(kw) = self.peek().tok.clone() else { unreachable!() };
                return Err(ParseError::unsupported(&format!("operator `{kw}`"), self.src, self.peek().start));
            } else {
                return Ok(lhs);
            };
            let rhs = self.additive()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat("+") {
                BinaryOp::Add
            } else if self.eat("-") {
                BinaryOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let start = self.peek().start;
        let op = if self.peek_ident("typeof") {
            Some(UnaryOp::Typeof)
        } else if self.is_punct("!") {
            Some(UnaryOp::Not)
        } else if self.is_punct("+") {
            Some(UnaryOp::Plus)
        } else if self.is_punct("-") {
            Some(UnaryOp::Minus)
        } else {
            None
        };
        match op {
            Some(op) => {
                self.bump();
                let operand = self.unary()?;
                let span = Span::new(start, operand.span.end);
                Ok(node(ExprKind::Unary(op, Box::new(operand)), span))
            }
            None => {
                for kw in ["void", "delete", "new", "await"] {
                    if self.peek_ident(kw) {
                        return Err(ParseError::unsupported(&format!("operator `{kw}`"), self.src, start));
                    }
                }
                if let Tok::Punct(p @ ("++" | "--" | "~")) = self.peek().tok {
                    return Err(ParseError::unsupported(&format!("operator `{p}`"), self.src, start));
                }
                self.postfix()
            }
        }
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        loop {
            if self.eat("[") {
                let sub = self.expression()?;
                self.expect("]")?;
                let span = Span::new(e.span.start, self.prev_end());
                e = node(ExprKind::Index(Box::new(e), Box::new(sub)), span);
            } else if self.is_punct(".") {
                let dot = self.bump();
                let (name, _) = self.expect_ident()?;
                if name != "sort" || !self.is_punct("(") {
                    return Err(ParseError::unsupported(&format!("property access `.{name}`"), self.src, dot.start));
                }
                self.bump();
                if !self.is_punct(")") {
                    return Err(ParseError::unsupported("sort() with a comparator argument", self.src, self.peek().start));
                }
                self.bump();
                let span = Span::new(e.span.start, self.prev_end());
                e = node(ExprKind::Sort(Box::new(e)), span);
            } else if self.is_punct("(") {
                return Err(ParseError::unsupported("function call", self.src, self.peek().start));
            } else if let Tok::Punct(p @ ("++" | "--" | "?.")) = self.peek().tok {
                return Err(self.unsupported_operator(p));
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        let span = Span::new(t.start, t.end);
        match t.tok {
            Tok::Num(x) => {
                self.bump();
                Ok(node(ExprKind::Number(x), span))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(node(ExprKind::String(s), span))
            }
            Tok::Ident(name) => {
                self.bump();
                let kind = match name.as_str() {
                    "undefined" => ExprKind::Undefined,
                    "null" => ExprKind::Null,
                    "true" => ExprKind::Bool(true),
                    "false" => ExprKind::Bool(false),
                    "NaN" => ExprKind::Number(f64::NAN),
                    "Infinity" => ExprKind::Number(f64::INFINITY),
                    "function" => return Err(ParseError::unsupported("function expression", self.src, t.start)),
                    "this" | "let" | "var" | "const" | "class" | "if" | "for" | "while" | "return" => {
                        return Err(ParseError::unsupported(&format!("`{name}`"), self.src, t.start))
                    }
                    _ => match &self.params {
                        Some(ps) if ps.contains(&name) => ExprKind::Param(name),
                        _ => {
                            return Err(ParseError::unsupported(
                                &format!("free identifier `{name}`"),
                                self.src,
                                t.start,
                            ))
                        }
                    },
                };
                Ok(node(kind, span))
            }
            Tok::Punct("(") => {
                self.bump();
                let mut inner = self.expression()?;
                self.expect(")")?;
                // Parenthesized spans keep the parentheses, so quoted
                // subexpressions read the way they were typed.
                inner.span = Span::new(t.start, self.prev_end());
                Ok(inner)
            }
            Tok::Punct("[") => {
                self.bump();
                let mut elems = Vec::new();
                while !self.is_punct("]") {
                    if self.is_punct(",") {
                        return Err(ParseError::unsupported("array hole", self.src, self.peek().start));
                    }
                    if self.is_punct("...") {
                        return Err(self.unsupported_operator("..."));
                    }
                    elems.push(self.conditional()?);
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("]")?;
                Ok(node(ExprKind::Array(elems), Span::new(t.start, self.prev_end())))
            }
            Tok::Punct("{") => {
                self.bump();
                let mut props: Vec<(String, Expr)> = Vec::new();
                while !self.is_punct("}") {
                    let kt = self.peek().clone();
                    let key = match kt.tok {
                        Tok::Ident(s) => s,
                        Tok::Str(s) => s,
                        Tok::Num(_) => {
                            return Err(ParseError::unsupported("numeric property key", self.src, kt.start))
                        }
                        Tok::Punct("[") => {
                            return Err(ParseError::unsupported("computed property key", self.src, kt.start))
                        }
                        _ => return Err(self.unexpected("expected a property key")),
                    };
                    self.bump();
                    if !self.is_punct(":") {
                        return Err(ParseError::unsupported(
                            "object literal property without `key: value`",
                            self.src,
                            self.peek().start,
                        ));
                    }
                    self.bump();
                    let value = self.conditional()?;
                    match props.iter_mut().find(|(k, _)| *k == key) {
                        Some(slot) => slot.1 = value,
                        None => props.push((key, value)),
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("}")?;
                Ok(node(ExprKind::Object(props), Span::new(t.start, self.prev_end())))
            }
            Tok::Punct(p) if is_unsupported_operator(p) => Err(self.unsupported_operator(p)),
            _ => Err(self.unexpected("expected an expression")),
        }
    }
}

fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = lhs.span.to(rhs.span);
    node(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
}

fn is_unsupported_operator(p: &str) -> bool {
    !matches!(
        p,
        "{" | "}" | "(" | ")" | "[" | "]" | ";" | "," | "<" | ">=" | "+" | "-" | "!" | "?" | ":"
            | "." | "==" | "===" | "&&" | "||" | "??"
    )
}

/// Capture-free substitution of the call's arguments for the parameters.
fn inline_call(header: &FunctionHeader, args: Vec<Expr>, src: &str, call_start: usize) -> Result<Expr, ParseError> {
    for arg in &args {
        if arg.has_params() {
            return Err(ParseError::unsupported("non-literal call argument", src, call_start));
        }
    }
    for (i, param) in header.params.iter().enumerate() {
        let uses = count_param(&header.body, param);
        // Duplicating an object literal would split one identity into two.
        if uses > 1 && args.get(i).is_some_and(contains_container) {
            return Err(ParseError::unsupported(
                &format!("parameter `{param}` used more than once with an object argument"),
                src,
                call_start,
            ));
        }
    }
    let mut body = header.body.clone();
    substitute(&mut body, &header.params, &args);
    Ok(body)
}

fn count_param(e: &Expr, name: &str) -> usize {
    let own = matches!(&e.kind, ExprKind::Param(p) if p == name) as usize;
    own + e.children().iter().map(|c| count_param(c, name)).sum::<usize>()
}

fn contains_container(e: &Expr) -> bool {
    e.is_container_literal() || e.children().iter().any(|c| contains_container(c))
}

fn substitute(e: &mut Expr, params: &[String], args: &[Expr]) {
    if let ExprKind::Param(name) = &e.kind {
        let idx = params.iter().position(|p| p == name).expect("parser only admits declared params");
        *e = args.get(idx).cloned().unwrap_or_else(|| Expr::new(ExprKind::Undefined));
        return;
    }
    match &mut e.kind {
        ExprKind::Array(elems) => elems.iter_mut().for_each(|c| substitute(c, params, args)),
        ExprKind::Object(props) => props.iter_mut().for_each(|(_, c)| substitute(c, params, args)),
        ExprKind::Unary(_, c) | ExprKind::Sort(c) => substitute(c, params, args),
        ExprKind::Binary(_, l, r) | ExprKind::Index(l, r) => {
            substitute(l, params, args);
            substitute(r, params, args);
        }
        ExprKind::Conditional(c, t, f) => {
            substitute(c, params, args);
            substitute(t, params, args);
            substitute(f, params, args);
        }
        _ => {}
    }
}
