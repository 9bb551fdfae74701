use alloc::string::String;
use core::fmt::Write;

use super::ast::{Expr, ExprKind};
use super::number::number_to_string;
use super::value::{write_key, write_quoted};

/// Canonical, fully parenthesized rendering. Re-parsing the output yields
/// a tree of the same shape.
pub fn unparse(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Undefined => out.push_str("undefined"),
        ExprKind::Null => out.push_str("null"),
        ExprKind::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::Number(x) if *x < 0.0 => {
            out.push_str("(-");
            out.push_str(&number_to_string(-x));
            out.push(')');
        }
        ExprKind::Number(x) => out.push_str(&number_to_string(*x)),
        ExprKind::String(s) => write_quoted(out, s).expect("writing to a String cannot fail"),
        ExprKind::Array(elems) => {
            out.push('[');
            for (i, c) in elems.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, c);
            }
            out.push(']');
        }
        ExprKind::Object(props) => {
            out.push('{');
            for (i, (k, v)) in props.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_key(out, k).expect("writing to a String cannot fail");
                out.push_str(": ");
                write_expr(out, v);
            }
            out.push('}');
        }
        ExprKind::Unary(op, operand) => {
            if let super::ast::UnaryOp::Typeof = op {
                out.push_str("typeof(");
                write_expr(out, operand);
                out.push(')');
            } else {
                let _ = write!(out, "({}", op.symbol());
                write_expr(out, operand);
                out.push(')');
            }
        }
        ExprKind::Binary(op, l, r) => {
            out.push('(');
            write_expr(out, l);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, r);
            out.push(')');
        }
        ExprKind::Conditional(c, t, f) => {
            out.push('(');
            write_expr(out, c);
            out.push_str(" ? ");
            write_expr(out, t);
            out.push_str(" : ");
            write_expr(out, f);
            out.push(')');
        }
        ExprKind::Index(t, s) => {
            write_target(out, t);
            out.push('[');
            write_expr(out, s);
            out.push(']');
        }
        ExprKind::Sort(t) => {
            write_target(out, t);
            out.push_str(".sort()");
        }
        ExprKind::Param(name) => out.push_str(name),
    }
}

/// Targets of `[..]` and `.sort()` that would otherwise bind differently.
fn write_target(out: &mut String, t: &Expr) {
    let wrap = matches!(t.kind, ExprKind::Number(_) | ExprKind::Unary(..));
    if wrap {
        out.push('(');
    }
    write_expr(out, t);
    if wrap {
        out.push(')');
    }
}
