//! The modeled JavaScript subset: values, syntax tree, parser.

mod ast;
mod lexer;
pub mod number;
mod parser;
mod unparse;
mod value;

pub use ast::{BinaryOp, Expr, ExprKind, FunctionHeader, NodeId, Program, Span, UnaryOp};
pub use parser::{parse, parse_expr, ParseError, ParseErrorKind};
pub use unparse::unparse;
pub use value::{
    display_outcome, same_outcome, Display, ErrorKind, JsArray, JsObject, JsValue, LanguageError, ObjId,
    Outcome, ValueKind,
};
