//! Runtime values of the modeled language and their REPL rendering.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::number::number_to_string;

/// Identity handle of an object or array. Fresh for every literal evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub u32);

#[derive(Debug, Clone)]
pub struct JsObject {
    pub id: ObjId,
    /// Own properties in insertion order. Keys are unique.
    pub props: Vec<(String, JsValue)>,
}

#[derive(Debug, Clone)]
pub struct JsArray {
    pub id: ObjId,
    pub elems: Vec<JsValue>,
}

/// A value of the modeled JavaScript subset.
///
/// `JsValue` deliberately does not implement `PartialEq`: language-level
/// equality lives in the semantics module, and result comparison goes
/// through [`JsValue::structurally_eq`].
#[derive(Debug, Clone)]
pub enum JsValue {
    Undefined,
    Null,
    Boolean(bool),
    Number(f64),
    String(String),
    Object(JsObject),
    Array(JsArray),
}

/// The `typeof`-level tag of a value, with arrays kept apart from objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Undefined,
    Null,
    Boolean,
    Number,
    String,
    Object,
    Array,
}

impl JsValue {
    pub fn string(s: impl Into<String>) -> Self {
        JsValue::String(s.into())
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            JsValue::Undefined => ValueKind::Undefined,
            JsValue::Null => ValueKind::Null,
            JsValue::Boolean(_) => ValueKind::Boolean,
            JsValue::Number(_) => ValueKind::Number,
            JsValue::String(_) => ValueKind::String,
            JsValue::Object(_) => ValueKind::Object,
            JsValue::Array(_) => ValueKind::Array,
        }
    }

    /// Objects and arrays.
    pub fn is_object(&self) -> bool {
        matches!(self, JsValue::Object(_) | JsValue::Array(_))
    }

    pub fn is_nullish(&self) -> bool {
        matches!(self, JsValue::Undefined | JsValue::Null)
    }

    pub fn identity(&self) -> Option<ObjId> {
        match self {
            JsValue::Object(o) => Some(o.id),
            JsValue::Array(a) => Some(a.id),
            _ => None,
        }
    }

    /// Deep equality that ignores object identity. NaN equals NaN and the
    /// two zeros are equal, so this is the right notion for "did the
    /// program produce the same result".
    pub fn structurally_eq(&self, other: &JsValue) -> bool {
        match (self, other) {
            (JsValue::Undefined, JsValue::Undefined) | (JsValue::Null, JsValue::Null) => true,
            (JsValue::Boolean(a), JsValue::Boolean(b)) => a == b,
            (JsValue::Number(a), JsValue::Number(b)) => a == b || (a.is_nan() && b.is_nan()),
            (JsValue::String(a), JsValue::String(b)) => a == b,
            (JsValue::Object(a), JsValue::Object(b)) => {
                a.props.len() == b.props.len()
                    && a.props
                        .iter()
                        .zip(&b.props)
                        .all(|((ka, va), (kb, vb))| ka == kb && va.structurally_eq(vb))
            }
            (JsValue::Array(a), JsValue::Array(b)) => {
                a.elems.len() == b.elems.len()
                    && a.elems.iter().zip(&b.elems).all(|(x, y)| x.structurally_eq(y))
            }
            _ => false,
        }
    }

    /// REPL rendering: strings quoted, arrays as `[a, b]`, objects as `{k: v}`.
    pub fn display(&self) -> Display<'_> {
        Display(self)
    }
}

pub struct Display<'a>(&'a JsValue);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            JsValue::Undefined => f.write_str("undefined"),
            JsValue::Null => f.write_str("null"),
            JsValue::Boolean(b) => write!(f, "{b}"),
            JsValue::Number(x) => f.write_str(&number_to_string(*x)),
            JsValue::String(s) => write_quoted(f, s),
            JsValue::Array(a) => {
                f.write_str("[")?;
                for (i, e) in a.elems.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", e.display())?;
                }
                f.write_str("]")
            }
            JsValue::Object(o) => {
                if o.props.is_empty() {
                    return f.write_str("{}");
                }
                f.write_str("{")?;
                for (i, (k, v)) in o.props.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_key(f, k)?;
                    write!(f, ": {}", v.display())?;
                }
                f.write_str("}")
            }
        }
    }
}

pub(crate) fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\r' => f.write_str("\\r")?,
            '\t' => f.write_str("\\t")?,
            c if (c as u32) < 0x20 => write!(f, "\\u{:04x}", c as u32)?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c == '_' || c == '$' || c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c == '_' || c == '$' || c.is_ascii_alphanumeric())
}

pub(crate) fn write_key(f: &mut impl fmt::Write, key: &str) -> fmt::Result {
    if is_identifier(key) {
        f.write_str(key)
    } else {
        write_quoted(f, key)
    }
}

/// A runtime error raised by the modeled semantics (only `TypeError` occurs).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind}: {message}")]
pub struct LanguageError {
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    TypeError,
    ReferenceError,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::TypeError => "TypeError",
            ErrorKind::ReferenceError => "ReferenceError",
        })
    }
}

impl LanguageError {
    pub fn type_error(message: impl Into<String>) -> Self {
        LanguageError { kind: ErrorKind::TypeError, message: message.into() }
    }
}

/// The result of running a program: a value, or a language-level error.
pub type Outcome = Result<JsValue, LanguageError>;

/// Structural comparison of outcomes; errors are equal when their kinds are.
pub fn same_outcome(a: &Outcome, b: &Outcome) -> bool {
    match (a, b) {
        (Ok(x), Ok(y)) => x.structurally_eq(y),
        (Err(x), Err(y)) => x.kind == y.kind,
        _ => false,
    }
}

/// Display form of an outcome; errors render as `(error)`.
pub fn display_outcome(o: &Outcome) -> String {
    use alloc::string::ToString;
    match o {
        Ok(v) => v.display().to_string(),
        Err(_) => String::from("(error)"),
    }
}
