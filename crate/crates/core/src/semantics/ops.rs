//! Abstract operations of the modeled subset, each misconception decision
//! site guarded by [`Ctx::flag`].

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::trace::{Coercion, CoercionKind, TraceStep};
use crate::lang::number::{canonical_index, number_to_string, string_to_number, trim_js};
use crate::lang::{JsArray, JsValue, LanguageError, NodeId, ObjId, Outcome};
use crate::misconceptions::{MisconceptionId as Id, MisconceptionSet};

/// Per-evaluation state: active flags, consulted flags, identity counter,
/// and the trace under construction.
pub(crate) struct Ctx {
    active: MisconceptionSet,
    pub consulted: MisconceptionSet,
    next_obj: u32,
    pub tracing: bool,
    /// Flags consulted in the current node or conversion frame.
    pub site: MisconceptionSet,
    pub coercions: Vec<Coercion>,
    pub inputs: Vec<Outcome>,
    pub steps: Vec<TraceStep>,
}

impl Ctx {
    pub fn new(active: MisconceptionSet, tracing: bool) -> Self {
        Ctx {
            active,
            consulted: MisconceptionSet::EMPTY,
            next_obj: 0,
            tracing,
            site: MisconceptionSet::EMPTY,
            coercions: Vec::new(),
            inputs: Vec::new(),
            steps: Vec::new(),
        }
    }

    /// Reads a flag, recording that its decision site was reached.
    pub fn flag(&mut self, id: Id) -> bool {
        self.consulted.insert(id);
        self.site.insert(id);
        self.active.contains(id)
    }

    pub fn fresh(&mut self) -> ObjId {
        let id = ObjId(self.next_obj);
        self.next_obj += 1;
        id
    }

    /// Gives an object value a fresh identity (used when operand values
    /// are supplied from outside this evaluation).
    pub fn restamp(&mut self, mut v: JsValue) -> JsValue {
        match &mut v {
            JsValue::Object(o) => o.id = self.fresh(),
            JsValue::Array(a) => a.id = self.fresh(),
            _ => {}
        }
        v
    }

    /// Runs a conversion of `input`, recording it against `operand` when
    /// tracing and the conversion changes the value's type. Flags consulted
    /// by unrecorded conversions stay with the enclosing frame.
    pub fn convert<T: Clone + Into<JsValue>>(
        &mut self,
        kind: CoercionKind,
        operand: Option<NodeId>,
        input: &JsValue,
        f: impl FnOnce(&mut Ctx) -> T,
    ) -> T {
        if !self.tracing {
            return f(self);
        }
        let outer = core::mem::take(&mut self.site);
        let out = f(self);
        let flags = core::mem::replace(&mut self.site, outer);
        let value: JsValue = out.clone().into();
        match operand {
            Some(operand) if value.kind() != input.kind() => self.coercions.push(Coercion {
                kind,
                operand,
                input: input.clone(),
                output: value,
                consulted: flags,
            }),
            _ => self.site = self.site.union(flags),
        }
        out
    }
}

impl From<String> for JsValue {
    fn from(s: String) -> Self {
        JsValue::String(s)
    }
}

impl From<f64> for JsValue {
    fn from(x: f64) -> Self {
        JsValue::Number(x)
    }
}

impl From<bool> for JsValue {
    fn from(b: bool) -> Self {
        JsValue::Boolean(b)
    }
}

pub(crate) fn to_string(ctx: &mut Ctx, v: &JsValue) -> String {
    match v {
        JsValue::Undefined => {
            if ctx.flag(Id::UNDEFINED_PRINTS_EMPTY) {
                String::new()
            } else {
                String::from("undefined")
            }
        }
        JsValue::Null => {
            if ctx.flag(Id::NULL_PRINTS_EMPTY) {
                String::new()
            } else {
                String::from("null")
            }
        }
        JsValue::Boolean(b) => String::from(if *b { "true" } else { "false" }),
        JsValue::Number(x) => {
            if x.is_nan() && ctx.flag(Id::NAN_PRINTS_EMPTY) {
                String::new()
            } else {
                number_to_string(*x)
            }
        }
        JsValue::String(s) => s.clone(),
        JsValue::Object(_) => {
            if ctx.flag(Id::OBJECT_TO_STRING_IS_BRACES) {
                String::from("{}")
            } else {
                String::from("[object Object]")
            }
        }
        JsValue::Array(a) => {
            let mut out = String::new();
            for (i, e) in a.elems.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match e {
                    JsValue::Undefined => {
                        if ctx.flag(Id::UNDEFINED_PRINTS_IN_ARRAY) {
                            out.push_str("undefined");
                        }
                    }
                    JsValue::Null => {
                        if ctx.flag(Id::NULL_PRINTS_IN_ARRAY) {
                            out.push_str("null");
                        }
                    }
                    other => out.push_str(&to_string(ctx, other)),
                }
            }
            if ctx.flag(Id::ARRAY_TOSTRING_HAS_BRACKETS) {
                out.insert(0, '[');
                out.push(']');
            }
            out
        }
    }
}

/// Objects and arrays convert to their string form; primitives are unchanged.
pub(crate) fn to_primitive(ctx: &mut Ctx, v: &JsValue) -> JsValue {
    if v.is_object() {
        JsValue::String(to_string(ctx, v))
    } else {
        v.clone()
    }
}

pub(crate) fn to_number(ctx: &mut Ctx, v: &JsValue) -> f64 {
    match v {
        JsValue::Undefined => {
            if ctx.flag(Id::UNDEFINED_TO_NUMBER_IS_ZERO) {
                0.0
            } else {
                f64::NAN
            }
        }
        JsValue::Null => {
            if ctx.flag(Id::NULL_TO_NUMBER_IS_NAN) {
                f64::NAN
            } else {
                0.0
            }
        }
        JsValue::Boolean(b) => {
            if *b {
                1.0
            } else {
                0.0
            }
        }
        JsValue::Number(x) => *x,
        JsValue::String(s) => {
            if trim_js(s).is_empty() && ctx.flag(Id::EMPTY_STRING_TO_NUMBER_IS_NAN) {
                f64::NAN
            } else {
                string_to_number(s)
            }
        }
        JsValue::Object(_) => {
            if ctx.flag(Id::OBJECT_TO_NUMBER_IS_ZERO) {
                0.0
            } else {
                let prim = ctx.convert(CoercionKind::ToPrimitive, None, v, |c| to_primitive(c, v));
                to_number(ctx, &prim)
            }
        }
        JsValue::Array(_) => {
            let prim = ctx.convert(CoercionKind::ToPrimitive, None, v, |c| to_primitive(c, v));
            to_number(ctx, &prim)
        }
    }
}

pub(crate) fn to_boolean(ctx: &mut Ctx, v: &JsValue) -> bool {
    match v {
        JsValue::Undefined | JsValue::Null => false,
        JsValue::Boolean(b) => *b,
        JsValue::Number(x) => !(x.is_nan() || *x == 0.0),
        JsValue::String(s) => !s.is_empty(),
        JsValue::Object(o) => !(o.props.is_empty() && ctx.flag(Id::EMPTY_OBJECT_IS_FALSEY)),
        JsValue::Array(a) => !(a.elems.is_empty() && ctx.flag(Id::EMPTY_OBJECT_IS_FALSEY)),
    }
}

pub(crate) fn type_of(ctx: &mut Ctx, v: &JsValue) -> &'static str {
    match v {
        JsValue::Null => {
            if ctx.flag(Id::TYPEOF_NULL_IS_NULL) {
                "null"
            } else {
                "object"
            }
        }
        JsValue::Undefined => "undefined",
        JsValue::Boolean(_) => "boolean",
        JsValue::Number(_) => "number",
        JsValue::String(_) => "string",
        JsValue::Array(_) => {
            if ctx.flag(Id::TYPEOF_ARRAY_IS_ARRAY) {
                "array"
            } else {
                "object"
            }
        }
        JsValue::Object(_) => "object",
    }
}

/// The language-level type: arrays are objects.
fn same_type(a: &JsValue, b: &JsValue) -> bool {
    (a.is_object() && b.is_object()) || a.kind() == b.kind()
}

pub(crate) fn strict_equals(ctx: &mut Ctx, a: &JsValue, b: &JsValue) -> bool {
    match (a, b) {
        (JsValue::Undefined, JsValue::Undefined) | (JsValue::Null, JsValue::Null) => true,
        (JsValue::Boolean(x), JsValue::Boolean(y)) => x == y,
        (JsValue::Number(x), JsValue::Number(y)) => {
            if x.is_nan() && y.is_nan() {
                ctx.flag(Id::NAN_EQUALS_NAN)
            } else {
                x == y
            }
        }
        (JsValue::String(x), JsValue::String(y)) => x == y,
        _ if a.is_object() && b.is_object() => {
            if ctx.flag(Id::EQUALITY_COMPARES_STRUCTURE) {
                a.structurally_eq(b)
            } else {
                a.identity() == b.identity()
            }
        }
        _ => false,
    }
}

pub(crate) fn loose_equals(
    ctx: &mut Ctx,
    a: &JsValue,
    b: &JsValue,
    aop: Option<NodeId>,
    bop: Option<NodeId>,
) -> bool {
    if same_type(a, b) {
        return strict_equals(ctx, a, b);
    }
    if ctx.flag(Id::LOOSE_EQUALITY_IS_STRICT) {
        return strict_equals(ctx, a, b);
    }
    match (a, b) {
        (JsValue::Undefined, JsValue::Null) | (JsValue::Null, JsValue::Undefined) => true,
        (JsValue::Number(x), JsValue::String(_)) => {
            let y = ctx.convert(CoercionKind::ToNumber, bop, b, |c| to_number(c, b));
            *x == y
        }
        (JsValue::String(_), JsValue::Number(y)) => {
            let x = ctx.convert(CoercionKind::ToNumber, aop, a, |c| to_number(c, a));
            x == *y
        }
        (JsValue::Boolean(x), _) => {
            if ctx.flag(Id::LOOSE_EQUALITY_CASTS_TO_BOOL) {
                let y = ctx.convert(CoercionKind::ToBoolean, bop, b, |c| to_boolean(c, b));
                *x == y
            } else {
                let n = ctx.convert(CoercionKind::ToNumber, aop, a, |c| to_number(c, a));
                loose_equals(ctx, &JsValue::Number(n), b, aop, bop)
            }
        }
        (_, JsValue::Boolean(y)) => {
            if ctx.flag(Id::LOOSE_EQUALITY_CASTS_TO_BOOL) {
                let x = ctx.convert(CoercionKind::ToBoolean, aop, a, |c| to_boolean(c, a));
                x == *y
            } else {
                let n = ctx.convert(CoercionKind::ToNumber, bop, b, |c| to_number(c, b));
                loose_equals(ctx, a, &JsValue::Number(n), aop, bop)
            }
        }
        (_, JsValue::Number(_) | JsValue::String(_)) if a.is_object() => {
            let p = ctx.convert(CoercionKind::ToPrimitive, aop, a, |c| to_primitive(c, a));
            loose_equals(ctx, &p, b, aop, bop)
        }
        (JsValue::Number(_) | JsValue::String(_), _) if b.is_object() => {
            let p = ctx.convert(CoercionKind::ToPrimitive, bop, b, |c| to_primitive(c, b));
            loose_equals(ctx, a, &p, aop, bop)
        }
        _ => false,
    }
}

/// Ordering key of one UTF-16 code unit under the active flags.
fn unit_key(u: u16, brackets_late: bool, comma_last: bool) -> u32 {
    match u {
        0x5B if brackets_late => ('z' as u32) * 4 + 1,
        0x5D if brackets_late => ('z' as u32) * 4 + 2,
        0x2C if comma_last => 0x10000 * 4,
        _ => u as u32 * 4,
    }
}

/// Code-unit lexicographic comparison, honoring the character-order flags.
pub(crate) fn compare_strings(ctx: &mut Ctx, a: &str, b: &str) -> Ordering {
    let has = |s: &str, cs: &[char]| s.contains(cs);
    let brackets_late = (has(a, &['[', ']']) || has(b, &['[', ']'])) && ctx.flag(Id::BRACKETS_SORT_AFTER_LOWERCASE);
    let comma_last = (has(a, &[',']) || has(b, &[','])) && ctx.flag(Id::COMMA_SORTS_LAST);
    let ka = a.encode_utf16().map(|u| unit_key(u, brackets_late, comma_last));
    let kb = b.encode_utf16().map(|u| unit_key(u, brackets_late, comma_last));
    ka.cmp(kb)
}

pub(crate) fn less_than(
    ctx: &mut Ctx,
    a: &JsValue,
    b: &JsValue,
    aop: Option<NodeId>,
    bop: Option<NodeId>,
) -> bool {
    let pa = ctx.convert(CoercionKind::ToPrimitive, aop, a, |c| to_primitive(c, a));
    let pb = ctx.convert(CoercionKind::ToPrimitive, bop, b, |c| to_primitive(c, b));
    if let (JsValue::String(x), JsValue::String(y)) = (&pa, &pb) {
        if !ctx.flag(Id::LT_ALWAYS_NUMERIC) {
            return compare_strings(ctx, x, y) == Ordering::Less;
        }
    }
    let x = ctx.convert(CoercionKind::ToNumber, aop, &pa, |c| to_number(c, &pa));
    let y = ctx.convert(CoercionKind::ToNumber, bop, &pb, |c| to_number(c, &pb));
    x < y
}

pub(crate) fn greater_or_equal(
    ctx: &mut Ctx,
    a: &JsValue,
    b: &JsValue,
    aop: Option<NodeId>,
    bop: Option<NodeId>,
) -> bool {
    if ctx.flag(Id::GE_IS_GT_OR_EQ) {
        less_than(ctx, b, a, bop, aop) || loose_equals(ctx, a, b, aop, bop)
    } else {
        !less_than(ctx, a, b, aop, bop)
    }
}

pub(crate) fn add(ctx: &mut Ctx, a: &JsValue, b: &JsValue, aop: Option<NodeId>, bop: Option<NodeId>) -> Outcome {
    if let (JsValue::Array(x), JsValue::Array(y)) = (a, b) {
        if ctx.flag(Id::PLUS_CONCATENATES_ARRAYS) {
            let elems = x.elems.iter().chain(&y.elems).cloned().collect();
            return Ok(JsValue::Array(JsArray { id: ctx.fresh(), elems }));
        }
    }
    let num_or_str = |v: &JsValue| matches!(v, JsValue::Number(_) | JsValue::String(_));
    if !num_or_str(a) && !num_or_str(b) && ctx.flag(Id::PLUS_REQUIRES_NUMBER_OR_STRING) {
        return Err(LanguageError::type_error("+ needs a number or string operand"));
    }
    let pa = ctx.convert(CoercionKind::ToPrimitive, aop, a, |c| to_primitive(c, a));
    let pb = ctx.convert(CoercionKind::ToPrimitive, bop, b, |c| to_primitive(c, b));
    let mixed = matches!(
        (&pa, &pb),
        (JsValue::Number(_), JsValue::String(_)) | (JsValue::String(_), JsValue::Number(_))
    );
    let concatenate = matches!(pa, JsValue::String(_)) || matches!(pb, JsValue::String(_));
    if concatenate && !(mixed && ctx.flag(Id::PLUS_ADDS_WITH_ANY_NUMBER)) {
        let mut s = ctx.convert(CoercionKind::ToString, aop, &pa, |c| to_string(c, &pa));
        s.push_str(&ctx.convert(CoercionKind::ToString, bop, &pb, |c| to_string(c, &pb)));
        return Ok(JsValue::String(s));
    }
    let x = ctx.convert(CoercionKind::ToNumber, aop, &pa, |c| to_number(c, &pa));
    let y = ctx.convert(CoercionKind::ToNumber, bop, &pb, |c| to_number(c, &pb));
    Ok(JsValue::Number(x + y))
}

pub(crate) fn index(ctx: &mut Ctx, target: &JsValue, sub: &JsValue, sop: Option<NodeId>) -> Outcome {
    match target {
        JsValue::Undefined | JsValue::Null => {
            Err(LanguageError::type_error("cannot read properties of undefined or null"))
        }
        JsValue::Boolean(_) | JsValue::Number(_) => {
            if ctx.flag(Id::PRIMITIVE_SUBSCRIPT_ERRORS) {
                Err(LanguageError::type_error("cannot subscript a primitive"))
            } else {
                // The wrapper object has no own properties we model.
                Ok(JsValue::Undefined)
            }
        }
        JsValue::Object(o) => {
            let key = ctx.convert(CoercionKind::ToString, sop, sub, |c| to_string(c, sub));
            Ok(o.props.iter().find(|(k, _)| *k == key).map_or(JsValue::Undefined, |(_, v)| v.clone()))
        }
        JsValue::Array(_) | JsValue::String(_) => {
            if !matches!(sub, JsValue::Number(_)) && ctx.flag(Id::STRING_SUBSCRIPTS_DONT_INDEX) {
                return Ok(JsValue::Undefined);
            }
            let key = ctx.convert(CoercionKind::ToString, sop, sub, |c| to_string(c, sub));
            let len = match target {
                JsValue::Array(a) => a.elems.len(),
                JsValue::String(s) => s.encode_utf16().count(),
                _ => unreachable!(),
            };
            if key == "length" {
                return Ok(JsValue::Number(len as f64));
            }
            let Some(n) = canonical_index(&key) else {
                return Ok(JsValue::Undefined);
            };
            let pos = if ctx.flag(Id::ZERO_INDEXED) { n.checked_sub(1) } else { Some(n) };
            let Some(pos) = pos.map(|p| p as usize).filter(|p| *p < len) else {
                return Ok(JsValue::Undefined);
            };
            Ok(match target {
                JsValue::Array(a) => a.elems[pos].clone(),
                JsValue::String(s) => {
                    let unit = s.encode_utf16().nth(pos).expect("pos < len");
                    JsValue::String(String::from_utf16_lossy(&[unit]))
                }
                _ => unreachable!(),
            })
        }
    }
}

/// `Array.prototype.sort()` with the default comparator: a stable sort by
/// string form, with `undefined` elements moved to the end.
pub(crate) fn sort(ctx: &mut Ctx, target: &JsValue) -> Outcome {
    let JsValue::Array(arr) = target else {
        return Err(LanguageError::type_error("sort is not a function"));
    };
    let (mut defined, undefined): (Vec<&JsValue>, Vec<&JsValue>) =
        arr.elems.iter().partition(|e| !matches!(e, JsValue::Undefined));
    let mut keyed: Vec<(&JsValue, String)> = Vec::with_capacity(defined.len());
    for e in defined.drain(..) {
        let k = ctx.convert(CoercionKind::ToString, None, e, |c| to_string(c, e));
        keyed.push((e, k));
    }
    // Insertion sort: stable and well-defined even when the comparator is
    // not a total order (mixing numeric and string comparisons).
    for i in 1..keyed.len() {
        let mut j = i;
        while j > 0 && sort_compare(ctx, &keyed[j - 1], &keyed[j]) == Ordering::Greater {
            keyed.swap(j - 1, j);
            j -= 1;
        }
    }
    let elems = keyed.into_iter().map(|(e, _)| e.clone()).chain(undefined.into_iter().cloned()).collect();
    Ok(JsValue::Array(JsArray { id: ctx.fresh(), elems }))
}

fn sort_compare(ctx: &mut Ctx, a: &(&JsValue, String), b: &(&JsValue, String)) -> Ordering {
    if let (JsValue::Number(x), JsValue::Number(y)) = (a.0, b.0) {
        if ctx.flag(Id::SORT_IS_NUMERIC) {
            return x.partial_cmp(y).unwrap_or(Ordering::Equal);
        }
    }
    compare_strings(ctx, &a.1, &b.1)
}
