use alloc::vec::Vec;

use super::ops::{self, Ctx};
use super::trace::{CoercionKind, EvalOutcome, TraceStep};
use crate::lang::{BinaryOp, ErrorKind, Expr, ExprKind, JsArray, JsObject, JsValue, LanguageError, Outcome, Program, UnaryOp};
use crate::misconceptions::{MisconceptionId as Id, MisconceptionSet};

/// Supplies the value of a node's `i`-th child when the node asks for it.
/// Children that are never asked for (short-circuited branches) are never
/// evaluated.
pub(crate) trait Operands {
    fn operand(&mut self, ctx: &mut Ctx, i: usize, child: &Expr) -> Outcome;
}

/// Evaluates children by recursion, recording trace steps when tracing.
pub(crate) struct Tree;

impl Operands for Tree {
    fn operand(&mut self, ctx: &mut Ctx, _i: usize, child: &Expr) -> Outcome {
        let out = eval_tree(ctx, child);
        if ctx.tracing {
            ctx.inputs.push(out.clone());
        }
        out
    }
}

/// Children whose outcomes (and consulted flags) were computed elsewhere.
pub(crate) struct Given<'a> {
    pub children: &'a [(&'a Outcome, MisconceptionSet)],
}

impl Operands for Given<'_> {
    fn operand(&mut self, ctx: &mut Ctx, i: usize, _child: &Expr) -> Outcome {
        let (out, consulted) = self.children[i];
        ctx.consulted = ctx.consulted.union(consulted);
        match out {
            Ok(v) => Ok(ctx.restamp(v.clone())),
            Err(e) => Err(e.clone()),
        }
    }
}

fn eval_tree(ctx: &mut Ctx, e: &Expr) -> Outcome {
    if !ctx.tracing {
        return eval_node(ctx, e, &mut Tree);
    }
    let site = core::mem::take(&mut ctx.site);
    let coercions = core::mem::take(&mut ctx.coercions);
    let inputs = core::mem::take(&mut ctx.inputs);
    let out = eval_node(ctx, e, &mut Tree);
    let step = TraceStep {
        node: e.id,
        span: e.span,
        inputs: core::mem::replace(&mut ctx.inputs, inputs),
        output: out.clone(),
        operation: operation_of(e),
        coercions: core::mem::replace(&mut ctx.coercions, coercions),
        consulted: core::mem::replace(&mut ctx.site, site),
    };
    ctx.steps.push(step);
    out
}

fn operation_of(e: &Expr) -> Option<CoercionKind> {
    match &e.kind {
        ExprKind::Binary(BinaryOp::LooseEq, ..) => Some(CoercionKind::AbstractEquality),
        ExprKind::Binary(BinaryOp::Lt | BinaryOp::Ge, ..) => Some(CoercionKind::RelationalComparison),
        ExprKind::Sort(_) => Some(CoercionKind::SortCompare),
        ExprKind::Index(..) => Some(CoercionKind::IndexLookup),
        _ => None,
    }
}

/// Evaluates one node given a way to obtain its children's outcomes.
pub(crate) fn eval_node<O: Operands>(ctx: &mut Ctx, e: &Expr, ops: &mut O) -> Outcome {
    match &e.kind {
        ExprKind::Undefined => Ok(JsValue::Undefined),
        ExprKind::Null => Ok(JsValue::Null),
        ExprKind::Bool(b) => Ok(JsValue::Boolean(*b)),
        ExprKind::Number(x) => Ok(JsValue::Number(*x)),
        ExprKind::String(s) => Ok(JsValue::String(s.clone())),
        ExprKind::Array(elems) => {
            let mut values = Vec::with_capacity(elems.len());
            for (i, c) in elems.iter().enumerate() {
                values.push(ops.operand(ctx, i, c)?);
            }
            Ok(JsValue::Array(JsArray { id: ctx.fresh(), elems: values }))
        }
        ExprKind::Object(props) => {
            let mut values = Vec::with_capacity(props.len());
            for (i, (k, c)) in props.iter().enumerate() {
                values.push((k.clone(), ops.operand(ctx, i, c)?));
            }
            Ok(JsValue::Object(JsObject { id: ctx.fresh(), props: values }))
        }
        ExprKind::Unary(op, operand) => {
            let v = ops.operand(ctx, 0, operand)?;
            let at = Some(operand.id);
            Ok(match op {
                UnaryOp::Typeof => JsValue::string(ops::type_of(ctx, &v)),
                UnaryOp::Not => {
                    JsValue::Boolean(!ctx.convert(CoercionKind::ToBoolean, at, &v, |c| ops::to_boolean(c, &v)))
                }
                UnaryOp::Plus => {
                    JsValue::Number(ctx.convert(CoercionKind::ToNumber, at, &v, |c| ops::to_number(c, &v)))
                }
                UnaryOp::Minus => {
                    JsValue::Number(-ctx.convert(CoercionKind::ToNumber, at, &v, |c| ops::to_number(c, &v)))
                }
            })
        }
        ExprKind::Binary(op, l, r) => eval_binary(ctx, *op, l, r, ops),
        ExprKind::Conditional(c, t, f) => {
            let cv = ops.operand(ctx, 0, c)?;
            if ctx.convert(CoercionKind::ToBoolean, Some(c.id), &cv, |x| ops::to_boolean(x, &cv)) {
                ops.operand(ctx, 1, t)
            } else {
                ops.operand(ctx, 2, f)
            }
        }
        ExprKind::Index(t, s) => {
            let tv = ops.operand(ctx, 0, t)?;
            let sv = ops.operand(ctx, 1, s)?;
            ops::index(ctx, &tv, &sv, Some(s.id))
        }
        ExprKind::Sort(t) => {
            let tv = ops.operand(ctx, 0, t)?;
            ops::sort(ctx, &tv)
        }
        ExprKind::Param(name) => Err(LanguageError {
            kind: ErrorKind::ReferenceError,
            message: alloc::format!("{name} is not defined"),
        }),
    }
}

fn eval_binary<O: Operands>(ctx: &mut Ctx, op: BinaryOp, l: &Expr, r: &Expr, ops: &mut O) -> Outcome {
    let (lop, rop) = (Some(l.id), Some(r.id));
    match op {
        BinaryOp::And | BinaryOp::Or => {
            let lv = ops.operand(ctx, 0, l)?;
            let truthy = ctx.convert(CoercionKind::ToBoolean, lop, &lv, |c| ops::to_boolean(c, &lv));
            let result = match (op, truthy) {
                // Only the empty-object flag makes an object falsy; someone
                // holding it reads `{} && x` as plain `false`.
                (BinaryOp::And, false) if lv.is_object() => return Ok(JsValue::Boolean(false)),
                (BinaryOp::And, false) | (BinaryOp::Or, true) => lv,
                _ => ops.operand(ctx, 1, r)?,
            };
            if !matches!(result, JsValue::Boolean(_)) && ctx.flag(Id::LOGICAL_OPS_RETURN_BOOL) {
                let b = ctx.convert(CoercionKind::ToBoolean, None, &result, |c| ops::to_boolean(c, &result));
                return Ok(JsValue::Boolean(b));
            }
            Ok(result)
        }
        BinaryOp::Nullish => {
            let lv = ops.operand(ctx, 0, l)?;
            let falls_through = match &lv {
                JsValue::Undefined | JsValue::Null => true,
                JsValue::Boolean(false) => ctx.flag(Id::NULLISH_INCLUDES_FALSE),
                JsValue::Number(x) if x.is_nan() => ctx.flag(Id::NULLISH_INCLUDES_NAN),
                _ => false,
            };
            if falls_through {
                ops.operand(ctx, 1, r)
            } else {
                Ok(lv)
            }
        }
        _ => {
            let lv = ops.operand(ctx, 0, l)?;
            let rv = ops.operand(ctx, 1, r)?;
            match op {
                BinaryOp::StrictEq => Ok(JsValue::Boolean(ops::strict_equals(ctx, &lv, &rv))),
                BinaryOp::LooseEq => Ok(JsValue::Boolean(ops::loose_equals(ctx, &lv, &rv, lop, rop))),
                BinaryOp::Lt => Ok(JsValue::Boolean(ops::less_than(ctx, &lv, &rv, lop, rop))),
                BinaryOp::Ge => Ok(JsValue::Boolean(ops::greater_or_equal(ctx, &lv, &rv, lop, rop))),
                BinaryOp::Add => ops::add(ctx, &lv, &rv, lop, rop),
                BinaryOp::Sub => {
                    let x = ctx.convert(CoercionKind::ToNumber, lop, &lv, |c| ops::to_number(c, &lv));
                    let y = ctx.convert(CoercionKind::ToNumber, rop, &rv, |c| ops::to_number(c, &rv));
                    Ok(JsValue::Number(x - y))
                }
                BinaryOp::And | BinaryOp::Or | BinaryOp::Nullish => unreachable!(),
            }
        }
    }
}

/// Evaluates `p` under `Σ_M`, recording the full trace.
pub fn evaluate(p: &Program, m: MisconceptionSet) -> EvalOutcome {
    run(&p.expr, m, true)
}

/// Evaluates `p` under `Σ_M` without building a trace.
pub fn evaluate_untraced(p: &Program, m: MisconceptionSet) -> EvalOutcome {
    run(&p.expr, m, false)
}

pub(crate) fn run(e: &Expr, m: MisconceptionSet, tracing: bool) -> EvalOutcome {
    let mut ctx = Ctx::new(m, tracing);
    let result = eval_tree(&mut ctx, e);
    EvalOutcome { result, trace: ctx.steps, consulted: ctx.consulted }
}

/// Evaluates a single node whose children's outcomes under `m` are given.
pub(crate) fn eval_given(
    e: &Expr,
    m: MisconceptionSet,
    children: &[(&Outcome, MisconceptionSet)],
) -> (Outcome, MisconceptionSet) {
    let mut ctx = Ctx::new(m, false);
    let out = eval_node(&mut ctx, e, &mut Given { children });
    (out, ctx.consulted)
}
