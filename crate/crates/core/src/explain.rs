//! Selective, contrastive explanations: the messages for the inferred
//! misconceptions plus only the evaluation steps they affect.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use hashbrown::HashMap;

use crate::inference::Candidate;
use crate::lang::{display_outcome, same_outcome, JsValue, NodeId, Outcome, Program};
use crate::misconceptions::{MisconceptionId, MisconceptionSet};
use crate::semantics::{evaluate, Coercion, CoercionKind, EvalOutcome, TraceStep};

#[derive(Debug, Clone)]
pub struct StepLine {
    pub node: NodeId,
    /// Quoted source of the node (or of the converted operand).
    pub source: String,
    /// Value under the true semantics.
    pub value: Outcome,
    /// Set when the line reports an operand conversion rather than a node.
    pub conversion: Option<CoercionKind>,
    pub text: String,
}

#[derive(Debug, Clone)]
pub enum Line {
    Message {
        id: MisconceptionId,
        text: &'static str,
        /// Reported alongside another flag's message rather than for a
        /// flag of the explained set.
        companion: bool,
    },
    Step(StepLine),
}

#[derive(Debug, Clone)]
pub struct Explanation {
    pub set: MisconceptionSet,
    pub expected: Outcome,
    /// Messages and intermediate steps, in reading order.
    pub lines: Vec<Line>,
    /// The closing line about the whole program; `None` for the empty set.
    pub final_line: Option<StepLine>,
}

impl Explanation {
    pub fn messages(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().filter_map(|l| match l {
            Line::Message { text, .. } => Some(*text),
            Line::Step(_) => None,
        })
    }

    pub fn steps(&self) -> impl Iterator<Item = &StepLine> {
        self.lines.iter().filter_map(|l| match l {
            Line::Step(s) => Some(s),
            Line::Message { .. } => None,
        })
    }

    /// Plain-text rendering, one line per entry.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            match line {
                Line::Message { text, .. } => out.push_str(text),
                Line::Step(s) => out.push_str(&s.text),
            }
            out.push('\n');
        }
        if let Some(f) = &self.final_line {
            out.push_str(&f.text);
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("the program gives {actual} under the chosen misconceptions, not the expected {expected}")]
pub struct PremiseMismatch {
    pub expected: String,
    pub actual: String,
}

/// Explains `p` for the resolved candidate.
pub fn explain(p: &Program, cand: &Candidate) -> Result<Explanation, PremiseMismatch> {
    explain_set(p, cand.set, &cand.expected)
}

/// Explains why `p` does not give `expected`, assuming the user holds `set`.
/// Fails if `set` does not actually lead to `expected`.
pub fn explain_set(p: &Program, set: MisconceptionSet, expected: &Outcome) -> Result<Explanation, PremiseMismatch> {
    let truth = evaluate(p, MisconceptionSet::EMPTY);
    let wrong = evaluate(p, set);
    if !same_outcome(&wrong.result, expected) {
        return Err(PremiseMismatch { expected: display_outcome(expected), actual: display_outcome(&wrong.result) });
    }
    let mut ex = Explanation { set, expected: expected.clone(), lines: Vec::new(), final_line: None };
    if set.is_empty() {
        return Ok(ex);
    }

    let by_node: HashMap<NodeId, &TraceStep> = wrong.trace.iter().map(|s| (s.node, s)).collect();
    let mut pending = set;
    let mut emitted = MisconceptionSet::EMPTY;
    let root = p.expr.id;

    for s0 in &truth.trace {
        let s1 = by_node.get(&s0.node).copied();
        let node = p.find(s0.node).expect("trace steps name program nodes");

        let mut texts: Vec<String> = Vec::new();
        for (c0, c1) in align(&s0.coercions, s1.map_or(&[][..], |s| &s.coercions)) {
            let fired = c0.consulted.union(c1.map_or(MisconceptionSet::EMPTY, |c| c.consulted)).intersection(set);
            let differs = c1.is_some_and(|c| !c.output.structurally_eq(&c0.output));
            if fired.is_empty() && !differs {
                continue;
            }
            let operand = p.find(c0.operand).expect("coercions name program nodes");
            let line = step_line(c0.operand, p.source_of(operand).to_string(), Ok(c0.output.clone()), Some(c0.kind));
            if texts.contains(&line.text) {
                continue;
            }
            texts.push(line.text.clone());
            emit_messages(&mut ex.lines, fired, &mut pending, &mut emitted);
            ex.lines.push(Line::Step(line));
        }

        let fired = s0.consulted.union(s1.map_or(MisconceptionSet::EMPTY, |s| s.consulted)).intersection(set);
        let differs = s1.is_some_and(|s| !same_outcome(&s.output, &s0.output));
        if s0.node == root {
            emit_messages(&mut ex.lines, fired, &mut pending, &mut emitted);
            break;
        }
        if (fired.is_empty() && !differs) || node.is_literal() || node.is_container_literal() {
            continue;
        }
        emit_messages(&mut ex.lines, fired, &mut pending, &mut emitted);
        ex.lines.push(Line::Step(step_line(s0.node, p.source_of(node).to_string(), s0.output.clone(), None)));
    }

    emit_messages(&mut ex.lines, pending, &mut pending.clone(), &mut emitted);
    let source = if p.header.is_some() { String::from("your program") } else { p.source_of(&p.expr).to_string() };
    ex.final_line = Some(step_line(root, source, truth.result.clone(), None));
    Ok(ex)
}

fn step_line(node: NodeId, source: String, value: Outcome, conversion: Option<CoercionKind>) -> StepLine {
    let text = format!("So {source} gives {}.", display_outcome(&value));
    StepLine { node, source, value, conversion, text }
}

/// Emits, in index order, the messages of `fired` flags not yet reported,
/// each followed by its companion message when that one is not otherwise due.
fn emit_messages(lines: &mut Vec<Line>, fired: MisconceptionSet, pending: &mut MisconceptionSet, emitted: &mut MisconceptionSet) {
    for id in fired.intersection(*pending).iter() {
        lines.push(Line::Message { id, text: id.message(), companion: false });
        emitted.insert(id);
        *pending = pending.without(id);
        if let Some(c) = id.companion() {
            if !emitted.contains(c) && !pending.contains(c) {
                lines.push(Line::Message { id: c, text: c.message(), companion: true });
                emitted.insert(c);
            }
        }
    }
}

/// Pairs each true-semantics conversion with the misinterpreter's
/// conversion of the same operand and kind, by occurrence number.
fn align<'a>(truth: &'a [Coercion], wrong: &'a [Coercion]) -> Vec<(&'a Coercion, Option<&'a Coercion>)> {
    truth
        .iter()
        .enumerate()
        .map(|(i, c0)| {
            let nth = truth[..i].iter().filter(|c| c.operand == c0.operand && c.kind == c0.kind).count();
            let c1 = wrong.iter().filter(|c| c.operand == c0.operand && c.kind == c0.kind).nth(nth);
            (c0, c1)
        })
        .collect()
}

/// Applies a recorded conversion kind to a value under the true semantics.
/// Used to check that conversion lines quote what the operand converts to.
pub fn apply_conversion(kind: CoercionKind, v: &JsValue) -> Option<JsValue> {
    use crate::lang::parse;
    let src = match kind {
        CoercionKind::ToString | CoercionKind::ToPrimitive => format!("(\"\" + {})", literal(v)?),
        CoercionKind::ToNumber => format!("(+{})", literal(v)?),
        CoercionKind::ToBoolean => format!("(!(!{}))", literal(v)?),
        _ => return None,
    };
    let p = parse(&src).ok()?;
    evaluate(&p, MisconceptionSet::EMPTY).result.ok()
}

fn literal(v: &JsValue) -> Option<String> {
    match v {
        JsValue::Number(x) if x.is_nan() => Some(String::from("NaN")),
        JsValue::Number(x) if x.is_infinite() => Some(String::from(if *x > 0.0 { "Infinity" } else { "(-Infinity)" })),
        _ => Some(v.display().to_string()),
    }
}

/// Re-evaluation helper for soundness checks: the true value of a quoted
/// subexpression, with the line's conversion applied.
pub fn reevaluate(line: &StepLine) -> Option<Outcome> {
    let p = crate::lang::parse(&line.source).ok()?;
    let out: EvalOutcome = evaluate(&p, MisconceptionSet::EMPTY);
    match line.conversion {
        None => Some(out.result),
        Some(kind) => Some(Ok(apply_conversion(kind, &out.result.ok()?)?)),
    }
}
