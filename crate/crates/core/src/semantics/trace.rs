use alloc::vec::Vec;

use crate::lang::{JsValue, NodeId, Outcome, Span};
use crate::misconceptions::MisconceptionSet;

/// Abstract operations that can appear in a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoercionKind {
    ToString,
    ToNumber,
    ToPrimitive,
    ToBoolean,
    AbstractEquality,
    RelationalComparison,
    SortCompare,
    IndexLookup,
}

impl CoercionKind {
    pub fn name(self) -> &'static str {
        match self {
            CoercionKind::ToString => "ToString",
            CoercionKind::ToNumber => "ToNumber",
            CoercionKind::ToPrimitive => "ToPrimitive",
            CoercionKind::ToBoolean => "ToBoolean",
            CoercionKind::AbstractEquality => "AbstractEquality",
            CoercionKind::RelationalComparison => "RelationalComparison",
            CoercionKind::SortCompare => "SortCompare",
            CoercionKind::IndexLookup => "IndexLookup",
        }
    }
}

/// A conversion applied to one operand of a node. Only conversions that
/// change the value's type are recorded.
#[derive(Debug, Clone)]
pub struct Coercion {
    pub kind: CoercionKind,
    pub operand: NodeId,
    pub input: JsValue,
    pub output: JsValue,
    /// Flags consulted while performing this conversion.
    pub consulted: MisconceptionSet,
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub node: NodeId,
    pub span: Span,
    /// Outcomes of the children that were evaluated, in evaluation order.
    pub inputs: Vec<Outcome>,
    pub output: Outcome,
    /// The node-level abstract operation, if any.
    pub operation: Option<CoercionKind>,
    pub coercions: Vec<Coercion>,
    /// Flags consulted at this node outside any recorded operand conversion.
    pub consulted: MisconceptionSet,
}

impl TraceStep {
    /// Every flag consulted while computing this node, excluding children.
    pub fn all_consulted(&self) -> MisconceptionSet {
        self.coercions.iter().fold(self.consulted, |acc, c| acc.union(c.consulted))
    }
}

/// Result of one evaluation under a misconception set.
#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub result: Outcome,
    /// Post-order steps; empty when evaluated without tracing.
    pub trace: Vec<TraceStep>,
    pub consulted: MisconceptionSet,
}

impl EvalOutcome {
    pub fn step(&self, node: NodeId) -> Option<&TraceStep> {
        self.trace.iter().find(|s| s.node == node)
    }
}
