//! Bottom-up enumeration of closed expressions over the literal pool,
//! keeping one representative per observational class. Two expressions are
//! in the same class when they agree under the empty set and under every
//! singleton set.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashSet;

use crate::lang::{same_outcome, BinaryOp, Expr, ExprKind, JsValue, Outcome, UnaryOp};
use crate::misconceptions::{MisconceptionId, MisconceptionSet};
use crate::semantics::eval_given;

/// Literals the enumerator draws from, in enumeration order.
pub fn literal_pool() -> Vec<Expr> {
    let s = |v: &str| Expr::new(ExprKind::String(String::from(v)));
    vec![
        Expr::new(ExprKind::Undefined),
        Expr::new(ExprKind::Null),
        Expr::new(ExprKind::Bool(true)),
        Expr::new(ExprKind::Bool(false)),
        Expr::new(ExprKind::Number(0.0)),
        Expr::new(ExprKind::Number(1.0)),
        Expr::new(ExprKind::Number(2.0)),
        Expr::new(ExprKind::Number(10.0)),
        s(""),
        s("10"),
        s("abc"),
        s(","),
        s("["),
        Expr::new(ExprKind::Array(Vec::new())),
        Expr::new(ExprKind::Object(Vec::new())),
    ]
}

/// Outcomes under the empty set and every singleton that changes it.
#[derive(Debug, Clone)]
pub struct Signature {
    pub base: Outcome,
    pub consulted: MisconceptionSet,
    pub diffs: Vec<(MisconceptionId, Outcome)>,
}

impl Signature {
    pub fn under(&self, id: MisconceptionId) -> &Outcome {
        self.diffs.iter().find(|(j, _)| *j == id).map_or(&self.base, |(_, o)| o)
    }

    /// Whether the singleton `{m}` alone separates this expression from
    /// the true semantics and from every other singleton outside `exclude`.
    pub fn isolates(&self, m: MisconceptionId, exclude: MisconceptionSet) -> bool {
        let Some((_, target)) = self.diffs.iter().find(|(j, _)| *j == m) else {
            return false;
        };
        self.diffs.iter().all(|(j, o)| *j == m || exclude.contains(*j) || !same_outcome(o, target))
    }

    fn key(&self) -> Box<[u8]> {
        let mut k = Vec::new();
        encode(&self.base, &mut k);
        for (j, o) in &self.diffs {
            k.push(0xff);
            k.push(j.index());
            encode(o, &mut k);
        }
        k.into_boxed_slice()
    }
}

/// Injective byte encoding consistent with [`same_outcome`].
fn encode(o: &Outcome, out: &mut Vec<u8>) {
    match o {
        Err(e) => {
            out.push(0);
            out.push(e.kind as u8);
        }
        Ok(v) => encode_value(v, out),
    }
}

fn encode_value(v: &JsValue, out: &mut Vec<u8>) {
    match v {
        JsValue::Undefined => out.push(1),
        JsValue::Null => out.push(2),
        JsValue::Boolean(b) => out.extend_from_slice(&[3, *b as u8]),
        JsValue::Number(x) => {
            out.push(4);
            let bits = if x.is_nan() { f64::NAN.to_bits() } else if *x == 0.0 { 0 } else { x.to_bits() };
            out.extend_from_slice(&bits.to_le_bytes());
        }
        JsValue::String(s) => {
            out.push(5);
            encode_str(s, out);
        }
        JsValue::Array(a) => {
            out.push(6);
            out.extend_from_slice(&(a.elems.len() as u32).to_le_bytes());
            for e in &a.elems {
                encode_value(e, out);
            }
        }
        JsValue::Object(o) => {
            out.push(7);
            out.extend_from_slice(&(o.props.len() as u32).to_le_bytes());
            for (k, e) in &o.props {
                encode_str(k, out);
                encode_value(e, out);
            }
        }
    }
}

fn encode_str(s: &str, out: &mut Vec<u8>) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

pub struct Class {
    pub expr: Expr,
    pub sig: Signature,
}

#[derive(Clone, Copy)]
enum Shape {
    Unary(UnaryOp),
    Sort,
    Array1,
    Binary(BinaryOp),
    Index,
    Array2,
    Conditional,
}

impl Shape {
    const ORDER: [Shape; 18] = [
        Shape::Unary(UnaryOp::Typeof),
        Shape::Unary(UnaryOp::Not),
        Shape::Unary(UnaryOp::Plus),
        Shape::Unary(UnaryOp::Minus),
        Shape::Sort,
        Shape::Array1,
        Shape::Binary(BinaryOp::Add),
        Shape::Binary(BinaryOp::Sub),
        Shape::Binary(BinaryOp::LooseEq),
        Shape::Binary(BinaryOp::StrictEq),
        Shape::Binary(BinaryOp::Lt),
        Shape::Binary(BinaryOp::Ge),
        Shape::Binary(BinaryOp::And),
        Shape::Binary(BinaryOp::Or),
        Shape::Binary(BinaryOp::Nullish),
        Shape::Index,
        Shape::Array2,
        Shape::Conditional,
    ];

    fn arity(self) -> usize {
        match self {
            Shape::Unary(_) | Shape::Sort | Shape::Array1 => 1,
            Shape::Binary(_) | Shape::Index | Shape::Array2 => 2,
            Shape::Conditional => 3,
        }
    }

    fn build(self, mut kids: Vec<Expr>) -> Expr {
        let mut next = || Box::new(kids.remove(0));
        Expr::new(match self {
            Shape::Unary(op) => ExprKind::Unary(op, next()),
            Shape::Sort => ExprKind::Sort(next()),
            Shape::Array1 | Shape::Array2 => return Expr::new(ExprKind::Array(kids)),
            Shape::Binary(op) => ExprKind::Binary(op, next(), next()),
            Shape::Index => ExprKind::Index(next(), next()),
            Shape::Conditional => ExprKind::Conditional(next(), next(), next()),
        })
    }

    /// The node with placeholder children; only its kind matters to
    /// [`eval_given`].
    fn template(self) -> Expr {
        self.build(vec![Expr::new(ExprKind::Undefined); self.arity()])
    }
}

fn signature_of(template: &Expr, kids: &[&Signature]) -> Signature {
    let inputs: Vec<(&Outcome, MisconceptionSet)> = kids.iter().map(|k| (&k.base, k.consulted)).collect();
    let (base, consulted) = eval_given(template, MisconceptionSet::EMPTY, &inputs);
    let mut diffs = Vec::new();
    for j in consulted.iter() {
        let inputs: Vec<(&Outcome, MisconceptionSet)> = kids.iter().map(|k| (k.under(j), k.consulted)).collect();
        let (out, _) = eval_given(template, MisconceptionSet::single(j), &inputs);
        if !same_outcome(&out, &base) {
            diffs.push((j, out));
        }
    }
    Signature { base, consulted, diffs }
}

fn leaf_signature(e: &Expr) -> Signature {
    let (base, consulted) = eval_given(e, MisconceptionSet::EMPTY, &[]);
    Signature { base, consulted, diffs: Vec::new() }
}

/// Whether enumeration should go on after visiting a class.
pub enum Step {
    Continue,
    Stop,
}

/// Enumerates candidate expressions by increasing size up to `budget`,
/// composing children only from class representatives. `visit` sees every
/// candidate with its signature, a builder for its expression, and whether
/// it opened a new class. Returns the number of candidates examined.
pub fn enumerate(budget: usize, mut visit: impl FnMut(&Signature, &dyn Fn() -> Expr, bool) -> Step) -> u64 {
    let mut levels: Vec<Vec<Class>> = vec![Vec::new()];
    let mut seen: HashSet<Box<[u8]>> = HashSet::new();
    let mut examined = 0u64;
    let templates: Vec<(Shape, Expr)> = Shape::ORDER.iter().map(|s| (*s, s.template())).collect();

    for size in 1..=budget {
        let mut level = Vec::new();
        let keep = size < budget;
        let mut offer = |expr: &dyn Fn() -> Expr, sig: Signature, level: &mut Vec<Class>| -> bool {
            examined += 1;
            let fresh = seen.insert(sig.key());
            let stop = matches!(visit(&sig, expr, fresh), Step::Stop);
            if fresh && keep {
                level.push(Class { expr: expr(), sig });
            }
            stop
        };

        if size == 1 {
            for lit in literal_pool() {
                let sig = leaf_signature(&lit);
                if offer(&|| lit.clone(), sig, &mut level) {
                    return examined;
                }
            }
        }
        for (shape, template) in &templates {
            for sizes in splits(size - 1, shape.arity()) {
                if sizes.iter().any(|&s| levels[s].is_empty()) {
                    continue;
                }
                let mut idx = vec![0usize; sizes.len()];
                'tuples: loop {
                    let kids: Vec<&Class> = sizes.iter().zip(&idx).map(|(&s, &i)| &levels[s][i]).collect();
                    let sigs: Vec<&Signature> = kids.iter().map(|k| &k.sig).collect();
                    let sig = signature_of(template, &sigs);
                    let build = || shape.build(kids.iter().map(|k| k.expr.clone()).collect());
                    if offer(&build, sig, &mut level) {
                        return examined;
                    }
                    // Odometer over the child class lists, last position fastest.
                    let mut pos = sizes.len();
                    loop {
                        if pos == 0 {
                            break 'tuples;
                        }
                        pos -= 1;
                        idx[pos] += 1;
                        if idx[pos] < levels[sizes[pos]].len() {
                            break;
                        }
                        idx[pos] = 0;
                    }
                }
            }
        }
        levels.push(level);
    }
    examined
}

/// Compositions of `total` into `parts` positive sizes, in lexicographic order.
fn splits(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return if total >= 1 { vec![vec![total]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..total {
        for mut rest in splits(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
