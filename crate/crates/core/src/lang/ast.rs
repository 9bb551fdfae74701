use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

/// Stable identifier of an expression node within one [`Program`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

/// Byte range into [`Program::text`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Typeof,
    Not,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    StrictEq,
    LooseEq,
    Add,
    Sub,
    Lt,
    Ge,
    And,
    Or,
    Nullish,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 4] = [UnaryOp::Typeof, UnaryOp::Not, UnaryOp::Plus, UnaryOp::Minus];

    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Typeof => "typeof",
            UnaryOp::Not => "!",
            UnaryOp::Plus => "+",
            UnaryOp::Minus => "-",
        }
    }
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 9] = [
        BinaryOp::StrictEq,
        BinaryOp::LooseEq,
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Lt,
        BinaryOp::Ge,
        BinaryOp::And,
        BinaryOp::Or,
        BinaryOp::Nullish,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::StrictEq => "===",
            BinaryOp::LooseEq => "==",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Lt => "<",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
            BinaryOp::Nullish => "??",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub id: NodeId,
    pub span: Span,
    pub kind: ExprKind,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Undefined,
    Null,
    Bool(bool),
    Number(f64),
    String(String),
    Array(Vec<Expr>),
    Object(Vec<(String, Expr)>),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Conditional(Box<Expr>, Box<Expr>, Box<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Sort(Box<Expr>),
    /// A function parameter. Only present in a function body before the
    /// call is inlined; a parsed [`Program`] never contains one.
    Param(String),
}

impl Expr {
    /// A node with a placeholder id and span; [`Program`] construction renumbers.
    pub fn new(kind: ExprKind) -> Self {
        Expr { id: NodeId(0), span: Span::default(), kind }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Undefined
            | ExprKind::Null
            | ExprKind::Bool(_)
            | ExprKind::Number(_)
            | ExprKind::String(_)
            | ExprKind::Param(_) => Vec::new(),
            ExprKind::Array(elems) => elems.iter().collect(),
            ExprKind::Object(props) => props.iter().map(|(_, e)| e).collect(),
            ExprKind::Unary(_, e) | ExprKind::Sort(e) => alloc::vec![&**e],
            ExprKind::Binary(_, l, r) | ExprKind::Index(l, r) => alloc::vec![&**l, &**r],
            ExprKind::Conditional(c, t, e) => alloc::vec![&**c, &**t, &**e],
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Expr> {
        match &mut self.kind {
            ExprKind::Undefined
            | ExprKind::Null
            | ExprKind::Bool(_)
            | ExprKind::Number(_)
            | ExprKind::String(_)
            | ExprKind::Param(_) => Vec::new(),
            ExprKind::Array(elems) => elems.iter_mut().collect(),
            ExprKind::Object(props) => props.iter_mut().map(|(_, e)| e).collect(),
            ExprKind::Unary(_, e) | ExprKind::Sort(e) => alloc::vec![&mut **e],
            ExprKind::Binary(_, l, r) | ExprKind::Index(l, r) => alloc::vec![&mut **l, &mut **r],
            ExprKind::Conditional(c, t, e) => alloc::vec![&mut **c, &mut **t, &mut **e],
        }
    }

    /// Literal leaves, including empty `[]` and `{}`.
    pub fn is_literal(&self) -> bool {
        match &self.kind {
            ExprKind::Undefined
            | ExprKind::Null
            | ExprKind::Bool(_)
            | ExprKind::Number(_)
            | ExprKind::String(_) => true,
            ExprKind::Array(elems) => elems.is_empty(),
            ExprKind::Object(props) => props.is_empty(),
            _ => false,
        }
    }

    /// Array and object literals, empty or not.
    pub fn is_container_literal(&self) -> bool {
        matches!(self.kind, ExprKind::Array(_) | ExprKind::Object(_))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Visits nodes in evaluation (post-) order.
    pub fn walk_post_order<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        for c in self.children() {
            c.walk_post_order(f);
        }
        f(self);
    }

    /// Assigns ids in pre-order starting at `next`.
    pub(crate) fn renumber(&mut self, next: &mut u32) {
        self.id = NodeId(*next);
        *next += 1;
        for c in self.children_mut() {
            c.renumber(next);
        }
    }

    pub(crate) fn has_params(&self) -> bool {
        matches!(self.kind, ExprKind::Param(_)) || self.children().iter().any(|c| c.has_params())
    }

    /// Structural equality of trees, ignoring ids and spans. Numbers compare
    /// by value with NaN equal to itself.
    pub fn same_shape(&self, other: &Expr) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Undefined, Undefined) | (Null, Null) => true,
            (Bool(a), Bool(b)) => a == b,
            (Number(a), Number(b)) => a == b || (a.is_nan() && b.is_nan()),
            (String(a), String(b)) | (Param(a), Param(b)) => a == b,
            (Array(a), Array(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_shape(y))
            }
            (Object(a), Object(b)) => {
                a.len() == b.len()
                    && a.iter().zip(b).all(|((ka, x), (kb, y))| ka == kb && x.same_shape(y))
            }
            (Unary(o1, a), Unary(o2, b)) => o1 == o2 && a.same_shape(b),
            (Binary(o1, a1, b1), Binary(o2, a2, b2)) => {
                o1 == o2 && a1.same_shape(a2) && b1.same_shape(b2)
            }
            (Conditional(a1, b1, c1), Conditional(a2, b2, c2)) => {
                a1.same_shape(a2) && b1.same_shape(b2) && c1.same_shape(c2)
            }
            (Index(a1, b1), Index(a2, b2)) => a1.same_shape(a2) && b1.same_shape(b2),
            (Sort(a), Sort(b)) => a.same_shape(b),
            _ => false,
        }
    }
}

/// The one-function wrapper form: `function name(params) { return body; }`.
#[derive(Debug, Clone)]
pub struct FunctionHeader {
    pub name: String,
    pub params: Vec<String>,
    /// The body as written, still mentioning parameters.
    pub body: Expr,
}

/// A closed expression, optionally produced by inlining a single call.
///
/// `text` is what node spans index into: the original source for bare
/// expressions, and the canonical rendering of the inlined expression when
/// the program came with a function header.
#[derive(Debug, Clone)]
pub struct Program {
    pub header: Option<FunctionHeader>,
    pub expr: Expr,
    pub text: String,
    node_count: u32,
}

impl Program {
    /// Wraps a closed expression, assigning fresh node ids.
    pub fn new(mut expr: Expr, text: String, header: Option<FunctionHeader>) -> Self {
        let mut next = 0;
        expr.renumber(&mut next);
        Program { header, expr, text, node_count: next }
    }

    /// A program built from an expression without source; the text is the
    /// canonical rendering and spans are recomputed from it.
    pub fn from_expr(expr: Expr) -> Self {
        let text = super::unparse(&expr);
        let parsed = super::parse_expr(&text).expect("canonical rendering always parses");
        Program::new(parsed, text, None)
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    /// Source text of a node, as quoted in explanations.
    pub fn source_of(&self, expr: &Expr) -> &str {
        self.text.get(expr.span.start..expr.span.end).unwrap_or("")
    }

    pub fn find(&self, id: NodeId) -> Option<&Expr> {
        fn go(e: &Expr, id: NodeId) -> Option<&Expr> {
            if e.id == id {
                return Some(e);
            }
            e.children().into_iter().find_map(|c| go(c, id))
        }
        go(&self.expr, id)
    }
}
