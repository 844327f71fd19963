use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifier of an AST node, assigned in pre-order over the whole program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Byte range into the program's source file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// A runtime value. Option values are always `Bool` or `Sym`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Sym(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Bool,
    Enum(Vec<String>),
}

impl Domain {
    pub fn values(&self) -> Vec<Value> {
        match self {
            Domain::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Domain::Enum(vs) => vs.iter().cloned().map(Value::Sym).collect(),
        }
    }

    pub fn contains(&self, value: &Value) -> bool {
        match (self, value) {
            (Domain::Bool, Value::Bool(_)) => true,
            (Domain::Enum(vs), Value::Sym(s)) => vs.contains(s),
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Domain::Bool => 2,
            Domain::Enum(vs) => vs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionDecl {
    pub id: NodeId,
    pub span: Span,
    pub name: String,
    pub domain: Domain,
    pub default: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub id: NodeId,
    pub span: Span,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Function {
    /// Doubles as the function's entry node in dependence graphs.
    pub id: NodeId,
    pub span: Span,
    /// `fn name(params)` without the body.
    pub header: Span,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub id: NodeId,
    pub span: Span,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Assign {
        var: String,
        value: Expr,
    },
    If {
        cond: Expr,
        then_body: Vec<Stmt>,
        else_body: Option<Vec<Stmt>>,
    },
    Repeat {
        count: Expr,
        body: Vec<Stmt>,
    },
    Call {
        target: Option<String>,
        callee: String,
        args: Vec<Expr>,
    },
    Return {
        value: Option<Expr>,
    },
    Work {
        amount: Expr,
    },
}

impl Stmt {
    /// The part of the statement worth highlighting: the whole statement for
    /// simple statements, the `if cond` / `repeat count` head for compound ones.
    pub fn head_span(&self) -> Span {
        match &self.kind {
            StmtKind::If { cond, .. } => Span::new(self.span.start, cond.span.end),
            StmtKind::Repeat { count, .. } => Span::new(self.span.start, count.span.end),
            _ => self.span,
        }
    }

    /// Expressions evaluated by this statement itself (not by nested blocks).
    pub fn exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Assign { value, .. } => vec![value],
            StmtKind::If { cond, .. } => vec![cond],
            StmtKind::Repeat { count, .. } => vec![count],
            StmtKind::Call { args, .. } => args.iter().collect(),
            StmtKind::Return { value } => value.iter().collect(),
            StmtKind::Work { amount } => vec![amount],
        }
    }

    /// Nested statement blocks, in source order.
    pub fn blocks(&self) -> Vec<&[Stmt]> {
        match &self.kind {
            StmtKind::If {
                then_body,
                else_body,
                ..
            } => {
                let mut v = vec![then_body.as_slice()];
                if let Some(e) = else_body {
                    v.push(e.as_slice());
                }
                v
            }
            StmtKind::Repeat { body, .. } => vec![body.as_slice()],
            _ => Vec::new(),
        }
    }

    /// Variable defined by this statement, if any.
    pub fn defined_var(&self) -> Option<&str> {
        match &self.kind {
            StmtKind::Assign { var, .. } => Some(var),
            StmtKind::Call {
                target: Some(t), ..
            } => Some(t),
            _ => None,
        }
    }

    /// Variables read by this statement's own expressions.
    pub fn used_vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for e in self.exprs() {
            e.collect_vars(&mut out);
        }
        out
    }

    /// Whether a `return` occurs anywhere inside this statement.
    pub fn contains_return(&self) -> bool {
        matches!(self.kind, StmtKind::Return { .. })
            || self
                .blocks()
                .iter()
                .any(|b| b.iter().any(Stmt::contains_return))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub id: NodeId,
    pub span: Span,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Lit(Value),
    Var(String),
    /// `option("NAME")`: reads the value of a configuration option.
    OptionLoad(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Unary(_, e) => vec![e],
            ExprKind::Binary(_, l, r) => vec![l, r],
            _ => Vec::new(),
        }
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.kind {
            ExprKind::Var(v) => out.push(v),
            _ => {
                for c in self.children() {
                    c.collect_vars(out);
                }
            }
        }
    }

    /// Option-load nodes inside this expression, in pre-order.
    pub fn option_loads(&self) -> Vec<(&str, NodeId)> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let ExprKind::OptionLoad(name) = &e.kind {
                out.push((name.as_str(), e.id));
            }
        });
        out
    }

    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl BinOp {
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 6,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "||",
            BinOp::And => "&&",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
        }
    }
}

/// A parsed and validated MiniConf program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub file: String,
    pub options: Vec<OptionDecl>,
    pub functions: Vec<Function>,
    pub entry: String,
}

/// Borrowed view of any node, as yielded by [`Program::walk`].
#[derive(Debug, Clone, Copy)]
pub enum NodeRef<'a> {
    Option(&'a OptionDecl),
    Function(&'a Function),
    Param(&'a Param),
    Stmt(&'a Stmt),
    Expr(&'a Expr),
}

impl NodeRef<'_> {
    pub fn id(&self) -> NodeId {
        match self {
            NodeRef::Option(o) => o.id,
            NodeRef::Function(f) => f.id,
            NodeRef::Param(p) => p.id,
            NodeRef::Stmt(s) => s.id,
            NodeRef::Expr(e) => e.id,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            NodeRef::Option(o) => o.span,
            NodeRef::Function(f) => f.span,
            NodeRef::Param(p) => p.span,
            NodeRef::Stmt(s) => s.span,
            NodeRef::Expr(e) => e.span,
        }
    }
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&Function> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn option(&self, name: &str) -> Option<&OptionDecl> {
        self.options.iter().find(|o| o.name == name)
    }

    /// Pre-order traversal: options, then each function with its params and body.
    /// The callback also receives the enclosing node's id (None for top-level items).
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(NodeRef<'a>, Option<NodeId>)) {
        for o in &self.options {
            f(NodeRef::Option(o), None);
        }
        for func in &self.functions {
            f(NodeRef::Function(func), None);
            for p in &func.params {
                f(NodeRef::Param(p), Some(func.id));
            }
            walk_block(&func.body, func.id, f);
        }
    }

    /// Copy with every span reset, for structural comparison.
    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        p.file.clear();
        for o in &mut p.options {
            o.span = Span::default();
        }
        for func in &mut p.functions {
            func.span = Span::default();
            func.header = Span::default();
            for param in &mut func.params {
                param.span = Span::default();
            }
            for s in &mut func.body {
                clear_stmt(s);
            }
        }
        p
    }
}

fn walk_block<'a>(
    body: &'a [Stmt],
    parent: NodeId,
    f: &mut impl FnMut(NodeRef<'a>, Option<NodeId>),
) {
    for s in body {
        f(NodeRef::Stmt(s), Some(parent));
        for e in s.exprs() {
            walk_expr(e, s.id, f);
        }
        for b in s.blocks() {
            walk_block(b, s.id, f);
        }
    }
}

fn walk_expr<'a>(e: &'a Expr, parent: NodeId, f: &mut impl FnMut(NodeRef<'a>, Option<NodeId>)) {
    f(NodeRef::Expr(e), Some(parent));
    for c in e.children() {
        walk_expr(c, e.id, f);
    }
}

fn clear_stmt(s: &mut Stmt) {
    s.span = Span::default();
    match &mut s.kind {
        StmtKind::Assign { value, .. } => clear_expr(value),
        StmtKind::If {
            cond,
            then_body,
            else_body,
        } => {
            clear_expr(cond);
            then_body.iter_mut().for_each(clear_stmt);
            if let Some(e) = else_body {
                e.iter_mut().for_each(clear_stmt);
            }
        }
        StmtKind::Repeat { count, body } => {
            clear_expr(count);
            body.iter_mut().for_each(clear_stmt);
        }
        StmtKind::Call { args, .. } => args.iter_mut().for_each(clear_expr),
        StmtKind::Return { value } => {
            if let Some(v) = value {
                clear_expr(v)
            }
        }
        StmtKind::Work { amount } => clear_expr(amount),
    }
}

fn clear_expr(e: &mut Expr) {
    e.span = Span::default();
    match &mut e.kind {
        ExprKind::Unary(_, x) => clear_expr(x),
        ExprKind::Binary(_, l, r) => {
            clear_expr(l);
            clear_expr(r);
        }
        _ => {}
    }
}
