//! MiniConf: a small configurable language used as the subject system.
//!
//! Programs declare options (boolean or enumerated), then functions whose
//! statements consume abstract cost through `work(n)`. Options are read with
//! `option("NAME")` expressions; those expressions are the option-load sites
//! used as slicing sources.

mod ast;
mod lexer;
mod parser;
mod pretty;

use std::collections::{BTreeMap, BTreeSet};

pub use ast::*;
pub use parser::{parse_named, parse_program};
pub use pretty::pretty_print;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate option `{0}`")]
    DuplicateOption(String),
    #[error("duplicate function `{0}`")]
    DuplicateFunction(String),
    #[error("duplicate parameter `{0}`")]
    DuplicateParam(String),
    #[error("undeclared option `{0}`")]
    UndeclaredOption(String),
    #[error("call to undefined function `{0}`")]
    UndefinedFunction(String),
    #[error("`{callee}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        callee: String,
        expected: usize,
        found: usize,
    },
    #[error("entry function `{0}` is not defined")]
    MissingEntry(String),
    #[error("entry function `{0}` must not take parameters")]
    EntryHasParams(String),
    #[error("default value of option `{0}` is outside its domain")]
    DefaultOutsideDomain(String),
    #[error("enumeration option `{0}` needs at least two distinct values")]
    BadEnumeration(String),
}

impl ParseError {
    pub(crate) fn at(src: &str, offset: usize, kind: ParseErrorKind) -> Self {
        let (line, column) = line_col(src, offset);
        ParseError { kind, line, column }
    }

    pub(crate) fn syntax(src: &str, offset: usize, msg: impl Into<String>) -> Self {
        Self::at(src, offset, ParseErrorKind::Syntax(msg.into()))
    }
}

/// 1-based line and column (in characters) of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, before[line_start..].chars().count() + 1)
}

/// Every `option(NAME)` node, grouped by option. Declared options that are
/// never read map to an empty set.
pub fn option_load_sites(program: &Program) -> BTreeMap<String, BTreeSet<NodeId>> {
    let mut sites: BTreeMap<String, BTreeSet<NodeId>> = program
        .options
        .iter()
        .map(|o| (o.name.clone(), BTreeSet::new()))
        .collect();
    program.walk(&mut |node, _| {
        if let NodeRef::Expr(Expr {
            id,
            kind: ExprKind::OptionLoad(name),
            ..
        }) = node
        {
            sites.entry(name.clone()).or_default().insert(*id);
        }
    });
    sites
}

/// Per-node facts derived once from a program: owning function, span and
/// enclosing node.
#[derive(Debug, Clone)]
pub struct NodeTable {
    entries: BTreeMap<NodeId, NodeInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeInfo {
    pub kind: NodeKind,
    pub span: Span,
    /// Span worth highlighting in a source view.
    pub highlight: Span,
    /// Owning function; `None` for option declarations.
    pub function: Option<String>,
    pub parent: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    OptionDecl,
    FunctionEntry,
    Param,
    Stmt,
    OptionLoad,
    Expr,
}

impl NodeTable {
    pub fn new(program: &Program) -> Self {
        let mut entries = BTreeMap::new();
        for func in &program.functions {
            let owner = Some(func.name.clone());
            entries.insert(
                func.id,
                NodeInfo {
                    kind: NodeKind::FunctionEntry,
                    span: func.span,
                    highlight: func.header,
                    function: owner.clone(),
                    parent: None,
                },
            );
        }
        let mut current: Option<String> = None;
        program.walk(&mut |node, parent| {
            let (kind, highlight) = match node {
                NodeRef::Option(o) => (NodeKind::OptionDecl, o.span),
                NodeRef::Function(f) => {
                    current = Some(f.name.clone());
                    return;
                }
                NodeRef::Param(p) => (NodeKind::Param, p.span),
                NodeRef::Stmt(s) => (NodeKind::Stmt, s.head_span()),
                NodeRef::Expr(e) => match e.kind {
                    ExprKind::OptionLoad(_) => (NodeKind::OptionLoad, e.span),
                    _ => (NodeKind::Expr, e.span),
                },
            };
            let function = match node {
                NodeRef::Option(_) => None,
                _ => current.clone(),
            };
            entries.insert(
                node.id(),
                NodeInfo {
                    kind,
                    span: node.span(),
                    highlight,
                    function,
                    parent,
                },
            );
        });
        NodeTable { entries }
    }

    pub fn get(&self, id: NodeId) -> Option<&NodeInfo> {
        self.entries.get(&id)
    }

    pub fn function_of(&self, id: NodeId) -> Option<&str> {
        self.entries.get(&id).and_then(|i| i.function.as_deref())
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &NodeInfo)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let p = parse_program("option A bool default false; fn main(){ work(5); }").unwrap();
        assert_eq!(p.options.len(), 1);
        assert_eq!(p.functions.len(), 1);
        assert_eq!(p.entry, "main");
        assert_eq!(p.options[0].default, Value::Bool(false));
    }

    #[test]
    fn undeclared_option_is_rejected() {
        let err = parse_program("fn main(){ work(option(\"X\")); }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UndeclaredOption("X".into()));
        assert_eq!((err.line, err.column), (1, 17));
    }

    #[test]
    fn syntax_error_reports_line_and_column() {
        let err = parse_program("fn main() {\n  work(5)\n}").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        assert_eq!((err.line, err.column), (3, 1));
    }

    #[test]
    fn duplicate_declarations() {
        let e = parse_program("option A bool default false; option A bool default true; fn main(){}")
            .unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateOption("A".into()));
        let e = parse_program("fn main(){} fn main(){}").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateFunction("main".into()));
        let e = parse_program("fn main(){} fn f(a, a){}").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateParam("a".into()));
    }

    #[test]
    fn call_validation() {
        let e = parse_program("fn main(){ g(); }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndefinedFunction("g".into()));
        let e = parse_program("fn main(){ f(1); } fn f(){}").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { expected: 0, found: 1, .. }));
        let e = parse_program("fn helper(){}").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingEntry("main".into()));
    }

    #[test]
    fn enumeration_domains() {
        let p = parse_program(
            "option F enum { png, jpg, webp } default jpg; fn main(){ if option(\"F\") == \"png\" { work(1); } }",
        )
        .unwrap();
        assert_eq!(p.options[0].domain.len(), 3);
        assert_eq!(p.options[0].default, Value::Sym("jpg".into()));
        let e = parse_program("option F enum { png } default png; fn main(){}").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::BadEnumeration("F".into()));
        let e = parse_program("option F enum { a, a } default a; fn main(){}").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::BadEnumeration("F".into()));
        let e = parse_program("option F enum { a, b } default c; fn main(){}").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DefaultOutsideDomain("F".into()));
    }

    #[test]
    fn node_ids_are_preorder() {
        let p = parse_program(
            "option A bool default false;\nfn main() { x = 1 + 2; f(x); }\nfn f(p) { work(p); }",
        )
        .unwrap();
        let mut ids = Vec::new();
        p.walk(&mut |n, _| ids.push(n.id().0));
        let expected: Vec<u32> = (0..ids.len() as u32).collect();
        assert_eq!(ids, expected);
        assert_eq!(p.options[0].id, NodeId(0));
        assert_eq!(p.functions[0].id, NodeId(1));
    }

    #[test]
    fn load_sites() {
        let p = parse_program(
            "option A bool default false; option B bool default false;\n\
             fn main() { x = option(\"A\"); if option(A) { work(1); } }",
        )
        .unwrap();
        let sites = option_load_sites(&p);
        assert_eq!(sites["A"].len(), 2);
        assert!(sites["B"].is_empty());
    }

    #[test]
    fn spans_nest() {
        let src = "fn main() {\n  if (1 + 2) * 3 > 4 {\n    work(5);\n  } else { repeat 2 { work(1); } }\n}\n";
        let p = parse_program(src).unwrap();
        let mut spans = BTreeMap::new();
        p.walk(&mut |n, parent| {
            spans.insert(n.id(), n.span());
            if let Some(parent) = parent {
                assert!(spans[&parent].contains(&n.span()), "{:?}", n.id());
            }
        });
        let work = &p.functions[0].body[0];
        assert_eq!(&src[work.head_span().start..work.head_span().end], "if (1 + 2) * 3 > 4");
    }

    #[test]
    fn pretty_print_minimal() {
        let p = parse_program("option A bool default false; fn main(){ work(5); }").unwrap();
        assert_eq!(
            pretty_print(&p),
            "option A bool default false;\n\nfn main() {\n    work(5);\n}\n"
        );
    }

    #[test]
    fn pretty_print_nested_conditionals_golden() {
        let src = "option A bool default false; option M enum {lo, hi} default lo;\n\
                   fn main() { if option(\"A\") { if option(\"M\") == \"hi\" { work(2); } else { work(1); } } \
                   else if 1 < 2 { x = f(3 - (1 - 1)); } else { return; } }\n\
                   fn f(n) { repeat n { work(n * (n + 1)); } return -n; }";
        let expected = "\
option A bool default false;
option M enum { lo, hi } default lo;

fn main() {
    if option(\"A\") {
        if option(\"M\") == \"hi\" {
            work(2);
        } else {
            work(1);
        }
    } else if 1 < 2 {
        x = f(3 - (1 - 1));
    } else {
        return;
    }
}

fn f(n) {
    repeat n {
        work(n * (n + 1));
    }
    return -n;
}
";
        let p = parse_program(src).unwrap();
        let printed = pretty_print(&p);
        assert_eq!(printed, expected);
        let again = pretty_print(&parse_program(&printed).unwrap());
        assert_eq!(again, printed);
        assert_eq!(parse_program(&printed).unwrap().without_spans(), p.without_spans());
    }

    #[test]
    fn calls_must_be_statements() {
        assert!(parse_program("fn main(){ x = 1 + f(); } fn f(){}").is_err());
    }

    #[test]
    fn node_table_owners() {
        let p = parse_program("option A bool default true; fn main(){ f(option(\"A\")); } fn f(p){ work(1); }")
            .unwrap();
        let t = NodeTable::new(&p);
        let load = *option_load_sites(&p)["A"].iter().next().unwrap();
        assert_eq!(t.function_of(load), Some("main"));
        assert_eq!(t.get(load).unwrap().kind, NodeKind::OptionLoad);
        assert_eq!(t.function_of(p.functions[1].body[0].id), Some("f"));
        assert_eq!(t.get(p.functions[1].id).unwrap().kind, NodeKind::FunctionEntry);
    }
}
