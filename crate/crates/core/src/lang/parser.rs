use std::collections::{BTreeSet, HashMap};

use super::ast::*;
use super::lexer::{tokenize, Tok};
use super::{ParseError, ParseErrorKind};

const KEYWORDS: &[&str] = &[
    "option", "bool", "enum", "default", "fn", "if", "else", "repeat", "work", "return", "true",
    "false", "entry",
];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Parses and validates a MiniConf program.
pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    parse_named("<input>", source)
}

/// Like [`parse_program`], recording `file` as the program's file name.
pub fn parse_named(file: &str, source: &str) -> Result<Program, ParseError> {
    let toks = tokenize(source)?;
    let mut p = Parser {
        src: source,
        toks,
        pos: 0,
    };
    let mut program = p.program(file)?;
    renumber(&mut program);
    validate(&program, source)?;
    Ok(program)
}

struct Parser<'s> {
    src: &'s str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

const PLACEHOLDER: NodeId = NodeId(0);

impl<'s> Parser<'s> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_end(&self) -> usize {
        self.toks[self.pos.saturating_sub(1)].1.end
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(self.src, self.span().start, msg)
    }

    fn expected(&self, what: &str) -> ParseError {
        self.error(format!("expected {what}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Span, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.expected(what))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Span, ParseError> {
        if self.is_kw(kw) {
            Ok(self.bump().1)
        } else {
            Err(self.expected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                let sp = self.bump().1;
                Ok((s, sp))
            }
            _ => Err(self.expected(what)),
        }
    }

    fn program(&mut self, file: &str) -> Result<Program, ParseError> {
        let mut options = Vec::new();
        let mut functions = Vec::new();
        let mut entry: Option<String> = None;
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Ident(s) if s == "option" => options.push(self.option_decl()?),
                Tok::Ident(s) if s == "fn" => functions.push(self.function()?),
                Tok::Ident(s) if s == "entry" => {
                    self.bump();
                    let (name, _) = self.ident("entry function name")?;
                    self.expect(Tok::Semi, "`;`")?;
                    entry = Some(name);
                }
                _ => return Err(self.expected("`option`, `fn` or `entry`")),
            }
        }
        Ok(Program {
            file: file.to_string(),
            options,
            functions,
            entry: entry.unwrap_or_else(|| "main".to_string()),
        })
    }

    fn option_decl(&mut self) -> Result<OptionDecl, ParseError> {
        let start = self.expect_kw("option")?.start;
        let (name, _) = self.ident("option name")?;
        let domain = if self.is_kw("bool") {
            self.bump();
            Domain::Bool
        } else if self.is_kw("enum") {
            self.bump();
            self.expect(Tok::LBrace, "`{`")?;
            let mut vals = vec![self.ident("enumeration value")?.0];
            while *self.peek() == Tok::Comma {
                self.bump();
                vals.push(self.ident("enumeration value")?.0);
            }
            self.expect(Tok::RBrace, "`}`")?;
            Domain::Enum(vals)
        } else {
            return Err(self.expected("`bool` or `enum`"));
        };
        self.expect_kw("default")?;
        let default_at = self.span().start;
        let default = match (self.peek().clone(), &domain) {
            (Tok::Ident(s), Domain::Bool) if s == "true" || s == "false" => {
                self.bump();
                Value::Bool(s == "true")
            }
            (Tok::Ident(s), Domain::Enum(_)) if !is_keyword(&s) => {
                self.bump();
                Value::Sym(s)
            }
            _ => return Err(self.expected("default value")),
        };
        let end = self.expect(Tok::Semi, "`;`")?.end;
        if !domain.contains(&default) {
            return Err(ParseError::at(
                self.src,
                default_at,
                ParseErrorKind::DefaultOutsideDomain(name),
            ));
        }
        if let Domain::Enum(vals) = &domain {
            let distinct: BTreeSet<_> = vals.iter().collect();
            if distinct.len() < 2 || distinct.len() != vals.len() {
                return Err(ParseError::at(
                    self.src,
                    start,
                    ParseErrorKind::BadEnumeration(name),
                ));
            }
        }
        Ok(OptionDecl {
            id: PLACEHOLDER,
            span: Span::new(start, end),
            name,
            domain,
            default,
        })
    }

    fn function(&mut self) -> Result<Function, ParseError> {
        let start = self.expect_kw("fn")?.start;
        let (name, _) = self.ident("function name")?;
        self.expect(Tok::LParen, "`(`")?;
        let mut params = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let (pname, sp) = self.ident("parameter name")?;
                params.push(Param {
                    id: PLACEHOLDER,
                    span: sp,
                    name: pname,
                });
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        let header_end = self.expect(Tok::RParen, "`)`")?.end;
        let body = self.block()?;
        Ok(Function {
            id: PLACEHOLDER,
            span: Span::new(start, self.prev_end()),
            header: Span::new(start, header_end),
            name,
            params,
            body,
        })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut stmts = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return Err(self.expected("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        self.bump();
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let start = self.span().start;
        let kind = match self.peek().clone() {
            Tok::Ident(kw) if kw == "if" => return self.if_stmt(),
            Tok::Ident(kw) if kw == "repeat" => {
                self.bump();
                let count = self.expr()?;
                let body = self.block()?;
                StmtKind::Repeat { count, body }
            }
            Tok::Ident(kw) if kw == "work" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let amount = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                self.expect(Tok::Semi, "`;`")?;
                StmtKind::Work { amount }
            }
            Tok::Ident(kw) if kw == "return" => {
                self.bump();
                let value = if *self.peek() == Tok::Semi {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(Tok::Semi, "`;`")?;
                StmtKind::Return { value }
            }
            Tok::Ident(name) if !is_keyword(&name) => {
                self.bump();
                match self.peek() {
                    Tok::LParen => {
                        let args = self.call_args()?;
                        self.expect(Tok::Semi, "`;`")?;
                        StmtKind::Call {
                            target: None,
                            callee: name,
                            args,
                        }
                    }
                    Tok::Assign => {
                        self.bump();
                        let is_call = matches!(self.peek(), Tok::Ident(s) if !is_keyword(s))
                            && *self.peek_at(1) == Tok::LParen;
                        let kind = if is_call {
                            let (callee, _) = self.ident("function name")?;
                            let args = self.call_args()?;
                            StmtKind::Call {
                                target: Some(name),
                                callee,
                                args,
                            }
                        } else {
                            StmtKind::Assign {
                                var: name,
                                value: self.expr()?,
                            }
                        };
                        self.expect(Tok::Semi, "`;`")?;
                        kind
                    }
                    _ => return Err(self.expected("`=` or `(`")),
                }
            }
            _ => return Err(self.expected("statement")),
        };
        Ok(Stmt {
            id: PLACEHOLDER,
            span: Span::new(start, self.prev_end()),
            kind,
        })
    }

    fn if_stmt(&mut self) -> Result<Stmt, ParseError> {
        let start = self.expect_kw("if")?.start;
        let cond = self.expr()?;
        let then_body = self.block()?;
        let else_body = if self.is_kw("else") {
            self.bump();
            if self.is_kw("if") {
                Some(vec![self.if_stmt()?])
            } else {
                Some(self.block()?)
            }
        } else {
            None
        };
        Ok(Stmt {
            id: PLACEHOLDER,
            span: Span::new(start, self.prev_end()),
            kind: StmtKind::If {
                cond,
                then_body,
                else_body,
            },
        })
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.expr()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(args)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::OrOr => BinOp::Or,
            Tok::AndAnd => BinOp::And,
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Percent => BinOp::Rem,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            lhs = Expr {
                id: PLACEHOLDER,
                span: lhs.span.to(rhs.span),
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let op = match self.peek() {
            Tok::Minus => UnOp::Neg,
            Tok::Bang => UnOp::Not,
            _ => return self.primary(),
        };
        let start = self.bump().1.start;
        let inner = self.unary()?;
        Ok(Expr {
            id: PLACEHOLDER,
            span: Span::new(start, inner.span.end),
            kind: ExprKind::Unary(op, Box::new(inner)),
        })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, sp) = (self.peek().clone(), self.span());
        let kind = match tok {
            Tok::Int(n) => {
                self.bump();
                ExprKind::Lit(Value::Int(n))
            }
            Tok::Str(s) => {
                self.bump();
                ExprKind::Lit(Value::Sym(s))
            }
            Tok::LParen => {
                self.bump();
                let mut inner = self.expr()?;
                let end = self.expect(Tok::RParen, "`)`")?.end;
                // Parentheses widen the span so that child spans stay nested.
                inner.span = Span::new(sp.start, end);
                return Ok(inner);
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                ExprKind::Lit(Value::Bool(s == "true"))
            }
            Tok::Ident(s) if s == "option" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let name = match self.peek().clone() {
                    Tok::Str(n) => {
                        self.bump();
                        n
                    }
                    Tok::Ident(n) if !is_keyword(&n) => {
                        self.bump();
                        n
                    }
                    _ => return Err(self.expected("option name")),
                };
                let end = self.expect(Tok::RParen, "`)`")?.end;
                return Ok(Expr {
                    id: PLACEHOLDER,
                    span: Span::new(sp.start, end),
                    kind: ExprKind::OptionLoad(name),
                });
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    return Err(self.error(
                        "calls are statements: write `x = f(...);` on its own line",
                    ));
                }
                ExprKind::Var(s)
            }
            _ => return Err(self.expected("expression")),
        };
        Ok(Expr {
            id: PLACEHOLDER,
            span: sp,
            kind,
        })
    }
}

/// Assigns NodeIds in pre-order (options, then functions with params and bodies).
fn renumber(p: &mut Program) {
    let mut next = 0u32;
    let mut fresh = || {
        let id = NodeId(next);
        next += 1;
        id
    };
    for o in &mut p.options {
        o.id = fresh();
    }
    for f in &mut p.functions {
        f.id = fresh();
        for param in &mut f.params {
            param.id = fresh();
        }
        for s in &mut f.body {
            renumber_stmt(s, &mut fresh);
        }
    }
}

fn renumber_stmt(s: &mut Stmt, fresh: &mut impl FnMut() -> NodeId) {
    s.id = fresh();
    match &mut s.kind {
        StmtKind::Assign { value, .. } => renumber_expr(value, fresh),
        StmtKind::If {
            cond,
            then_body,
            else_body,
        } => {
            renumber_expr(cond, fresh);
            for t in then_body {
                renumber_stmt(t, fresh);
            }
            for e in else_body.iter_mut().flatten() {
                renumber_stmt(e, fresh);
            }
        }
        StmtKind::Repeat { count, body } => {
            renumber_expr(count, fresh);
            for b in body {
                renumber_stmt(b, fresh);
            }
        }
        StmtKind::Call { args, .. } => {
            for a in args {
                renumber_expr(a, fresh);
            }
        }
        StmtKind::Return { value } => {
            if let Some(v) = value {
                renumber_expr(v, fresh);
            }
        }
        StmtKind::Work { amount } => renumber_expr(amount, fresh),
    }
}

fn renumber_expr(e: &mut Expr, fresh: &mut impl FnMut() -> NodeId) {
    e.id = fresh();
    match &mut e.kind {
        ExprKind::Unary(_, x) => renumber_expr(x, fresh),
        ExprKind::Binary(_, l, r) => {
            renumber_expr(l, fresh);
            renumber_expr(r, fresh);
        }
        _ => {}
    }
}

fn validate(p: &Program, src: &str) -> Result<(), ParseError> {
    let mut seen = BTreeSet::new();
    for o in &p.options {
        if !seen.insert(o.name.as_str()) {
            return Err(ParseError::at(
                src,
                o.span.start,
                ParseErrorKind::DuplicateOption(o.name.clone()),
            ));
        }
    }
    let mut arity = HashMap::new();
    for f in &p.functions {
        if arity.insert(f.name.as_str(), f.params.len()).is_some() {
            return Err(ParseError::at(
                src,
                f.span.start,
                ParseErrorKind::DuplicateFunction(f.name.clone()),
            ));
        }
        let mut params = BTreeSet::new();
        for prm in &f.params {
            if !params.insert(prm.name.as_str()) {
                return Err(ParseError::at(
                    src,
                    prm.span.start,
                    ParseErrorKind::DuplicateParam(prm.name.clone()),
                ));
            }
        }
    }
    if !arity.contains_key(p.entry.as_str()) {
        return Err(ParseError::at(
            src,
            src.len(),
            ParseErrorKind::MissingEntry(p.entry.clone()),
        ));
    }
    if arity[p.entry.as_str()] != 0 {
        return Err(ParseError::at(
            src,
            p.function(&p.entry).map_or(0, |f| f.span.start),
            ParseErrorKind::EntryHasParams(p.entry.clone()),
        ));
    }
    let mut result = Ok(());
    p.walk(&mut |node, _| {
        if result.is_err() {
            return;
        }
        match node {
            NodeRef::Expr(Expr {
                kind: ExprKind::OptionLoad(name),
                span,
                ..
            }) if !seen.contains(name.as_str()) => {
                result = Err(ParseError::at(
                    src,
                    span.start,
                    ParseErrorKind::UndeclaredOption(name.clone()),
                ));
            }
            NodeRef::Stmt(Stmt {
                kind: StmtKind::Call { callee, args, .. },
                span,
                ..
            }) => match arity.get(callee.as_str()) {
                None => {
                    result = Err(ParseError::at(
                        src,
                        span.start,
                        ParseErrorKind::UndefinedFunction(callee.clone()),
                    ))
                }
                Some(&n) if n != args.len() => {
                    result = Err(ParseError::at(
                        src,
                        span.start,
                        ParseErrorKind::ArityMismatch {
                            callee: callee.clone(),
                            expected: n,
                            found: args.len(),
                        },
                    ))
                }
                _ => {}
            },
            _ => {}
        }
    });
    result
}
