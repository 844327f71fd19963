use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

/// Renders a program in canonical form. Reparsing the output yields an AST
/// that is structurally identical to `program`.
pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    for o in &program.options {
        let domain = match &o.domain {
            Domain::Bool => "bool".to_string(),
            Domain::Enum(vs) => format!("enum {{ {} }}", vs.join(", ")),
        };
        let _ = writeln!(out, "option {} {} default {};", o.name, domain, o.default);
    }
    if program.entry != "main" {
        let _ = writeln!(out, "entry {};", program.entry);
    }
    for f in &program.functions {
        if !out.is_empty() {
            out.push('\n');
        }
        let params: Vec<&str> = f.params.iter().map(|p| p.name.as_str()).collect();
        let _ = writeln!(out, "fn {}({}) {{", f.name, params.join(", "));
        block(&mut out, &f.body, 1);
        out.push_str("}\n");
    }
    out
}

fn block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for s in stmts {
        stmt(out, s, depth);
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    let pad = INDENT.repeat(depth);
    match &s.kind {
        StmtKind::Assign { var, value } => {
            let _ = writeln!(out, "{pad}{var} = {};", expr(value));
        }
        StmtKind::If { .. } => {
            out.push_str(&pad);
            if_chain(out, s, depth);
            out.push('\n');
        }
        StmtKind::Repeat { count, body } => {
            let _ = writeln!(out, "{pad}repeat {} {{", expr(count));
            block(out, body, depth + 1);
            let _ = writeln!(out, "{pad}}}");
        }
        StmtKind::Call {
            target,
            callee,
            args,
        } => {
            let args: Vec<String> = args.iter().map(expr).collect();
            let lhs = target.as_ref().map(|t| format!("{t} = ")).unwrap_or_default();
            let _ = writeln!(out, "{pad}{lhs}{callee}({});", args.join(", "));
        }
        StmtKind::Return { value: Some(v) } => {
            let _ = writeln!(out, "{pad}return {};", expr(v));
        }
        StmtKind::Return { value: None } => {
            let _ = writeln!(out, "{pad}return;");
        }
        StmtKind::Work { amount } => {
            let _ = writeln!(out, "{pad}work({});", expr(amount));
        }
    }
}

// Writes `if c { ... } else ...` without leading indentation or trailing newline.
fn if_chain(out: &mut String, s: &Stmt, depth: usize) {
    let StmtKind::If {
        cond,
        then_body,
        else_body,
    } = &s.kind
    else {
        unreachable!("if_chain called on a non-if statement");
    };
    let pad = INDENT.repeat(depth);
    let _ = writeln!(out, "if {} {{", expr(cond));
    block(out, then_body, depth + 1);
    out.push_str(&pad);
    out.push('}');
    match else_body.as_deref() {
        None => {}
        Some([nested @ Stmt {
            kind: StmtKind::If { .. },
            ..
        }]) => {
            out.push_str(" else ");
            if_chain(out, nested, depth);
        }
        Some(body) => {
            out.push_str(" else {\n");
            block(out, body, depth + 1);
            out.push_str(&pad);
            out.push('}');
        }
    }
}

pub(crate) fn expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Lit(Value::Sym(s)) => format!("\"{s}\""),
        ExprKind::Lit(v) => v.to_string(),
        ExprKind::Var(v) => v.clone(),
        ExprKind::OptionLoad(name) => format!("option(\"{name}\")"),
        ExprKind::Unary(op, inner) => {
            let sym = match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
            };
            match inner.kind {
                ExprKind::Binary(..) => format!("{sym}({})", expr(inner)),
                _ => format!("{sym}{}", expr(inner)),
            }
        }
        ExprKind::Binary(op, l, r) => {
            let prec = op.precedence();
            let left = match &l.kind {
                ExprKind::Binary(lop, ..) if lop.precedence() < prec => format!("({})", expr(l)),
                _ => expr(l),
            };
            let right = match &r.kind {
                ExprKind::Binary(rop, ..) if rop.precedence() <= prec => format!("({})", expr(r)),
                _ => expr(r),
            };
            format!("{left} {} {right}", op.symbol())
        }
    }
}
