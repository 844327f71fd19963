use std::collections::{BTreeMap, BTreeSet};

use super::{DependenceGraph, Edge, EdgeKind};
use crate::lang::{Function, NodeId, Program, Stmt, StmtKind};

const ENTRY: usize = 0;
const EXIT: usize = 1;

/// Control-flow graph of one function body. Node 0 is the entry (where
/// parameters are defined), node 1 the exit, every statement one node.
struct Cfg<'a> {
    stmts: Vec<Option<&'a Stmt>>,
    succ: Vec<Vec<usize>>,
}

impl<'a> Cfg<'a> {
    fn of(func: &'a Function) -> Self {
        let mut cfg = Cfg {
            stmts: vec![None, None],
            succ: vec![Vec::new(), Vec::new()],
        };
        let first = cfg.lower(&func.body, EXIT);
        cfg.succ[ENTRY] = vec![first];
        cfg
    }

    /// Lowers `block` so that it continues at `next`; returns the block's first node.
    fn lower(&mut self, block: &'a [Stmt], next: usize) -> usize {
        let mut cont = next;
        for s in block.iter().rev() {
            let n = self.stmts.len();
            self.stmts.push(Some(s));
            self.succ.push(Vec::new());
            self.succ[n] = match &s.kind {
                StmtKind::If {
                    then_body,
                    else_body,
                    ..
                } => {
                    let t = self.lower(then_body, cont);
                    let e = match else_body {
                        Some(b) => self.lower(b, cont),
                        None => cont,
                    };
                    vec![t, e]
                }
                StmtKind::Repeat { body, .. } => vec![self.lower(body, n), cont],
                StmtKind::Return { .. } => vec![EXIT],
                _ => vec![cont],
            };
            cont = n;
        }
        cont
    }

    fn preds(&self) -> Vec<Vec<usize>> {
        let mut p = vec![Vec::new(); self.succ.len()];
        for (n, ss) in self.succ.iter().enumerate() {
            for &s in ss {
                p[s].push(n);
            }
        }
        p
    }
}

struct Def<'a> {
    node: NodeId,
    var: &'a str,
    at: usize,
}

/// Data edges from definitions to the statements that use them, by a
/// reaching-definitions fixpoint over the function's control flow.
fn data_edges(func: &Function, edges: &mut Vec<Edge>) {
    let cfg = Cfg::of(func);
    let mut defs: Vec<Def> = func
        .params
        .iter()
        .map(|p| Def {
            node: p.id,
            var: &p.name,
            at: ENTRY,
        })
        .collect();
    for (at, s) in cfg.stmts.iter().enumerate() {
        if let Some(var) = s.and_then(Stmt::defined_var) {
            defs.push(Def {
                node: s.expect("statement node").id,
                var,
                at,
            });
        }
    }
    let n = cfg.succ.len();
    let gen: Vec<BTreeSet<usize>> = (0..n)
        .map(|at| (0..defs.len()).filter(|&d| defs[d].at == at).collect())
        .collect();
    let killed_vars: Vec<BTreeSet<&str>> = gen
        .iter()
        .map(|g| g.iter().map(|&d| defs[d].var).collect())
        .collect();
    let preds = cfg.preds();
    let mut reach_in: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut reach_out: Vec<BTreeSet<usize>> = gen.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for at in 0..n {
            let inn: BTreeSet<usize> = preds[at]
                .iter()
                .flat_map(|&p| reach_out[p].iter().copied())
                .collect();
            let mut out: BTreeSet<usize> = inn
                .iter()
                .copied()
                .filter(|&d| !killed_vars[at].contains(defs[d].var))
                .collect();
            out.extend(gen[at].iter().copied());
            if out != reach_out[at] {
                reach_out[at] = out;
                changed = true;
            }
            reach_in[at] = inn;
        }
    }
    for (at, s) in cfg.stmts.iter().enumerate() {
        let Some(s) = s else { continue };
        let used: BTreeSet<&str> = s.used_vars().into_iter().collect();
        for &d in &reach_in[at] {
            if used.contains(defs[d].var) {
                edges.push(Edge {
                    from: defs[d].node,
                    to: s.id,
                    kind: EdgeKind::Data,
                });
            }
        }
    }
}

fn control_edges(parent: NodeId, block: &[Stmt], edges: &mut Vec<Edge>) {
    for (i, s) in block.iter().enumerate() {
        edges.push(Edge {
            from: parent,
            to: s.id,
            kind: EdgeKind::Control,
        });
        // Later siblings run only if no return inside `s` was taken.
        if !matches!(s.kind, StmtKind::Return { .. }) && s.contains_return() {
            for later in &block[i + 1..] {
                edges.push(Edge {
                    from: s.id,
                    to: later.id,
                    kind: EdgeKind::Control,
                });
            }
        }
        for b in s.blocks() {
            control_edges(s.id, b, edges);
        }
    }
}

fn visit_stmts<'a>(block: &'a [Stmt], f: &mut impl FnMut(&'a Stmt)) {
    for s in block {
        f(s);
        for b in s.blocks() {
            visit_stmts(b, f);
        }
    }
}

/// Builds the context-insensitive dependence graph of a whole program.
///
/// Nodes are function entries, parameters, statements and option loads.
/// An option load feeds the statement that evaluates it; calls link the call
/// site to the callee entry and parameters, and the callee's value-returning
/// statements back to an assigning call site.
pub fn build_dependence_graph(program: &Program) -> DependenceGraph {
    let mut nodes = BTreeSet::new();
    let mut edges = Vec::new();
    let by_name: BTreeMap<&str, &Function> = program.functions.iter().map(|f| (f.name.as_str(), f)).collect();
    let mut returns: BTreeMap<&str, Vec<NodeId>> = BTreeMap::new();
    for f in &program.functions {
        let list = returns.entry(f.name.as_str()).or_default();
        visit_stmts(&f.body, &mut |s| {
            if let StmtKind::Return { value: Some(_) } = s.kind {
                list.push(s.id);
            }
        });
    }

    for f in &program.functions {
        nodes.insert(f.id);
        nodes.extend(f.params.iter().map(|p| p.id));
        visit_stmts(&f.body, &mut |s| {
            nodes.insert(s.id);
            for e in s.exprs() {
                for (_, load) in e.option_loads() {
                    nodes.insert(load);
                    edges.push(Edge {
                        from: load,
                        to: s.id,
                        kind: EdgeKind::Data,
                    });
                }
            }
            if let StmtKind::Call { target, callee, .. } = &s.kind {
                let Some(callee) = by_name.get(callee.as_str()) else {
                    return;
                };
                edges.push(Edge {
                    from: s.id,
                    to: callee.id,
                    kind: EdgeKind::Call,
                });
                for p in &callee.params {
                    edges.push(Edge {
                        from: s.id,
                        to: p.id,
                        kind: EdgeKind::ParamIn,
                    });
                }
                if target.is_some() {
                    for &r in &returns[callee.name.as_str()] {
                        edges.push(Edge {
                            from: r,
                            to: s.id,
                            kind: EdgeKind::ParamOut,
                        });
                    }
                }
            }
        });
        control_edges(f.id, &f.body, &mut edges);
        data_edges(f, &mut edges);
    }
    DependenceGraph::new(nodes, edges).expect("edges connect program nodes")
}
