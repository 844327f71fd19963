//! Brute-force reference implementations used to check the real ones.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use perfchain::lang::{Function, NodeId, Program, Stmt, StmtKind};
use perfchain::slice::DependenceGraph;

/// Square boolean matrix stored as bit rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix {
            n,
            rows: vec![vec![0; n.div_ceil(64)]; n],
        };
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.rows[i][j / 64] |= 1 << (j % 64);
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    fn mul(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix {
            n: self.n,
            rows: vec![vec![0; self.n.div_ceil(64)]; self.n],
        };
        for i in 0..self.n {
            for k in 0..self.n {
                if self.get(i, k) {
                    for (o, r) in out.rows[i].iter_mut().zip(&other.rows[k]) {
                        *o |= r;
                    }
                }
            }
        }
        out
    }

    /// Reflexive-transitive closure by repeated squaring of (I + A).
    pub fn closure(mut self) -> BitMatrix {
        loop {
            let next = self.mul(&self);
            if next == self {
                return self;
            }
            self = next;
        }
    }
}

/// Reachability of a graph restricted to `within` (all nodes if `None`),
/// indexed by position in `graph.nodes()`.
pub fn reachability(graph: &DependenceGraph, within: Option<&BTreeSet<NodeId>>) -> (Vec<NodeId>, BitMatrix) {
    let ids: Vec<NodeId> = graph.nodes().iter().copied().collect();
    let pos: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let allowed = |n: &NodeId| within.is_none_or(|w| w.contains(n));
    let mut m = BitMatrix::identity(ids.len());
    for e in graph.edges() {
        if allowed(&e.from) && allowed(&e.to) {
            m.set(pos[&e.from], pos[&e.to]);
        }
    }
    (ids, m.closure())
}

/// Nodes lying on some path from a source to a target.
pub fn path_nodes(graph: &DependenceGraph, sources: &BTreeSet<NodeId>, targets: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    let (ids, r) = reachability(graph, None);
    let idx = |n: &NodeId| ids.iter().position(|x| x == n).unwrap();
    let s: Vec<usize> = sources.iter().map(idx).collect();
    let t: Vec<usize> = targets.iter().map(idx).collect();
    (0..ids.len())
        .filter(|&n| s.iter().any(|&a| r.get(a, n)) && t.iter().any(|&b| r.get(n, b)))
        .map(|n| ids[n])
        .collect()
}

pub fn backward(graph: &DependenceGraph, targets: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    let (ids, r) = reachability(graph, None);
    (0..ids.len())
        .filter(|&n| targets.iter().any(|t| r.get(n, ids.iter().position(|x| x == t).unwrap())))
        .map(|n| ids[n])
        .collect()
}

pub fn forward_within(graph: &DependenceGraph, sources: &BTreeSet<NodeId>, within: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    let (ids, r) = reachability(graph, Some(within));
    (0..ids.len())
        .filter(|&n| within.contains(&ids[n]))
        .filter(|&n| {
            sources
                .iter()
                .filter(|s| within.contains(s))
                .any(|s| r.get(ids.iter().position(|x| x == s).unwrap(), n))
        })
        .map(|n| ids[n])
        .collect()
}

// Def-use enumeration by walking statement positions directly in the AST.

type Path = Vec<usize>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Pos {
    At(Path),
    Exit,
}

fn block_at<'a>(func: &'a Function, path: &[usize]) -> &'a [Stmt] {
    let mut block: &[Stmt] = &func.body;
    for pair in path.chunks(2) {
        if pair.len() == 2 {
            block = stmt_blocks(&block[pair[0]])[pair[1]];
        }
    }
    block
}

fn stmt_blocks(s: &Stmt) -> Vec<&[Stmt]> {
    match &s.kind {
        StmtKind::If {
            then_body,
            else_body,
            ..
        } => {
            let mut v = vec![then_body.as_slice()];
            if let Some(e) = else_body {
                v.push(e);
            }
            v
        }
        StmtKind::Repeat { body, .. } => vec![body.as_slice()],
        _ => vec![],
    }
}

fn stmt_at<'a>(func: &'a Function, path: &[usize]) -> &'a Stmt {
    &block_at(func, &path[..path.len() - 1])[path[path.len() - 1]]
}

/// Where control goes once the statement at `path` has finished.
fn after(func: &Function, path: &[usize]) -> Pos {
    let block = block_at(func, &path[..path.len() - 1]);
    let i = path[path.len() - 1];
    if i + 1 < block.len() {
        let mut p = path.to_vec();
        *p.last_mut().unwrap() += 1;
        return Pos::At(p);
    }
    if path.len() == 1 {
        return Pos::Exit;
    }
    let parent = &path[..path.len() - 2];
    match stmt_at(func, parent).kind {
        StmtKind::Repeat { .. } => Pos::At(parent.to_vec()),
        _ => after(func, parent),
    }
}

fn enter(func: &Function, path: &[usize], block: usize) -> Option<Pos> {
    let s = stmt_at(func, path);
    let blocks = stmt_blocks(s);
    let b = blocks.get(block)?;
    if b.is_empty() {
        None
    } else {
        let mut p = path.to_vec();
        p.extend([block, 0]);
        Some(Pos::At(p))
    }
}

fn successors(func: &Function, path: &[usize]) -> Vec<Pos> {
    let s = stmt_at(func, path);
    match &s.kind {
        StmtKind::If { else_body, .. } => {
            let mut v = vec![enter(func, path, 0).unwrap_or_else(|| after(func, path))];
            v.push(match else_body {
                Some(_) => enter(func, path, 1).unwrap_or_else(|| after(func, path)),
                None => after(func, path),
            });
            v
        }
        StmtKind::Repeat { .. } => {
            let mut v = vec![after(func, path)];
            v.extend(enter(func, path, 0));
            v
        }
        StmtKind::Return { .. } => vec![Pos::Exit],
        _ => vec![after(func, path)],
    }
}

fn all_paths(func: &Function) -> Vec<Path> {
    fn go(block: &[Stmt], prefix: Path, out: &mut Vec<Path>) {
        for (i, s) in block.iter().enumerate() {
            let mut p = prefix.clone();
            p.push(i);
            out.push(p.clone());
            for (b, inner) in stmt_blocks(s).into_iter().enumerate() {
                let mut q = p.clone();
                q.push(b);
                go(inner, q, out);
            }
        }
    }
    let mut out = Vec::new();
    go(&func.body, Vec::new(), &mut out);
    out
}

fn uses(s: &Stmt) -> BTreeSet<String> {
    s.used_vars().into_iter().map(str::to_string).collect()
}

/// All (definition, use) pairs connected by a definition-clear path, found
/// by a separate search from every definition.
pub fn def_use_pairs(program: &Program) -> BTreeSet<(NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for func in &program.functions {
        let paths = all_paths(func);
        let first = if func.body.is_empty() { Pos::Exit } else { Pos::At(vec![0]) };
        let mut defs: Vec<(NodeId, String, Vec<Pos>)> = func
            .params
            .iter()
            .map(|p| (p.id, p.name.clone(), vec![first.clone()]))
            .collect();
        for p in &paths {
            let s = stmt_at(func, p);
            if let Some(v) = s.defined_var() {
                defs.push((s.id, v.to_string(), successors(func, p)));
            }
        }
        for (def, var, start) in defs {
            let mut seen = BTreeSet::new();
            let mut stack = start;
            while let Some(pos) = stack.pop() {
                let Pos::At(path) = pos else { continue };
                if !seen.insert(path.clone()) {
                    continue;
                }
                let s = stmt_at(func, &path);
                if uses(s).contains(&var) {
                    out.insert((def, s.id));
                }
                if s.defined_var() == Some(var.as_str()) {
                    continue;
                }
                stack.extend(successors(func, &path));
            }
        }
    }
    out
}
