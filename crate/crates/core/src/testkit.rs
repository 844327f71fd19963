//! Seeded generators for random programs and random dependence graphs.
//!
//! Generated programs always parse, validate and run without runtime errors:
//! calls only go to later functions, loop counts are small literals, and every
//! variable is an integer assigned before use.

use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::NodeId;
use crate::slice::{DependenceGraph, Edge, EdgeKind};

#[derive(Debug, Clone, Copy)]
pub struct ProgramShape {
    pub max_options: usize,
    pub max_functions: usize,
    pub max_statements: usize,
    pub max_depth: usize,
    /// Probability that an option is an enumeration rather than a boolean.
    pub enum_share: f64,
}

impl Default for ProgramShape {
    fn default() -> Self {
        ProgramShape {
            max_options: 4,
            max_functions: 5,
            max_statements: 5,
            max_depth: 2,
            enum_share: 0.3,
        }
    }
}

enum OptKind {
    Bool,
    Enum(Vec<String>),
}

struct Gen {
    rng: ChaCha8Rng,
    options: Vec<(String, OptKind)>,
    functions: Vec<(String, usize)>,
    shape: ProgramShape,
    out: String,
}

const LOCALS: [&str; 3] = ["a", "b", "c"];

impl Gen {
    fn indent(&mut self, depth: usize) {
        for _ in 0..=depth {
            self.out.push_str("    ");
        }
    }

    fn int_expr(&mut self, vars: &[String], depth: usize) -> String {
        let r = self.rng.random_range(0..if depth > 1 { 2 } else { 5 });
        match r {
            0 => self.rng.random_range(0..6).to_string(),
            1 => vars.choose(&mut self.rng).expect("locals exist").clone(),
            2 => format!("{} + {}", self.int_expr(vars, depth + 1), self.int_expr(vars, depth + 1)),
            3 => format!("{} % {}", self.int_expr(vars, depth + 1), self.rng.random_range(1..5)),
            _ => format!("({}) * {}", self.int_expr(vars, depth + 1), self.rng.random_range(0..3)),
        }
    }

    fn cond(&mut self, vars: &[String], depth: usize) -> String {
        let r = self.rng.random_range(0..if depth > 1 { 2 } else { 6 });
        match r {
            0 | 5 if !self.options.is_empty() => {
                let i = self.rng.random_range(0..self.options.len());
                let (name, kind) = &self.options[i];
                match kind {
                    OptKind::Bool => format!("option(\"{name}\")"),
                    OptKind::Enum(vals) => {
                        let v = vals.choose(&mut self.rng).expect("nonempty domain");
                        format!("option(\"{name}\") == \"{v}\"")
                    }
                }
            }
            0 | 1 => format!("{} > {}", self.int_expr(vars, depth + 1), self.rng.random_range(0..4)),
            2 => format!("!({})", self.cond(vars, depth + 1)),
            3 => format!("{} && {}", self.cond(vars, depth + 1), self.cond(vars, depth + 1)),
            4 => format!("{} || {}", self.cond(vars, depth + 1), self.cond(vars, depth + 1)),
            _ => format!("{} > {}", self.int_expr(vars, depth + 1), self.rng.random_range(0..4)),
        }
    }

    fn block(&mut self, func: usize, vars: &[String], depth: usize) {
        let n = self.rng.random_range(1..=self.shape.max_statements);
        for _ in 0..n {
            self.indent(depth);
            let nested = depth < self.shape.max_depth;
            let callees = self.functions.len() - func - 1;
            match self.rng.random_range(0..10) {
                0 | 1 => {
                    let v = LOCALS.choose(&mut self.rng).expect("locals");
                    let e = self.int_expr(vars, 0);
                    writeln!(self.out, "{v} = {e};").unwrap();
                }
                2 | 3 => {
                    let e = self.int_expr(vars, 1);
                    writeln!(self.out, "work({e});").unwrap();
                }
                4 | 5 if nested => {
                    let c = self.cond(vars, 0);
                    writeln!(self.out, "if {c} {{").unwrap();
                    self.block(func, vars, depth + 1);
                    if self.rng.random_bool(0.4) {
                        self.indent(depth);
                        self.out.push_str("} else {\n");
                        self.block(func, vars, depth + 1);
                    }
                    self.indent(depth);
                    self.out.push_str("}\n");
                }
                6 if nested => {
                    let k = self.rng.random_range(0..4);
                    writeln!(self.out, "repeat {k} {{").unwrap();
                    self.block(func, vars, depth + 1);
                    self.indent(depth);
                    self.out.push_str("}\n");
                }
                7 | 8 if callees > 0 => {
                    let j = func + 1 + self.rng.random_range(0..callees);
                    let (name, arity) = self.functions[j].clone();
                    let args: Vec<String> = (0..arity).map(|_| self.int_expr(vars, 1)).collect();
                    if self.rng.random_bool(0.5) {
                        let v = LOCALS.choose(&mut self.rng).expect("locals");
                        write!(self.out, "{v} = ").unwrap();
                    }
                    writeln!(self.out, "{name}({});", args.join(", ")).unwrap();
                }
                9 if depth > 0 && self.rng.random_bool(0.5) => {
                    let e = self.int_expr(vars, 1);
                    writeln!(self.out, "return {e};").unwrap();
                }
                _ => {
                    let w = self.rng.random_range(0..10);
                    writeln!(self.out, "work({w});").unwrap();
                }
            }
        }
    }
}

/// Source text of a random, well-formed, terminating program.
pub fn random_program(seed: u64, shape: &ProgramShape) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_opts = rng.random_range(1..=shape.max_options.max(1));
    let options = (0..n_opts)
        .map(|i| {
            let kind = if !rng.random_bool(shape.enum_share.clamp(0.0, 1.0)) {
                OptKind::Bool
            } else {
                let k = rng.random_range(2..=3);
                OptKind::Enum((0..k).map(|v| format!("v{v}")).collect())
            };
            (format!("O{i}"), kind)
        })
        .collect();
    let n_fns = rng.random_range(1..=shape.max_functions.max(1));
    let functions = (0..n_fns)
        .map(|i| {
            if i == 0 {
                ("main".to_string(), 0)
            } else {
                (format!("f{i}"), rng.random_range(0..3))
            }
        })
        .collect();
    let mut g = Gen {
        rng,
        options,
        functions,
        shape: *shape,
        out: String::new(),
    };
    for (name, kind) in &g.options {
        match kind {
            OptKind::Bool => writeln!(g.out, "option {name} bool default false;").unwrap(),
            OptKind::Enum(vals) => {
                writeln!(g.out, "option {name} enum {{ {} }} default {};", vals.join(", "), vals[0]).unwrap()
            }
        }
    }
    for i in 0..g.functions.len() {
        let (name, arity) = g.functions[i].clone();
        let params: Vec<String> = (0..arity).map(|p| format!("p{p}")).collect();
        writeln!(g.out, "\nfn {name}({}) {{", params.join(", ")).unwrap();
        let mut vars = params.clone();
        for v in LOCALS {
            let init = g.rng.random_range(0..4);
            writeln!(g.out, "    {v} = {init};").unwrap();
            vars.push(v.to_string());
        }
        g.block(i, &vars, 0);
        if g.rng.random_bool(0.5) {
            let e = g.int_expr(&vars, 1);
            writeln!(g.out, "    return {e};").unwrap();
        }
        g.out.push_str("}\n");
    }
    g.out
}

/// Random directed graph over `n` nodes with roughly `avg_degree` edges per node.
pub fn random_graph(seed: u64, n: usize, avg_degree: f64) -> DependenceGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = [
        EdgeKind::Data,
        EdgeKind::Control,
        EdgeKind::Call,
        EdgeKind::ParamIn,
        EdgeKind::ParamOut,
    ];
    let p = if n > 1 { (avg_degree / n as f64).min(1.0) } else { 0.0 };
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rng.random_bool(p) {
                let kind = *kinds.choose(&mut rng).expect("kinds");
                let kind = if a == b && kind == EdgeKind::Control { EdgeKind::Data } else { kind };
                edges.push(Edge {
                    from: NodeId(a as u32),
                    to: NodeId(b as u32),
                    kind,
                });
            }
        }
    }
    DependenceGraph::new((0..n as u32).map(NodeId), edges).expect("endpoints are nodes")
}
