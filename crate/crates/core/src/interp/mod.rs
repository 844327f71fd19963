//! Deterministic interpreter with exact cost accounting.
//!
//! `work(n)` charges `n` cost units to the executing function; nothing else
//! costs anything. One unit models 0.1 s.

mod hotspot;
mod record;

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use rayon::prelude::*;

pub use hotspot::{hotspot_view, BackTrace, HotspotEntry, HotspotView};
pub use record::{CallTree, ExecutionRecord, MethodTime};

use crate::config::{ConfigError, Configuration};
use crate::lang::{BinOp, Expr, ExprKind, Function, NodeId, Program, Stmt, StmtKind, UnOp, Value};

pub const MAX_CALL_DEPTH: usize = 10_000;
pub const MAX_LOOP_ITERATIONS: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExecError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("runtime error at {node}: {kind}")]
    Runtime { node: NodeId, kind: RuntimeErrorKind },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuntimeErrorKind {
    #[error("division by zero")]
    DivisionByZero,
    #[error("call depth exceeds {MAX_CALL_DEPTH}")]
    CallDepthExceeded,
    #[error("loop bound {0} outside 0..={MAX_LOOP_ITERATIONS}")]
    LoopBoundOverflow(i64),
    #[error("work amount {0} is negative")]
    NegativeWork(i64),
    #[error("integer overflow")]
    Overflow,
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("variable `{0}` read before assignment")]
    UndefinedVariable(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExecOptions {
    /// Also record real interpreter time (never used for modeling).
    pub wall_clock: bool,
}

/// Runs `program` under `config` and returns its profile.
pub fn execute(program: &Program, config: &Configuration) -> Result<ExecutionRecord, ExecError> {
    execute_with(program, config, ExecOptions::default())
}

pub fn execute_with(
    program: &Program,
    config: &Configuration,
    opts: ExecOptions,
) -> Result<ExecutionRecord, ExecError> {
    config.validate(&program.options)?;
    let started = opts.wall_clock.then(Instant::now);
    let functions = program
        .functions
        .iter()
        .map(|f| (f.name.as_str(), f))
        .collect();
    let mut m = Machine {
        functions,
        config,
        arena: vec![ArenaNode {
            function: program.entry.clone(),
            self_cost: 0,
            children: Vec::new(),
        }],
        coverage: BTreeSet::new(),
        depth: 0,
    };
    let entry = program
        .function(&program.entry)
        .expect("validated program has its entry function");
    m.invoke(entry, Vec::new(), 0, entry.id)?;
    let call_tree = m.build_tree(0);
    let method_times = record::method_times(&call_tree);
    Ok(ExecutionRecord {
        config: config.clone(),
        total_cost: call_tree.total_cost,
        method_times,
        call_tree,
        coverage: m.coverage,
        wall_clock_ns: started.map(|t| t.elapsed().as_nanos() as u64),
    })
}

#[derive(Debug, thiserror::Error)]
#[error("configuration #{index}: {source}")]
pub struct CampaignError {
    pub index: usize,
    #[source]
    pub source: ExecError,
}

/// Executes every configuration (in parallel); records come back in input order.
pub fn measure_campaign(
    program: &Program,
    configs: &[Configuration],
) -> Result<Vec<ExecutionRecord>, CampaignError> {
    let results: Vec<Result<ExecutionRecord, ExecError>> =
        configs.par_iter().map(|c| execute(program, c)).collect();
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|source| CampaignError { index, source }))
        .collect()
}

struct ArenaNode {
    function: String,
    self_cost: u64,
    children: Vec<usize>,
}

enum Flow {
    Normal,
    Return(Value),
}

struct Machine<'p> {
    functions: HashMap<&'p str, &'p Function>,
    config: &'p Configuration,
    arena: Vec<ArenaNode>,
    coverage: BTreeSet<NodeId>,
    depth: usize,
}

type Env = HashMap<String, Value>;

fn err(node: NodeId, kind: RuntimeErrorKind) -> ExecError {
    ExecError::Runtime { node, kind }
}

impl<'p> Machine<'p> {
    fn invoke(
        &mut self,
        func: &'p Function,
        args: Vec<Value>,
        tree_node: usize,
        call_site: NodeId,
    ) -> Result<Value, ExecError> {
        if self.depth >= MAX_CALL_DEPTH {
            return Err(err(call_site, RuntimeErrorKind::CallDepthExceeded));
        }
        self.depth += 1;
        self.coverage.insert(func.id);
        let mut env = Env::new();
        for (p, v) in func.params.iter().zip(args) {
            self.coverage.insert(p.id);
            env.insert(p.name.clone(), v);
        }
        // Deep MiniConf recursion needs more native stack than a test thread has.
        let flow = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || {
            self.exec_block(&func.body, &mut env, tree_node)
        })?;
        self.depth -= 1;
        Ok(match flow {
            Flow::Return(v) => v,
            Flow::Normal => Value::Int(0),
        })
    }

    fn exec_block(
        &mut self,
        body: &'p [Stmt],
        env: &mut Env,
        tree_node: usize,
    ) -> Result<Flow, ExecError> {
        for s in body {
            if let Flow::Return(v) = self.exec_stmt(s, env, tree_node)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn exec_stmt(&mut self, s: &'p Stmt, env: &mut Env, tree_node: usize) -> Result<Flow, ExecError> {
        self.coverage.insert(s.id);
        match &s.kind {
            StmtKind::Assign { var, value } => {
                let v = self.eval(value, env)?;
                env.insert(var.clone(), v);
            }
            StmtKind::If {
                cond,
                then_body,
                else_body,
            } => {
                if self.eval_bool(cond, env)? {
                    return self.exec_block(then_body, env, tree_node);
                } else if let Some(e) = else_body {
                    return self.exec_block(e, env, tree_node);
                }
            }
            StmtKind::Repeat { count, body } => {
                let n = self.eval_int(count, env)?;
                if !(0..=MAX_LOOP_ITERATIONS).contains(&n) {
                    return Err(err(s.id, RuntimeErrorKind::LoopBoundOverflow(n)));
                }
                for _ in 0..n {
                    if let Flow::Return(v) = self.exec_block(body, env, tree_node)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            StmtKind::Call {
                target,
                callee,
                args,
            } => {
                let args = args
                    .iter()
                    .map(|a| self.eval(a, env))
                    .collect::<Result<Vec<_>, _>>()?;
                let func = self.functions[callee.as_str()];
                let child = self.child(tree_node, callee);
                let ret = self.invoke(func, args, child, s.id)?;
                if let Some(t) = target {
                    env.insert(t.clone(), ret);
                }
            }
            StmtKind::Return { value } => {
                let v = match value {
                    Some(e) => self.eval(e, env)?,
                    None => Value::Int(0),
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::Work { amount } => {
                let n = self.eval_int(amount, env)?;
                if n < 0 {
                    return Err(err(s.id, RuntimeErrorKind::NegativeWork(n)));
                }
                let node = &mut self.arena[tree_node];
                node.self_cost = node
                    .self_cost
                    .checked_add(n as u64)
                    .ok_or_else(|| err(s.id, RuntimeErrorKind::Overflow))?;
            }
        }
        Ok(Flow::Normal)
    }

    fn child(&mut self, parent: usize, callee: &str) -> usize {
        if let Some(&c) = self.arena[parent]
            .children
            .iter()
            .find(|&&c| self.arena[c].function == callee)
        {
            return c;
        }
        self.arena.push(ArenaNode {
            function: callee.to_string(),
            self_cost: 0,
            children: Vec::new(),
        });
        let idx = self.arena.len() - 1;
        self.arena[parent].children.push(idx);
        idx
    }

    fn build_tree(&self, idx: usize) -> CallTree {
        let node = &self.arena[idx];
        let children: Vec<CallTree> = stacker::maybe_grow(32 * 1024, 1024 * 1024, || {
            node.children.iter().map(|&c| self.build_tree(c)).collect()
        });
        let total = node.self_cost + children.iter().map(|c| c.total_cost).sum::<u64>();
        CallTree {
            function: node.function.clone(),
            self_cost: node.self_cost,
            total_cost: total,
            children,
        }
    }

    fn eval_bool(&mut self, e: &Expr, env: &Env) -> Result<bool, ExecError> {
        match self.eval(e, env)? {
            Value::Bool(b) => Ok(b),
            other => Err(mismatch(e.id, "boolean", &other)),
        }
    }

    fn eval_int(&mut self, e: &Expr, env: &Env) -> Result<i64, ExecError> {
        match self.eval(e, env)? {
            Value::Int(i) => Ok(i),
            other => Err(mismatch(e.id, "integer", &other)),
        }
    }

    fn eval(&mut self, e: &Expr, env: &Env) -> Result<Value, ExecError> {
        self.coverage.insert(e.id);
        match &e.kind {
            ExprKind::Lit(v) => Ok(v.clone()),
            ExprKind::Var(name) => env
                .get(name)
                .cloned()
                .ok_or_else(|| err(e.id, RuntimeErrorKind::UndefinedVariable(name.clone()))),
            ExprKind::OptionLoad(name) => Ok(self
                .config
                .get(name)
                .cloned()
                .expect("configuration validated against declared options")),
            ExprKind::Unary(UnOp::Not, x) => Ok(Value::Bool(!self.eval_bool(x, env)?)),
            ExprKind::Unary(UnOp::Neg, x) => {
                let v = self.eval_int(x, env)?;
                v.checked_neg()
                    .map(Value::Int)
                    .ok_or_else(|| err(e.id, RuntimeErrorKind::Overflow))
            }
            ExprKind::Binary(BinOp::And, l, r) => {
                Ok(Value::Bool(self.eval_bool(l, env)? && self.eval_bool(r, env)?))
            }
            ExprKind::Binary(BinOp::Or, l, r) => {
                Ok(Value::Bool(self.eval_bool(l, env)? || self.eval_bool(r, env)?))
            }
            ExprKind::Binary(op @ (BinOp::Eq | BinOp::Ne), l, r) => {
                let (a, b) = (self.eval(l, env)?, self.eval(r, env)?);
                if std::mem::discriminant(&a) != std::mem::discriminant(&b) {
                    return Err(err(
                        e.id,
                        RuntimeErrorKind::TypeMismatch(format!("cannot compare `{a}` with `{b}`")),
                    ));
                }
                Ok(Value::Bool((a == b) == (*op == BinOp::Eq)))
            }
            ExprKind::Binary(op, l, r) => {
                let (a, b) = (self.eval_int(l, env)?, self.eval_int(r, env)?);
                let overflow = || err(e.id, RuntimeErrorKind::Overflow);
                Ok(match op {
                    BinOp::Lt => Value::Bool(a < b),
                    BinOp::Le => Value::Bool(a <= b),
                    BinOp::Gt => Value::Bool(a > b),
                    BinOp::Ge => Value::Bool(a >= b),
                    BinOp::Add => Value::Int(a.checked_add(b).ok_or_else(overflow)?),
                    BinOp::Sub => Value::Int(a.checked_sub(b).ok_or_else(overflow)?),
                    BinOp::Mul => Value::Int(a.checked_mul(b).ok_or_else(overflow)?),
                    BinOp::Div | BinOp::Rem if b == 0 => {
                        return Err(err(e.id, RuntimeErrorKind::DivisionByZero))
                    }
                    BinOp::Div => Value::Int(a.checked_div(b).ok_or_else(overflow)?),
                    BinOp::Rem => Value::Int(a.checked_rem(b).ok_or_else(overflow)?),
                    BinOp::And | BinOp::Or | BinOp::Eq | BinOp::Ne => unreachable!(),
                })
            }
        }
    }
}

fn mismatch(node: NodeId, expected: &str, found: &Value) -> ExecError {
    err(
        node,
        RuntimeErrorKind::TypeMismatch(format!("expected {expected}, found `{found}`")),
    )
}
