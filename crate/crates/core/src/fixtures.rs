//! Bundled example programs with a planted performance defect each.

use std::collections::BTreeMap;

use crate::config::{ConfigError, Configuration};
use crate::lang::{parse_named, NodeId, Program, Stmt};

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub file: &'static str,
    pub source: &'static str,
    /// Named configurations as assignment lists over the defaults.
    pub configs: &'static [(&'static str, &'static str)],
    /// Configuration without the slowdown.
    pub good: &'static str,
    /// Configuration that shows the slowdown.
    pub bad: &'static str,
    pub defect_function: &'static str,
    /// Leading text of the defective statement.
    pub defect_statement: &'static str,
}

/// Two-option interaction: duplicates and transactions together make every
/// insert re-walk the duplicate chain.
pub const BERKELEY_MINI: Fixture = Fixture {
    name: "berkeley-mini",
    file: "berkeley_mini.mcf",
    source: include_str!("../fixtures/berkeley_mini.mcf"),
    configs: &[
        ("default", ""),
        ("user", "Duplicates, Transactions, Replicated"),
    ],
    good: "default",
    bad: "user",
    defect_function: "Cursor.put",
    defect_statement: "repeat 39",
};

/// Single option: writing JPEG forces 25 encoder passes.
pub const DENSITY_MINI: Fixture = Fixture {
    name: "density-mini",
    file: "density_mini.mcf",
    source: include_str!("../fixtures/density_mini.mcf"),
    configs: &[("default", ""), ("user", "Format=jpg, Verbose")],
    good: "default",
    bad: "user",
    defect_function: "Writer.write",
    defect_statement: "passes = 25",
};

pub const ALL: [Fixture; 2] = [BERKELEY_MINI, DENSITY_MINI];

pub fn by_name(name: &str) -> Option<Fixture> {
    ALL.iter().copied().find(|f| f.name == name)
}

impl Fixture {
    pub fn program(&self) -> Program {
        parse_named(self.file, self.source).expect("bundled fixture parses")
    }

    pub fn named_configs(&self, program: &Program) -> Result<BTreeMap<String, Configuration>, ConfigError> {
        self.configs
            .iter()
            .map(|(name, text)| Ok((name.to_string(), Configuration::from_assignments(&program.options, text)?)))
            .collect()
    }

    /// The statement whose highlight starts with `defect_statement`.
    pub fn defect_node(&self, program: &Program) -> NodeId {
        let mut found = None;
        for f in &program.functions {
            visit(&f.body, &mut |s| {
                if self.source[s.head_span().start..].starts_with(self.defect_statement) {
                    found = Some(s.id);
                }
            });
        }
        found.expect("defect statement present in fixture")
    }
}

fn visit(block: &[Stmt], f: &mut impl FnMut(&Stmt)) {
    for s in block {
        f(s);
        for b in s.blocks() {
            visit(b, f);
        }
    }
}
