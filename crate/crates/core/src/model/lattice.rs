use crate::config::Configuration;
use crate::lang::{OptionDecl, Value};

use super::{Factor, ModelError, Term};

/// Mixed-radix encoding of a configuration space relative to a base
/// configuration. Options are ordered by name; digit 0 of every option is its
/// base value, so the code of a configuration doubles as the code of its
/// deviation term.
#[derive(Debug, Clone)]
pub(crate) struct Lattice {
    names: Vec<String>,
    values: Vec<Vec<Value>>,
    strides: Vec<usize>,
    size: usize,
}

/// Largest space the lattice will materialize.
pub(crate) const MAX_LATTICE: usize = 1 << 22;

impl Lattice {
    pub(crate) fn new(options: &[OptionDecl], base: &Configuration) -> Result<Self, ModelError> {
        base.validate(options)?;
        let mut decls: Vec<&OptionDecl> = options.iter().collect();
        decls.sort_by(|a, b| a.name.cmp(&b.name));
        let size = space_size(options);
        if size > MAX_LATTICE as u128 {
            return Err(ModelError::SpaceTooLarge {
                actual: size,
                limit: MAX_LATTICE as u128,
            });
        }
        let mut names = Vec::new();
        let mut values = Vec::new();
        for d in &decls {
            let b = base.get(&d.name).expect("validated").clone();
            let mut vs = vec![b.clone()];
            vs.extend(d.domain.values().into_iter().filter(|v| *v != b));
            names.push(d.name.clone());
            values.push(vs);
        }
        let mut strides = vec![0; names.len()];
        let mut stride = 1;
        for i in (0..names.len()).rev() {
            strides[i] = stride;
            stride *= values[i].len();
        }
        Ok(Lattice {
            names,
            values,
            strides,
            size: size as usize,
        })
    }

    pub(crate) fn size(&self) -> usize {
        self.size
    }

    pub(crate) fn arity(&self) -> usize {
        self.names.len()
    }

    fn digit(&self, code: usize, i: usize) -> usize {
        (code / self.strides[i]) % self.values[i].len()
    }

    /// Caller guarantees the configuration is valid for the lattice's options.
    pub(crate) fn encode(&self, config: &Configuration) -> usize {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let v = config.get(n).expect("validated configuration");
                let d = self.values[i]
                    .iter()
                    .position(|x| x == v)
                    .expect("value within domain");
                d * self.strides[i]
            })
            .sum()
    }

    pub(crate) fn config(&self, code: usize) -> Configuration {
        (0..self.arity())
            .map(|i| (self.names[i].clone(), self.values[i][self.digit(code, i)].clone()))
            .collect()
    }

    pub(crate) fn degree(&self, code: usize) -> usize {
        (0..self.arity()).filter(|&i| self.digit(code, i) != 0).count()
    }

    pub(crate) fn term(&self, code: usize) -> Term {
        Term::from_sorted(
            (0..self.arity())
                .filter(|&i| self.digit(code, i) != 0)
                .map(|i| Factor {
                    option: self.names[i].clone(),
                    value: self.values[i][self.digit(code, i)].clone(),
                })
                .collect(),
        )
    }

    /// Code of a term, or `None` if one of its factors names an unknown
    /// option or the option's base value.
    pub(crate) fn code_of(&self, term: &Term) -> Option<usize> {
        let mut code = 0;
        for f in term.factors() {
            let i = self.names.iter().position(|n| *n == f.option)?;
            let d = self.values[i].iter().position(|v| *v == f.value)?;
            if d == 0 {
                return None;
            }
            code += d * self.strides[i];
        }
        Some(code)
    }

    /// In-place Möbius inversion over the deviation lattice: on return,
    /// `y[S] = Σ_{T ⊆ S} (-1)^{|S|-|T|} y_in[T]`, one option at a time.
    pub(crate) fn mobius(&self, y: &mut [i64]) {
        debug_assert_eq!(y.len(), self.size);
        for i in 0..self.arity() {
            let stride = self.strides[i];
            for code in 0..self.size {
                if self.digit(code, i) != 0 {
                    let below = code - self.digit(code, i) * stride;
                    y[code] -= y[below];
                }
            }
        }
    }

    /// Whether the configuration with code `row` activates the term with code `term`.
    pub(crate) fn activates(&self, row: usize, term: usize) -> bool {
        (0..self.arity()).all(|i| {
            let t = self.digit(term, i);
            t == 0 || self.digit(row, i) == t
        })
    }

    /// Codes of all terms with degree in `1..=max_degree`, ordered by degree
    /// then code.
    pub(crate) fn terms_up_to(&self, max_degree: usize) -> Vec<usize> {
        let mut codes: Vec<usize> = (1..self.size)
            .filter(|&c| self.degree(c) <= max_degree)
            .collect();
        codes.sort_by_key(|&c| (self.degree(c), c));
        codes
    }
}

pub(crate) fn space_size(options: &[OptionDecl]) -> u128 {
    options
        .iter()
        .fold(1u128, |acc, o| acc.saturating_mul(o.domain.len() as u128))
}
