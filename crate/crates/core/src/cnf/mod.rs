//! CNF formulas over `n` boolean variables, evaluated on assignment
//! bitmasks (variable `i` is bit `i`).

mod dimacs;
mod generate;

pub use dimacs::{emit_dimacs, parse_dimacs};
pub use generate::{coordination_formula, erdos_renyi, random_3sat, Graph};

use std::fmt;

use crate::{Error, Result};

/// Largest variable count representable in a `u64` assignment mask with
/// room for `2^n` to fit as well.
pub const MAX_VARIABLES: usize = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, negated: true }
    }

    #[inline]
    pub fn eval(self, x: u64) -> bool {
        ((x >> self.var) & 1 == 1) != self.negated
    }

    /// Signed 1-based DIMACS form.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// Disjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    literals: Vec<Literal>,
    pos_mask: u64,
    neg_mask: u64,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Result<Self> {
        let mut pos_mask = 0u64;
        let mut neg_mask = 0u64;
        for lit in &literals {
            if lit.var >= MAX_VARIABLES {
                return Err(Error::TooManyVariables { n: lit.var + 1, limit: MAX_VARIABLES });
            }
            if lit.negated {
                neg_mask |= 1 << lit.var;
            } else {
                pos_mask |= 1 << lit.var;
            }
        }
        Ok(Self { literals, pos_mask, neg_mask })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Mask of variables occurring positively.
    pub fn pos_mask(&self) -> u64 {
        self.pos_mask
    }

    /// Mask of variables occurring negated.
    pub fn neg_mask(&self) -> u64 {
        self.neg_mask
    }

    /// True iff some literal occurs with both polarities.
    pub fn is_tautology(&self) -> bool {
        self.pos_mask & self.neg_mask != 0
    }

    pub fn max_var(&self) -> Option<usize> {
        self.literals.iter().map(|l| l.var).max()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, lit) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∨ ")?;
            }
            write!(f, "{lit}")?;
        }
        write!(f, ")")
    }
}

/// True iff at least one literal of `c` holds under `x`.
#[inline]
pub fn eval_clause(c: &Clause, x: u64) -> bool {
    (x & c.pos_mask) != 0 || (!x & c.neg_mask) != 0
}

/// Conjunction of clauses in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        if n > MAX_VARIABLES {
            return Err(Error::TooManyVariables { n, limit: MAX_VARIABLES });
        }
        for c in &clauses {
            if let Some(var) = c.max_var() {
                if var >= n {
                    return Err(Error::VariableOutOfRange { var, n });
                }
            }
        }
        Ok(Self { n, clauses })
    }

    /// Builds a formula from signed 1-based literals, as in DIMACS.
    pub fn from_dimacs_clauses(n: usize, clauses: &[&[i64]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| {
                Clause::new(
                    c.iter()
                        .map(|&l| Literal { var: (l.unsigned_abs() - 1) as usize, negated: l < 0 })
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, clauses)
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of clauses.
    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_satisfied(&self, x: u64) -> bool {
        self.clauses.iter().all(|c| eval_clause(c, x))
    }

    /// `Φ_k`: the first `k` clauses, same variable count.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k > self.m() {
            return Err(Error::KOutOfRange { k, m: self.m() });
        }
        Ok(Self { n: self.n, clauses: self.clauses[..k].to_vec() })
    }

    /// `Σ_x count_satisfied(x)` over all `2^n` assignments, in `O(m)`.
    pub fn total_satisfied_count(&self) -> u128 {
        let full = 1u128 << self.n;
        self.clauses
            .iter()
            .map(|c| {
                if c.is_tautology() {
                    full
                } else {
                    let vars = (c.pos_mask | c.neg_mask).count_ones();
                    full - (full >> vars)
                }
            })
            .sum()
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "⊤");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Number of clauses of `f` satisfied by `x`; in `0..=m`.
#[inline]
pub fn count_satisfied(f: &CnfFormula, x: u64) -> usize {
    f.clauses.iter().filter(|c| eval_clause(c, x)).count()
}

/// Alias for [`CnfFormula::prefix`].
pub fn prefix(f: &CnfFormula, k: usize) -> Result<CnfFormula> {
    f.prefix(k)
}

/// Prefix length `k` for a ratio of `m`: `floor(ratio * m)`, guarded against
/// representation error (`0.7 * 40` must give 28).
pub fn constraint_prefix_len(ratio: f64, m: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::InvalidParams(format!("constraint ratio {ratio} outside [0, 1]")));
    }
    let k = (ratio * m as f64 + 1e-9).floor() as usize;
    Ok(k.min(m))
}
