//! Enumeration of all satisfying assignments of a CNF formula.
//!
//! The models of the constraint prefix are the computational basis states
//! spanning the Zeno subspace, so the enumeration must be complete and its
//! output canonical (ascending bitmasks).

use serde::{Deserialize, Serialize};

use crate::cnf::{count_satisfied, CnfFormula, Literal};
use crate::{Error, Result};

/// Default enumeration cap (`2^20` models).
pub const DEFAULT_MODEL_CAP: usize = 1 << 20;

/// Brute force refuses formulas with more variables than this.
pub const BRUTE_FORCE_MAX_VARIABLES: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSet {
    pub n: usize,
    /// Strictly ascending assignment bitmasks.
    pub models: Vec<u64>,
    /// Set iff enumeration stopped at the cap.
    pub truncated: bool,
}

impl ModelSet {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

/// Checks every `x in [0, 2^n)`.
pub fn enumerate_models_bruteforce(f: &CnfFormula) -> Result<ModelSet> {
    let n = f.n();
    if n > BRUTE_FORCE_MAX_VARIABLES {
        return Err(Error::TooManyVariables { n, limit: BRUTE_FORCE_MAX_VARIABLES });
    }
    let m = f.m();
    let models = (0..1u64 << n).filter(|&x| count_satisfied(f, x) == m).collect();
    Ok(ModelSet { n, models, truncated: false })
}

/// Model enumeration by DPLL-style splitting.
///
/// Unit propagation runs at every node. Pure literals are branched on first
/// with their satisfying polarity tried first; fixing them outright would
/// lose the models in which they are false. Once every clause is satisfied
/// the remaining unassigned variables are expanded into all completions.
/// Otherwise the branch variable is the one with most occurrences in the
/// shortest unresolved clauses, lowest index on ties.
///
/// At most `cap` models are returned; `truncated` reports whether the cap
/// cut enumeration short.
pub fn enumerate_models_dpll(f: &CnfFormula, cap: usize) -> ModelSet {
    let cap = cap.max(1);
    let mut search = Search {
        f,
        value: vec![None; f.n()],
        trail: Vec::new(),
        models: Vec::new(),
        cap,
        truncated: false,
    };
    search.run();
    let mut models = search.models;
    models.sort_unstable();
    ModelSet { n: f.n(), models, truncated: search.truncated }
}

/// Number of models, or `ModelCapExceeded` if it exceeds `cap`.
pub fn count_models(f: &CnfFormula, cap: usize) -> Result<usize> {
    let set = enumerate_models_dpll(f, cap);
    if set.truncated {
        return Err(Error::ModelCapExceeded { cap });
    }
    Ok(set.len())
}

enum ClauseState {
    Satisfied,
    Conflict,
    Unit(Literal),
    Open,
}

struct Search<'a> {
    f: &'a CnfFormula,
    value: Vec<Option<bool>>,
    trail: Vec<usize>,
    models: Vec<u64>,
    cap: usize,
    truncated: bool,
}

impl Search<'_> {
    fn assign(&mut self, lit: Literal, value: bool) {
        self.value[lit.var] = Some(value != lit.negated);
        self.trail.push(lit.var);
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let var = self.trail.pop().expect("trail non-empty");
            self.value[var] = None;
        }
    }

    fn clause_state(&self, lits: &[Literal]) -> ClauseState {
        let mut unassigned = None;
        let mut open = 0;
        for &lit in lits {
            match self.value[lit.var] {
                Some(v) if v != lit.negated => return ClauseState::Satisfied,
                Some(_) => {}
                None => {
                    open += 1;
                    unassigned = Some(lit);
                }
            }
        }
        match (open, unassigned) {
            (0, _) => ClauseState::Conflict,
            (1, Some(lit)) => ClauseState::Unit(lit),
            _ => ClauseState::Open,
        }
    }

    /// Unit propagation to fixpoint. Returns `Some(all_satisfied)` or `None`
    /// on conflict.
    fn propagate(&mut self) -> Option<bool> {
        loop {
            let mut all_satisfied = true;
            let mut unit = None;
            for c in self.f.clauses() {
                match self.clause_state(c.literals()) {
                    ClauseState::Satisfied => {}
                    ClauseState::Conflict => return None,
                    ClauseState::Unit(lit) => {
                        unit = Some(lit);
                        all_satisfied = false;
                        break;
                    }
                    ClauseState::Open => all_satisfied = false,
                }
            }
            match unit {
                Some(lit) => self.assign(lit, true),
                None => return Some(all_satisfied),
            }
        }
    }

    fn run(&mut self) {
        if self.truncated {
            return;
        }
        let mark = self.trail.len();
        match self.propagate() {
            None => {}
            Some(true) => self.expand_free(),
            Some(false) => {
                let (var, first) = self.choose_branch();
                for value in [first, !first] {
                    let depth = self.trail.len();
                    self.assign(Literal::pos(var), value);
                    self.run();
                    self.undo_to(depth);
                    if self.truncated {
                        break;
                    }
                }
            }
        }
        self.undo_to(mark);
    }

    /// Branch variable and the polarity to try first.
    fn choose_branch(&self) -> (usize, bool) {
        let n = self.f.n();
        let mut pos = vec![0usize; n];
        let mut neg = vec![0usize; n];
        let mut shortest = usize::MAX;
        let mut short_hits = vec![0usize; n];
        for c in self.f.clauses() {
            let lits = c.literals();
            if lits.iter().any(|l| self.value[l.var] == Some(!l.negated)) {
                continue;
            }
            let open: Vec<Literal> =
                lits.iter().copied().filter(|l| self.value[l.var].is_none()).collect();
            for l in &open {
                if l.negated {
                    neg[l.var] += 1;
                } else {
                    pos[l.var] += 1;
                }
            }
            match open.len().cmp(&shortest) {
                std::cmp::Ordering::Less => {
                    shortest = open.len();
                    short_hits.iter_mut().for_each(|h| *h = 0);
                    for l in &open {
                        short_hits[l.var] += 1;
                    }
                }
                std::cmp::Ordering::Equal => {
                    for l in &open {
                        short_hits[l.var] += 1;
                    }
                }
                std::cmp::Ordering::Greater => {}
            }
        }
        if let Some(var) = (0..n).find(|&v| (pos[v] == 0) != (neg[v] == 0)) {
            return (var, pos[var] > 0);
        }
        let mut best = None;
        for v in 0..n {
            if short_hits[v] > 0 && best.is_none_or(|b: usize| short_hits[v] > short_hits[b]) {
                best = Some(v);
            }
        }
        let var = best.expect("an open clause has an unassigned variable");
        (var, pos[var] >= neg[var])
    }

    fn expand_free(&mut self) {
        let mut base = 0u64;
        let mut free = Vec::new();
        for (var, v) in self.value.iter().enumerate() {
            match v {
                Some(true) => base |= 1 << var,
                Some(false) => {}
                None => free.push(var),
            }
        }
        let completions = 1u64 << free.len();
        for bits in 0..completions {
            if self.models.len() >= self.cap {
                self.truncated = true;
                return;
            }
            let mut x = base;
            for (i, &var) in free.iter().enumerate() {
                if (bits >> i) & 1 == 1 {
                    x |= 1 << var;
                }
            }
            self.models.push(x);
        }
    }
}
