use std::collections::{BTreeSet, HashSet};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Clause, CnfFormula, Literal};
use crate::{Error, Result};

/// Uniform random 3-SAT: each clause draws three distinct variables
/// uniformly and negates each with probability 1/2. Duplicate clauses are
/// kept.
pub fn random_3sat(n: usize, m: usize, seed: u64) -> Result<CnfFormula> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("random 3-SAT needs n >= 3, got {n}")));
    }
    if m < 1 {
        return Err(Error::InvalidParams("random 3-SAT needs m >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..m)
        .map(|_| {
            let lits = index::sample(&mut rng, n, 3)
                .into_iter()
                .map(|var| Literal { var, negated: rng.gen_bool(0.5) })
                .collect();
            Clause::new(lits)
        })
        .collect::<Result<Vec<_>>>()?;
    CnfFormula::new(n, clauses)
}

/// Simple undirected graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Edges are unordered; `(i, j)` and `(j, i)` are the same edge.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i == j {
                return Err(Error::InvalidParams(format!("self-loop at node {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::InvalidParams(format!("edge ({i}, {j}) outside 0..{n}")));
            }
            set.insert((i.min(j), i.max(j)));
        }
        Ok(Self { n, edges: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(i, j)` with `i < j`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of each node, ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Plain edge list: node count on the first line, then one `i j` per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (i, j) in self.edges() {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) =
            lines.next().ok_or(Error::Parse { line: 1, message: "missing node count".into() })?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("bad node count {header:?}") })?;
        let mut edges = Vec::new();
        for (line, text) in lines {
            let parts: Vec<&str> = text.split_whitespace().collect();
            let parsed: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[i, j]) => edges.push((i, j)),
                _ => {
                    return Err(Error::Parse { line, message: format!("expected `i j`, got {text:?}") })
                }
            }
        }
        Self::new(n, edges)
    }
}

/// G(n, p): each of the `n(n-1)/2` edges independently with probability `p`,
/// drawn in lexicographic order of `(i, j)`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParams("graph needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges)
}

/// Not-all-equal constraints for every two-hop path `i - j - k`.
///
/// For each center `j` (ascending) and each neighbor pair `i < k`
/// (ascending), emits `(¬x_a ∨ ¬x_b ∨ ¬x_c)` then `(x_a ∨ x_b ∨ x_c)` over the
/// sorted triple `{a, b, c} = {i, j, k}`. A clause whose literal set was
/// already emitted is dropped.
pub fn coordination_formula(g: &Graph) -> Result<CnfFormula> {
    let adj = g.adjacency();
    let mut seen: HashSet<([usize; 3], bool)> = HashSet::new();
    let mut clauses = Vec::new();
    for (j, neighbors) in adj.iter().enumerate() {
        for (a, &i) in neighbors.iter().enumerate() {
            for &k in &neighbors[a + 1..] {
                let mut triple = [i, j, k];
                triple.sort_unstable();
                for negated in [true, false] {
                    if seen.insert((triple, negated)) {
                        clauses.push(Clause::new(
                            triple.iter().map(|&var| Literal { var, negated }).collect(),
                        )?);
                    }
                }
            }
        }
    }
    CnfFormula::new(g.n(), clauses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_3sat_is_deterministic() {
        assert_eq!(random_3sat(10, 40, 7).unwrap(), random_3sat(10, 40, 7).unwrap());
        assert_ne!(random_3sat(10, 40, 7).unwrap(), random_3sat(10, 40, 8).unwrap());
    }

    #[test]
    fn random_3sat_clauses_have_distinct_variables() {
        let f = random_3sat(3, 1, 11).unwrap();
        let mut vars: Vec<_> = f.clauses()[0].literals().iter().map(|l| l.var).collect();
        vars.sort_unstable();
        assert_eq!(vars, vec![0, 1, 2]);

        let f = random_3sat(5, 200, 3).unwrap();
        for c in f.clauses() {
            assert_eq!(c.len(), 3);
            assert_eq!((c.pos_mask() | c.neg_mask()).count_ones(), 3);
        }
    }

    #[test]
    fn random_3sat_variable_frequency() {
        // Each variable should appear in 3/n of the clauses.
        let (n, m, seeds) = (10usize, 40usize, 1000u64);
        let mut hits = vec![0usize; n];
        for seed in 0..seeds {
            for c in random_3sat(n, m, seed).unwrap().clauses() {
                for l in c.literals() {
                    hits[l.var] += 1;
                }
            }
        }
        let total = (m as u64 * seeds) as f64;
        for (v, &h) in hits.iter().enumerate() {
            let freq = h as f64 / total;
            assert!((freq - 0.3).abs() <= 0.05, "variable {v}: {freq}");
        }
    }

    #[test]
    fn random_3sat_rejects_bad_params() {
        assert!(random_3sat(2, 4, 0).is_err());
        assert!(random_3sat(5, 0, 0).is_err());
    }

    #[test]
    fn erdos_renyi_extremes() {
        assert_eq!(erdos_renyi(12, 0.0, 5).unwrap().edge_count(), 0);
        assert_eq!(erdos_renyi(12, 1.0, 5).unwrap().edge_count(), 66);
        assert!(erdos_renyi(0, 0.5, 5).is_err());
        assert!(erdos_renyi(4, 1.5, 5).is_err());
    }

    #[test]
    fn erdos_renyi_mean_edge_count() {
        let mean = (0..1000).map(|s| erdos_renyi(15, 0.3, s).unwrap().edge_count()).sum::<usize>()
            as f64
            / 1000.0;
        assert!((mean - 31.5).abs() <= 1.0, "mean {mean}");
    }

    #[test]
    fn coordination_on_path_and_triangle() {
        let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let f = coordination_formula(&path).unwrap();
        assert_eq!(f.to_string(), "(¬x0 ∨ ¬x1 ∨ ¬x2) ∧ (x0 ∨ x1 ∨ x2)");

        let triangle = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(coordination_formula(&triangle).unwrap().m(), 2);

        let empty = Graph::new(5, []).unwrap();
        assert_eq!(coordination_formula(&empty).unwrap().m(), 0);
    }

    #[test]
    fn coordination_clause_count_matches_two_paths() {
        // On a tree, distinct two-hop paths have distinct vertex triples, so
        // nothing is deduplicated: m = 2 Σ_j C(deg j, 2).
        let star_tree = Graph::new(7, [(0, 1), (0, 2), (0, 3), (3, 4), (3, 5), (5, 6)]).unwrap();
        let expected: usize = star_tree
            .adjacency()
            .iter()
            .map(|nb| 2 * nb.len() * nb.len().saturating_sub(1) / 2)
            .sum();
        assert_eq!(coordination_formula(&star_tree).unwrap().m(), expected);
    }

    #[test]
    fn graph_validation_and_edge_list() {
        assert!(Graph::new(3, [(1, 1)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        let g = Graph::new(4, [(2, 0), (0, 2), (3, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        let text = g.to_edge_list();
        assert_eq!(text, "4\n0 2\n1 3\n");
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
        assert!(Graph::parse_edge_list("3\n0 1 2\n").is_err());
    }
}
