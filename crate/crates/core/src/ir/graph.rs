// Copyright 2026 The qdich Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::collections::BTreeSet;

use super::CostFunction;

/// Simple graph with an edge wherever some term couples two variables
/// nontrivially.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionGraph {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
    pub max_degree: usize,
    adjacency: Vec<BTreeSet<usize>>,
}

impl InteractionGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adjacency = vec![BTreeSet::new(); n];
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                continue;
            }
            let e = (a.min(b), a.max(b));
            if set.insert(e) {
                adjacency[e.0].insert(e.1);
                adjacency[e.1].insert(e.0);
            }
        }
        let max_degree = adjacency.iter().map(BTreeSet::len).max().unwrap_or(0);
        InteractionGraph { n, edges: set, max_degree, adjacency }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Number of vertices of each degree, indexed by degree.
    pub fn degree_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0; self.max_degree + 1];
        for adj in &self.adjacency {
            hist[adj.len()] += 1;
        }
        hist
    }
}

/// Builds the interaction graph of the given decomposition. Terms on the
/// same pair are not merged: a pair is an edge as soon as one term depends
/// on both of its variables.
pub fn interaction_graph(cost: &CostFunction) -> InteractionGraph {
    let edges = cost
        .terms
        .iter()
        .filter(|t| t.support.len() == 2 && t.depends_on_slot(0) && t.depends_on_slot(1))
        .map(|t| (t.support[0], t.support[1]));
    InteractionGraph::from_edges(cost.n_vars, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::Term;
    use proptest::prelude::*;

    fn graph(n: usize, terms: Vec<Term>) -> InteractionGraph {
        interaction_graph(&CostFunction::real(n, terms).unwrap())
    }

    #[test]
    fn one_sided_term_is_not_an_edge() {
        let g = graph(3, vec![Term::two(1, 2, [0.0, 1.0, 0.0, 1.0])]);
        assert!(g.edges.is_empty());
        assert_eq!(g.max_degree, 0);
    }

    #[test]
    fn triangle_and_star() {
        let c = [0.0, 0.0, 0.0, 1.0];
        let g = graph(4, vec![Term::two(1, 2, c), Term::two(2, 3, c), Term::two(1, 3, c)]);
        assert_eq!(g.max_degree, 2);
        let g = graph(5, vec![Term::two(1, 2, c), Term::two(1, 3, c), Term::two(1, 4, c)]);
        assert_eq!(g.max_degree, 3);
        assert_eq!(g.degree_histogram(), vec![1, 3, 0, 1]);
    }

    #[test]
    fn parallel_terms_count_once() {
        let g = graph(2, vec![Term::two(0, 1, [0.0, 0.0, 0.0, 1.0]), Term::two(1, 0, [1.0, 0.0, 0.0, 1.0])]);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.degree(0), 1);
    }

    fn table() -> impl Strategy<Value = [f64; 4]> {
        prop::array::uniform4(-2i32..3).prop_map(|t| t.map(f64::from))
    }

    #[test]
    fn separable_sum_counts_as_coupled_but_its_split_does_not() {
        // x0 + x2 changes under either flip, so it is an edge; its two halves are not
        let whole = graph(3, vec![Term::two(0, 2, [0.0, 1.0, 1.0, 2.0])]);
        assert!(whole.has_edge(0, 2));
        let split = graph(3, vec![Term::two(0, 2, [0.0, 0.0, 1.0, 1.0]), Term::two(0, 2, [0.0, 1.0, 0.0, 1.0])]);
        assert!(!split.has_edge(0, 2));
    }

    proptest! {
        #[test]
        fn proportional_split_keeps_edges(t in table(), frac in 1i32..4, c in -3i32..3) {
            let whole = graph(3, vec![Term::two(0, 2, t)]);
            let a = frac as f64 / 4.0;
            let parts = graph(3, vec![Term::two(0, 2, t.map(|x| a * x)), Term::two(0, 2, t.map(|x| (1.0 - a) * x))]);
            prop_assert_eq!(&parts.edges, &whole.edges);

            let terms = vec![Term::two(0, 2, t), Term::two(1, 2, [c as f64; 4]), Term::one(1, [c as f64; 2])];
            prop_assert_eq!(graph(3, terms).edges, whole.edges);
        }
    }
}
