//! Profit-weighted supporting graph and the small amount of graph machinery
//! (components, planarity) shared by the solvers.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use petgraph::graph::UnGraph;
use thiserror::Error;

use crate::geometry::{ordered_pair, BoxId};
use crate::rational::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at {0}")]
    SelfLoop(BoxId),
    #[error("negative profit on edge {0}-{1}")]
    NegativeProfit(BoxId, BoxId),
}

/// Simple undirected graph over box ids with non-negative edge profits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProfitGraph {
    vertices: BTreeSet<BoxId>,
    edges: BTreeMap<(BoxId, BoxId), Q>,
}

impl ProfitGraph {
    pub fn new() -> Self {
        ProfitGraph::default()
    }

    pub fn add_vertex(&mut self, v: impl Into<BoxId>) {
        self.vertices.insert(v.into());
    }

    /// Inserts (or overwrites) the edge `a`–`b`.
    pub fn add_edge(
        &mut self,
        a: impl Into<BoxId>,
        b: impl Into<BoxId>,
        profit: Q,
    ) -> Result<(), GraphError> {
        let (a, b) = (a.into(), b.into());
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if profit < Q::zero() {
            return Err(GraphError::NegativeProfit(a, b));
        }
        let key = ordered_pair(&a, &b);
        self.vertices.insert(a);
        self.vertices.insert(b);
        self.edges.insert(key, profit);
        Ok(())
    }

    pub fn remove_edge(&mut self, a: &BoxId, b: &BoxId) -> Option<Q> {
        self.edges.remove(&ordered_pair(a, b))
    }

    pub fn profit(&self, a: &BoxId, b: &BoxId) -> Option<Q> {
        self.edges.get(&ordered_pair(a, b)).copied()
    }

    pub fn has_edge(&self, a: &BoxId, b: &BoxId) -> bool {
        self.edges.contains_key(&ordered_pair(a, b))
    }

    pub fn contains_vertex(&self, v: &BoxId) -> bool {
        self.vertices.contains(v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &BoxId> {
        self.vertices.iter()
    }

    /// Edges as `(a, b, profit)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (&BoxId, &BoxId, &Q)> {
        self.edges.iter().map(|((a, b), p)| (a, b, p))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_profit(&self) -> Q {
        self.edges.values().fold(Q::zero(), |acc, p| acc + p)
    }

    pub fn adjacency(&self) -> BTreeMap<&BoxId, BTreeSet<&BoxId>> {
        let mut adj: BTreeMap<&BoxId, BTreeSet<&BoxId>> =
            self.vertices.iter().map(|v| (v, BTreeSet::new())).collect();
        for (a, b) in self.edges.keys() {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        adj
    }

    pub fn degree(&self, v: &BoxId) -> usize {
        self.edges.keys().filter(|(a, b)| a == v || b == v).count()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency().values().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Subgraph on the same vertex set keeping only the listed edges.
    pub fn with_edges<'a>(&self, keep: impl IntoIterator<Item = &'a (BoxId, BoxId)>) -> ProfitGraph {
        let mut g = ProfitGraph { vertices: self.vertices.clone(), edges: BTreeMap::new() };
        for (a, b) in keep {
            if let Some(p) = self.profit(a, b) {
                g.edges.insert(ordered_pair(a, b), p);
            }
        }
        g
    }

    /// Vertex sets of connected components, each sorted, ordered by smallest id.
    pub fn components(&self) -> Vec<Vec<BoxId>> {
        let adj = self.adjacency();
        let mut seen: BTreeSet<&BoxId> = BTreeSet::new();
        let mut out = Vec::new();
        for v in &self.vertices {
            if !seen.insert(v) {
                continue;
            }
            let mut comp = vec![v.clone()];
            let mut stack = vec![v];
            while let Some(u) = stack.pop() {
                for w in &adj[u] {
                    if seen.insert(w) {
                        comp.push((*w).clone());
                        stack.push(w);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    /// Connected and acyclic (the empty graph counts as a forest but not a tree).
    pub fn is_tree(&self) -> bool {
        !self.vertices.is_empty()
            && self.edges.len() + 1 == self.vertices.len()
            && self.components().len() == 1
    }

    pub fn is_planar(&self) -> bool {
        is_planar_edges(self.vertices.iter(), self.edges.keys())
    }
}

/// Planarity of the simple graph given by vertex and edge lists.
pub fn is_planar_edges<'a>(
    vertices: impl IntoIterator<Item = &'a BoxId>,
    edges: impl IntoIterator<Item = &'a (BoxId, BoxId)>,
) -> bool {
    let mut g: UnGraph<(), ()> = UnGraph::new_undirected();
    let mut index = BTreeMap::new();
    for v in vertices {
        index.entry(v).or_insert_with(|| g.add_node(()));
    }
    let mut m = 0usize;
    for (a, b) in edges {
        let ia = *index.entry(a).or_insert_with(|| g.add_node(()));
        let ib = *index.entry(b).or_insert_with(|| g.add_node(()));
        g.add_edge(ia, ib, ());
        m += 1;
    }
    let n = g.node_count();
    if n >= 3 && m > 3 * n - 6 {
        return false;
    }
    rustworkx_core::planar::is_planar(&g)
}
