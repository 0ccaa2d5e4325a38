//! Cycle layouts and the cycle-cover approximation for bounded-degree graphs.
//!
//! A cyclic sequence of boxes is laid out in two channels on either side of a
//! horizontal line: the first boxes sit on the line left to right, the last
//! ones hang below it from the same origin in reverse order, and the single
//! remaining box closes the cycle at the end of the shorter channel.
//!
//! The edge set of a graph with maximum degree `Δ` is split into `⌈Δ/2⌉`
//! covers in which every vertex has degree at most two: pad the graph to a
//! `2k`-regular multigraph, orient it along Euler circuits, and split the
//! resulting `k`-regular bipartite out/in graph into perfect matchings. Each
//! matching is a 2-factor; dropping the padding edges leaves cycles and paths.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use thiserror::Error;

use crate::geometry::{
    pack_components, ordered_pair, BoxId, BoxSpec, GeometryError, Layout,
};
use crate::graph::ProfitGraph;
use crate::rational::{q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("a cycle needs at least 3 boxes, got {0}")]
    CycleTooShort(usize),
    #[error("no box for graph vertex {0}")]
    MissingBox(BoxId),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Lays out `boxes` so that every consecutive pair, and the last with the
/// first, touch.
pub fn layout_cycle(boxes: &[BoxSpec]) -> Result<Layout, CycleError> {
    let n = boxes.len();
    if n < 3 {
        return Err(CycleError::CycleTooShort(n));
    }
    let total = boxes.iter().fold(Q::zero(), |acc, b| acc + b.width);
    let half = total / q(2);
    // t = number of boxes in the top channel: the largest t with
    // w_1 + .. + w_t < W/2.
    let mut t = 0;
    let mut top_end = Q::zero();
    while t < n && top_end + boxes[t].width < half {
        top_end += boxes[t].width;
        t += 1;
    }
    let mut layout = Layout::new();
    let mut x = Q::zero();
    for b in &boxes[..t] {
        layout.place(b, x, Q::zero());
        x += b.width;
    }
    let mut bottom_end = Q::zero();
    for b in boxes[t + 1..].iter().rev() {
        layout.place(b, bottom_end, -b.height);
        bottom_end += b.width;
    }
    let closing = &boxes[t];
    if top_end < bottom_end {
        layout.place(closing, top_end, Q::zero());
    } else if bottom_end < top_end {
        layout.place(closing, bottom_end, -closing.height);
    } else {
        // Both channels end at the same x: straddle the line.
        layout.place(closing, top_end, -closing.height / q(2));
    }
    Ok(layout)
}

/// Boxes side by side, bottoms on `y = 0`.
pub fn layout_path(boxes: &[BoxSpec]) -> Layout {
    let mut layout = Layout::new();
    let mut x = Q::zero();
    for b in boxes {
        layout.place(b, x, Q::zero());
        x += b.width;
    }
    layout
}

/// A connected component of one cover, listed in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverComponent {
    Cycle(Vec<BoxId>),
    Path(Vec<BoxId>),
}

impl CoverComponent {
    pub fn vertices(&self) -> &[BoxId] {
        match self {
            CoverComponent::Cycle(v) | CoverComponent::Path(v) => v,
        }
    }
}

/// Edge partition into covers of maximum degree two.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CycleCover {
    pub covers: Vec<BTreeSet<(BoxId, BoxId)>>,
}

impl CycleCover {
    pub fn cover_profit(&self, graph: &ProfitGraph, i: usize) -> Q {
        self.covers[i]
            .iter()
            .filter_map(|(a, b)| graph.profit(a, b))
            .fold(Q::zero(), |acc, p| acc + p)
    }

    /// Components of cover `i`: cycles start at their smallest id and head to
    /// the smaller neighbour; paths start at their smaller endpoint.
    pub fn components(&self, i: usize) -> Vec<CoverComponent> {
        cover_components(&self.covers[i])
    }
}

pub fn cover_components(edges: &BTreeSet<(BoxId, BoxId)>) -> Vec<CoverComponent> {
    let mut adj: BTreeMap<&BoxId, Vec<&BoxId>> = BTreeMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    for nb in adj.values_mut() {
        nb.sort();
    }
    let mut seen: BTreeSet<&BoxId> = BTreeSet::new();
    let mut out = Vec::new();
    // Paths first from their endpoints, then what remains are cycles.
    let starts: Vec<&BoxId> = adj
        .iter()
        .filter(|(_, nb)| nb.len() == 1)
        .map(|(v, _)| *v)
        .chain(adj.keys().copied())
        .collect();
    for s in starts {
        if seen.contains(s) {
            continue;
        }
        let is_path = adj[s].len() == 1;
        let mut order = vec![s.clone()];
        seen.insert(s);
        let mut prev: Option<&BoxId> = None;
        let mut cur = s;
        loop {
            let next = adj[cur].iter().find(|w| Some(**w) != prev && !seen.contains(**w));
            match next {
                Some(w) => {
                    seen.insert(w);
                    order.push((*w).clone());
                    prev = Some(cur);
                    cur = w;
                }
                None => break,
            }
        }
        out.push(if is_path { CoverComponent::Path(order) } else { CoverComponent::Cycle(order) });
    }
    out.sort_by(|a, b| a.vertices().iter().min().cmp(&b.vertices().iter().min()));
    out
}

/// Directed multigraph arc used during the 2-factorization.
#[derive(Debug, Clone, Copy)]
struct Arc {
    from: usize,
    to: usize,
    real: bool,
}

/// Splits the edges of `graph` into at most `⌈Δ/2⌉` covers.
pub fn decompose_cycle_covers(graph: &ProfitGraph) -> CycleCover {
    let ids: Vec<&BoxId> = graph.vertices().collect();
    let index: BTreeMap<&BoxId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = ids.len();
    let delta = graph.max_degree();
    if delta == 0 {
        return CycleCover::default();
    }
    let k = delta.div_ceil(2);
    let target = 2 * k;

    // Undirected padded multigraph: (u, v, real). Self-loops add 2 to degree.
    let mut edges: Vec<(usize, usize, bool)> =
        graph.edges().map(|(a, b, _)| (index[a], index[b], true)).collect();
    let mut degree = vec![0usize; n];
    for &(u, v, _) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    // Pair odd-degree vertices within each component in id order.
    for comp in graph.components() {
        let odd: Vec<usize> =
            comp.iter().map(|v| index[v]).filter(|&i| degree[i] % 2 == 1).collect();
        for pair in odd.chunks(2) {
            edges.push((pair[0], pair[1], false));
            degree[pair[0]] += 1;
            degree[pair[1]] += 1;
        }
    }
    for (v, d) in degree.iter_mut().enumerate() {
        while *d < target {
            edges.push((v, v, false));
            *d += 2;
        }
    }

    let arcs = euler_orientation(n, &edges);
    let matchings = split_regular_bipartite(n, k, &arcs);

    let mut covers = Vec::new();
    for m in matchings {
        let cover: BTreeSet<(BoxId, BoxId)> = m
            .iter()
            .map(|&a| arcs[a])
            .filter(|a| a.real)
            .map(|a| ordered_pair(ids[a.from], ids[a.to]))
            .collect();
        if !cover.is_empty() {
            covers.push(cover);
        }
    }
    CycleCover { covers }
}

/// Orients every edge of an even-degree multigraph along Euler circuits
/// (Hierholzer), starting each circuit at the smallest unvisited vertex and
/// always leaving through the unused edge to the smallest neighbour.
fn euler_orientation(n: usize, edges: &[(usize, usize, bool)]) -> Vec<Arc> {
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(u, v, _)) in edges.iter().enumerate() {
        incident[u].push((v, e));
        if u != v {
            incident[v].push((u, e));
        }
    }
    for list in &mut incident {
        list.sort();
        list.reverse(); // pop() yields smallest neighbour first
    }
    let mut used = vec![false; edges.len()];
    let mut arcs = Vec::with_capacity(edges.len());
    for start in 0..n {
        // Iterative Hierholzer over (vertex, arriving edge) frames.
        let mut stack: Vec<(usize, Option<(usize, usize)>)> = vec![(start, None)];
        while let Some(&(v, _)) = stack.last() {
            let mut advanced = false;
            while let Some((w, e)) = incident[v].pop() {
                if used[e] {
                    continue;
                }
                used[e] = true;
                stack.push((w, Some((v, e))));
                advanced = true;
                break;
            }
            if !advanced {
                let (v, via) = stack.pop().expect("non-empty");
                if let Some((from, e)) = via {
                    arcs.push(Arc { from, to: v, real: edges[e].2 });
                }
            }
        }
    }
    arcs
}

/// Splits the arcs of a `k`-regular orientation (in = out = k everywhere)
/// into `k` sets in which every vertex has exactly one outgoing and one
/// incoming arc, via repeated perfect matchings in the out/in bipartite graph.
fn split_regular_bipartite(n: usize, k: usize, arcs: &[Arc]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<bool> = vec![true; arcs.len()];
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut by_tail: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, a) in arcs.iter().enumerate() {
            if remaining[i] {
                by_tail[a.from].push(i);
            }
        }
        // match_in[v] = arc matched into v.
        let mut match_in: Vec<Option<usize>> = vec![None; n];
        for u in 0..n {
            let mut visited = vec![false; n];
            let found = augment(u, &by_tail, arcs, &mut match_in, &mut visited);
            assert!(found, "regular bipartite graph has a perfect matching");
        }
        let chosen: Vec<usize> = match_in.iter().map(|m| m.expect("perfect")).collect();
        for &a in &chosen {
            remaining[a] = false;
        }
        out.push(chosen);
    }
    out
}

fn augment(
    u: usize,
    by_tail: &[Vec<usize>],
    arcs: &[Arc],
    match_in: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &a in &by_tail[u] {
        let v = arcs[a].to;
        if visited[v] {
            continue;
        }
        visited[v] = true;
        let free = match match_in[v] {
            None => true,
            Some(prev) => augment(arcs[prev].from, by_tail, arcs, match_in, visited),
        };
        if free {
            match_in[v] = Some(a);
            return true;
        }
    }
    false
}

fn lookup<'a>(boxes: &'a BTreeMap<&BoxId, &BoxSpec>, id: &BoxId) -> Result<&'a BoxSpec, CycleError> {
    boxes.get(id).copied().ok_or_else(|| CycleError::MissingBox(id.clone()))
}

/// Lays out the heaviest cover of [`decompose_cycle_covers`]; all its edges
/// become contacts. Boxes outside that cover are packed as isolated
/// components.
pub fn max_crown_cycles(graph: &ProfitGraph, boxes: &[BoxSpec]) -> Result<Layout, CycleError> {
    let by_id: BTreeMap<&BoxId, &BoxSpec> = boxes.iter().map(|b| (&b.id, b)).collect();
    if let Some(v) = graph.vertices().find(|v| !by_id.contains_key(v)) {
        return Err(CycleError::MissingBox(v.clone()));
    }
    let cover = decompose_cycle_covers(graph);
    let mut best: Option<(usize, Q)> = None;
    for i in 0..cover.covers.len() {
        let p = cover.cover_profit(graph, i);
        if best.as_ref().is_none_or(|(_, bp)| p > *bp) {
            best = Some((i, p));
        }
    }
    let mut parts = Vec::new();
    let mut used: BTreeSet<&BoxId> = BTreeSet::new();
    if let Some((i, _)) = best {
        for comp in cover.components(i) {
            let specs: Vec<BoxSpec> = comp
                .vertices()
                .iter()
                .map(|v| lookup(&by_id, v).cloned())
                .collect::<Result<_, _>>()?;
            for s in &specs {
                used.insert(by_id.get_key_value(&s.id).expect("present").0);
            }
            parts.push(match comp {
                CoverComponent::Cycle(_) if specs.len() >= 3 => layout_cycle(&specs)?,
                _ => layout_path(&specs),
            });
        }
    }
    for b in boxes {
        if !used.contains(&b.id) {
            let mut l = Layout::new();
            l.place(b, Q::zero(), Q::zero());
            parts.push(l);
        }
    }
    Ok(pack_components(&parts)?)
}
