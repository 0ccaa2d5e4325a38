//! Hierarchical contact layouts for an embedded single-sink DAG.
//!
//! Every edge `u -> v` must become a vertical contact with `u` directly
//! below `v`. The y-coordinates are forced by the heights (the sink's top is
//! at 0), a top-down sweep fixes the left-to-right order of boxes on every
//! horizontal line, and the x-coordinates then follow from a system of
//! difference constraints solved with Bellman-Ford.
//!
//! Rotation convention: `rotation[v]` lists the neighbours of `v`
//! counterclockwise. Parents sit above `v`, so the outgoing block read
//! counterclockwise runs right to left, and the incoming block that follows
//! it runs left to right along the bottom of `v`. The sink has no outgoing
//! block; its rotation is read left to right as given.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{BoxId, BoxSpec, Layout, Placed};
use crate::rational::{format_q, Q};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmbeddedDag {
    pub vertices: Vec<BoxId>,
    /// Directed child -> parent, towards the sink.
    pub edges: Vec<(BoxId, BoxId)>,
    pub rotation: BTreeMap<BoxId, Vec<BoxId>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    UnknownVertex,
    DuplicateEdge,
    SelfLoop,
    RotationMismatch,
    Cycle,
    NoSink,
    MultipleSinks,
    Unreachable,
    NotBimodal,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{kind:?} at {vertex}")]
pub struct Violation {
    pub vertex: BoxId,
    pub kind: ViolationKind,
}

/// Constraint `l[a] - l[b] <= bound` on left coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XConstraint {
    pub a: BoxId,
    pub b: BoxId,
    #[serde(with = "crate::rational::serde_q")]
    pub bound: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierError {
    #[error("invalid embedding: {0}")]
    Embedding(#[from] Violation),
    #[error("no box for vertex {0}")]
    MissingBox(BoxId),
    #[error("box {0} is not a vertex of the graph")]
    UnknownBox(BoxId),
    #[error("box {id} would need top {} and {}", format_q(first), format_q(second))]
    YConflict { id: BoxId, first: Q, second: Q },
    #[error("box {0} would appear twice on one sweep line")]
    SplitBox(BoxId),
    #[error("parents of {0} are in the wrong order for its rotation")]
    ParentOrder(BoxId),
    #[error("x constraints contain a negative cycle of {} constraints", .0.len())]
    Infeasible(Vec<XConstraint>),
}

impl HierError {
    /// Name of the stage that rejected the instance.
    pub fn stage(&self) -> &'static str {
        match self {
            HierError::Embedding(_) | HierError::MissingBox(_) | HierError::UnknownBox(_) => "embedding",
            HierError::YConflict { .. } => "assign_y",
            HierError::SplitBox(_) | HierError::ParentOrder(_) => "sweep",
            HierError::Infeasible(_) => "solve_x",
        }
    }
}

impl EmbeddedDag {
    pub fn sink(&self) -> Option<&BoxId> {
        let sources: BTreeSet<&BoxId> = self.edges.iter().map(|(u, _)| u).collect();
        let mut sinks = self.vertices.iter().filter(|v| !sources.contains(v));
        match (sinks.next(), sinks.next()) {
            (Some(s), None) => Some(s),
            _ => None,
        }
    }

    fn parents(&self) -> BTreeMap<&BoxId, BTreeSet<&BoxId>> {
        let mut m: BTreeMap<&BoxId, BTreeSet<&BoxId>> = self.vertices.iter().map(|v| (v, BTreeSet::new())).collect();
        for (u, v) in &self.edges {
            m.entry(u).or_default().insert(v);
        }
        m
    }

    fn children(&self) -> BTreeMap<&BoxId, BTreeSet<&BoxId>> {
        let mut m: BTreeMap<&BoxId, BTreeSet<&BoxId>> = self.vertices.iter().map(|v| (v, BTreeSet::new())).collect();
        for (u, v) in &self.edges {
            m.entry(v).or_default().insert(u);
        }
        m
    }

    /// Children of `v` left to right and parents of `v` left to right, read
    /// off the rotation. Assumes a validated embedding.
    pub fn local_order(&self, v: &BoxId) -> (Vec<BoxId>, Vec<BoxId>) {
        let parents = &self.parents()[v];
        let rot = self.rotation.get(v).cloned().unwrap_or_default();
        if parents.is_empty() {
            return (rot, Vec::new());
        }
        let n = rot.len();
        // Start of the outgoing block: an out-neighbour preceded by an in-neighbour.
        let start = (0..n)
            .find(|&i| parents.contains(&rot[i]) && !parents.contains(&rot[(i + n - 1) % n]))
            .unwrap_or(0);
        let turned: Vec<BoxId> = (0..n).map(|i| rot[(start + i) % n].clone()).collect();
        let k = parents.len();
        let mut ups = turned[..k].to_vec();
        ups.reverse();
        (turned[k..].to_vec(), ups)
    }
}

/// Checks vertices, rotation, acyclicity, the unique sink, reachability of
/// the sink and bimodality, in that order; reports the first violation.
pub fn validate_embedding(dag: &EmbeddedDag) -> Result<(), Violation> {
    let fail = |vertex: &BoxId, kind| Err(Violation { vertex: vertex.clone(), kind });
    let verts: BTreeSet<&BoxId> = dag.vertices.iter().collect();
    let mut seen_edges = BTreeSet::new();
    for (u, v) in &dag.edges {
        for x in [u, v] {
            if !verts.contains(x) {
                return fail(x, ViolationKind::UnknownVertex);
            }
        }
        if u == v {
            return fail(u, ViolationKind::SelfLoop);
        }
        if !seen_edges.insert((u.min(v), u.max(v))) {
            return fail(u, ViolationKind::DuplicateEdge);
        }
    }
    let parents = dag.parents();
    let children = dag.children();
    for v in &dag.vertices {
        let mut nb: Vec<&BoxId> = parents[v].iter().chain(children[v].iter()).copied().collect();
        nb.sort();
        let mut rot: Vec<&BoxId> = dag.rotation.get(v).map(|r| r.iter().collect()).unwrap_or_default();
        rot.sort();
        if nb != rot {
            return fail(v, ViolationKind::RotationMismatch);
        }
    }
    // Kahn's algorithm from the sources; leftovers lie on a cycle.
    let mut indeg: BTreeMap<&BoxId, usize> = children.iter().map(|(v, c)| (*v, c.len())).collect();
    let mut queue: VecDeque<&BoxId> = indeg.iter().filter(|(_, d)| **d == 0).map(|(v, _)| *v).collect();
    let mut done = 0;
    while let Some(u) = queue.pop_front() {
        done += 1;
        for p in &parents[u] {
            let d = indeg.get_mut(p).expect("known vertex");
            *d -= 1;
            if *d == 0 {
                queue.push_back(p);
            }
        }
    }
    if done < dag.vertices.len() {
        let v = indeg.iter().find(|(_, d)| **d > 0).map(|(v, _)| *v).expect("cycle vertex");
        return fail(v, ViolationKind::Cycle);
    }
    let sinks: Vec<&BoxId> = dag.vertices.iter().filter(|v| parents[v].is_empty()).collect();
    match sinks.as_slice() {
        [] => {
            return match dag.vertices.first() {
                Some(v) => fail(v, ViolationKind::NoSink),
                None => Ok(()),
            }
        }
        [_] => {}
        [_, second, ..] => return fail(second, ViolationKind::MultipleSinks),
    }
    let sink = sinks[0];
    let mut reach = BTreeSet::from([sink]);
    let mut stack = vec![sink];
    while let Some(v) = stack.pop() {
        for c in &children[v] {
            if reach.insert(c) {
                stack.push(c);
            }
        }
    }
    if let Some(v) = dag.vertices.iter().find(|v| !reach.contains(v)) {
        return fail(v, ViolationKind::Unreachable);
    }
    for v in &dag.vertices {
        let rot = &dag.rotation[v];
        let n = rot.len();
        let changes = (0..n)
            .filter(|&i| parents[v].contains(&rot[i]) != parents[v].contains(&rot[(i + 1) % n]))
            .count();
        if changes > 2 {
            return fail(v, ViolationKind::NotBimodal);
        }
    }
    Ok(())
}

/// Top and bottom of every box: the sink's top is 0 and each child's top
/// equals its parent's bottom.
pub fn assign_y(dag: &EmbeddedDag, heights: &BTreeMap<BoxId, Q>) -> Result<BTreeMap<BoxId, (Q, Q)>, HierError> {
    let sink = dag.sink().ok_or_else(|| {
        HierError::Embedding(Violation {
            vertex: dag.vertices.first().cloned().unwrap_or_else(|| BoxId(String::new())),
            kind: ViolationKind::MultipleSinks,
        })
    })?;
    let children = dag.children();
    let height = |v: &BoxId| heights.get(v).copied().ok_or_else(|| HierError::MissingBox(v.clone()));
    let mut ty: BTreeMap<BoxId, (Q, Q)> = BTreeMap::new();
    ty.insert(sink.clone(), (Q::zero(), -height(sink)?));
    let mut stack = vec![sink];
    while let Some(v) = stack.pop() {
        let bottom = ty[v].1;
        for c in &children[v] {
            match ty.get(*c) {
                Some(&(t, _)) if t != bottom => {
                    return Err(HierError::YConflict { id: (*c).clone(), first: t, second: bottom });
                }
                Some(_) => {}
                None => {
                    ty.insert((*c).clone(), (bottom, bottom - height(c)?));
                    stack.push(c);
                }
            }
        }
    }
    Ok(ty)
}

/// Simulates the top-down sweep and returns the "a left of b" pairs, in
/// the order first seen.
pub fn sweep_order(dag: &EmbeddedDag, ys: &BTreeMap<BoxId, (Q, Q)>) -> Result<Vec<(BoxId, BoxId)>, HierError> {
    let sink = dag.sink().expect("validated embedding").clone();
    let local: BTreeMap<&BoxId, (Vec<BoxId>, Vec<BoxId>)> =
        dag.vertices.iter().map(|v| (v, dag.local_order(v))).collect();
    let mut line = vec![sink];
    let mut pairs = Vec::new();
    let mut seen = BTreeSet::new();
    while !line.is_empty() {
        let level = line.iter().map(|v| ys[v].1).max().expect("non-empty");
        let mut next: Vec<BoxId> = Vec::new();
        // Parents, left to right, that contributed each new box.
        let mut from: BTreeMap<BoxId, Vec<BoxId>> = BTreeMap::new();
        for v in &line {
            if ys[v].1 != level {
                next.push(v.clone());
                continue;
            }
            for c in &local[v].0 {
                from.entry(c.clone()).or_default().push(v.clone());
                if next.last() != Some(c) {
                    next.push(c.clone());
                }
            }
        }
        let mut on_line = BTreeSet::new();
        for v in &next {
            if !on_line.insert(v) {
                return Err(HierError::SplitBox(v.clone()));
            }
        }
        for (c, ps) in &from {
            if *ps != local[c].1 {
                return Err(HierError::ParentOrder(c.clone()));
            }
        }
        for w in next.windows(2) {
            let p = (w[0].clone(), w[1].clone());
            if seen.insert(p.clone()) {
                pairs.push(p);
            }
        }
        line = next;
    }
    Ok(pairs)
}

/// Difference constraints on left coordinates: every edge overlaps by at
/// least `delta`, every ordered pair is separated.
pub fn x_constraints(
    widths: &BTreeMap<BoxId, Q>,
    edges: &[(BoxId, BoxId)],
    order: &[(BoxId, BoxId)],
    delta: Q,
) -> Vec<XConstraint> {
    let mut out = Vec::new();
    for (i, j) in edges {
        out.push(XConstraint { a: j.clone(), b: i.clone(), bound: widths[i] - delta });
        out.push(XConstraint { a: i.clone(), b: j.clone(), bound: widths[j] - delta });
    }
    for (a, b) in order {
        out.push(XConstraint { a: a.clone(), b: b.clone(), bound: -widths[a] });
    }
    out
}

/// Shortest-path solution of the constraints anchored at `anchor = 0`, or
/// the constraints along a negative cycle.
pub fn solve_constraints(
    vertices: &[BoxId],
    constraints: &[XConstraint],
    anchor: &BoxId,
) -> Result<BTreeMap<BoxId, Q>, Vec<XConstraint>> {
    let index: BTreeMap<&BoxId, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let n = vertices.len();
    let mut dist: Vec<Option<Q>> = vec![None; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    dist[index[anchor]] = Some(Q::zero());
    // l[a] <= l[b] + bound is an edge b -> a of weight bound.
    let relax = |dist: &mut Vec<Option<Q>>, pred: &mut Vec<Option<usize>>| -> Option<usize> {
        let mut last = None;
        for (k, c) in constraints.iter().enumerate() {
            let (a, b) = (index[&c.a], index[&c.b]);
            if let Some(db) = dist[b] {
                let cand = db + c.bound;
                if dist[a].is_none_or(|da| cand < da) {
                    dist[a] = Some(cand);
                    pred[a] = Some(k);
                    last = Some(a);
                }
            }
        }
        last
    };
    let mut changed = None;
    for _ in 0..n.max(1) {
        changed = relax(&mut dist, &mut pred);
        if changed.is_none() {
            break;
        }
    }
    if let Some(mut v) = changed {
        for _ in 0..n {
            v = index[&constraints[pred[v].expect("relaxed")].b];
        }
        let start = v;
        let mut cycle = Vec::new();
        loop {
            let k = pred[v].expect("on cycle");
            cycle.push(constraints[k].clone());
            v = index[&constraints[k].b];
            if v == start {
                break;
            }
        }
        cycle.reverse();
        return Err(cycle);
    }
    Ok(vertices
        .iter()
        .zip(dist)
        .map(|(v, d)| (v.clone(), d.unwrap_or_else(Q::zero)))
        .collect())
}

/// Left coordinates from the edge and ordering constraints.
pub fn solve_x(
    dag: &EmbeddedDag,
    widths: &BTreeMap<BoxId, Q>,
    order: &[(BoxId, BoxId)],
    delta: Q,
) -> Result<BTreeMap<BoxId, Q>, HierError> {
    let cs = x_constraints(widths, &dag.edges, order, delta);
    let sink = dag.sink().expect("validated embedding");
    solve_constraints(&dag.vertices, &cs, sink).map_err(HierError::Infeasible)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sides {
    pub t: Q,
    pub b: Q,
    pub l: Q,
    pub r: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierSolution {
    pub sides: BTreeMap<BoxId, Sides>,
}

impl HierSolution {
    pub fn to_layout(&self) -> Layout {
        let mut l = Layout::new();
        for (id, s) in &self.sides {
            l.insert(id.clone(), Placed { width: s.r - s.l, height: s.t - s.b, x: s.l, y: s.b });
        }
        l
    }
}

/// A thousandth of the smallest width.
pub fn default_delta(boxes: &[BoxSpec]) -> Option<Q> {
    boxes.iter().map(|b| b.width).min().map(|w| w / Q::from_integer(1000))
}

pub fn solve_hier_sides(dag: &EmbeddedDag, boxes: &[BoxSpec], delta: Q) -> Result<HierSolution, HierError> {
    validate_embedding(dag)?;
    let verts: BTreeSet<&BoxId> = dag.vertices.iter().collect();
    if let Some(b) = boxes.iter().find(|b| !verts.contains(&b.id)) {
        return Err(HierError::UnknownBox(b.id.clone()));
    }
    let specs: BTreeMap<&BoxId, &BoxSpec> = boxes.iter().map(|b| (&b.id, b)).collect();
    if let Some(v) = dag.vertices.iter().find(|v| !specs.contains_key(v)) {
        return Err(HierError::MissingBox(v.clone()));
    }
    let heights = boxes.iter().map(|b| (b.id.clone(), b.height)).collect();
    let widths: BTreeMap<BoxId, Q> = boxes.iter().map(|b| (b.id.clone(), b.width)).collect();
    let ys = assign_y(dag, &heights)?;
    let order = sweep_order(dag, &ys)?;
    let xs = solve_x(dag, &widths, &order, delta)?;
    let sides = dag
        .vertices
        .iter()
        .map(|v| {
            let (t, b) = ys[v];
            let l = xs[v];
            (v.clone(), Sides { t, b, l, r: l + widths[v] })
        })
        .collect();
    Ok(HierSolution { sides })
}

/// Full pipeline: embedding check, y-assignment, sweep and x-solve.
pub fn solve_hier(dag: &EmbeddedDag, boxes: &[BoxSpec], delta: Q) -> Result<Layout, HierError> {
    solve_hier_sides(dag, boxes, delta).map(|s| s.to_layout())
}
