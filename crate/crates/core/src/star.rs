//! Star solver and star-forest partitions.
//!
//! Around a center box, at most four leaves can meet the center at a corner;
//! every other touching leaf lies along one side and touches it over its full
//! length. With the corner boxes fixed, assigning the remaining leaves to the
//! four sides is a GAP instance (top and bottom hold widths up to the center
//! width, left and right hold heights up to the center height).
//!
//! Graphs are handled by splitting their edges into star forests, solving
//! every forest and keeping the best layout: trees split into two forests,
//! planar graphs into at most six (three forests, each split in two).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;
use thiserror::Error;

use crate::gap::{gap_sequential, Bin, GapInstance, GapItem};
use crate::geometry::{
    ordered_pair, pack_components, realized_profit, BoxId, BoxSpec, GeometryError, Layout,
};
use crate::graph::{is_planar_edges, ProfitGraph};
use crate::rational::{q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StarError {
    #[error("graph is not a tree")]
    NotATree,
    #[error("graph is not planar")]
    NotPlanar,
    #[error("no box for vertex {0}")]
    MissingBox(BoxId),
    #[error("leaf {0} has no profit entry")]
    MissingProfit(BoxId),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Stars with more leaves than this use the eight-bin formulation (four
/// sides plus four single-item corner bins) instead of enumerating corner
/// subsets.
pub const CORNER_ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarInstance {
    pub center: BoxSpec,
    pub leaves: Vec<BoxSpec>,
    pub profits: BTreeMap<BoxId, Q>,
}

impl StarInstance {
    fn profit(&self, i: usize) -> Q {
        self.profits[&self.leaves[i].id]
    }

    pub fn validate(&self) -> Result<(), StarError> {
        match self.leaves.iter().find(|l| !self.profits.contains_key(&l.id)) {
            Some(l) => Err(StarError::MissingProfit(l.id.clone())),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

pub const SIDES: [Side; 4] = [Side::Top, Side::Bottom, Side::Left, Side::Right];

/// Where each touching leaf goes. Leaves not mentioned are discarded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StarPlan {
    /// Leaf indices at the NE, NW, SW and SE corners, in that order.
    pub corners: Vec<usize>,
    /// Leaf indices per side, in packing order.
    pub sides: BTreeMap<Side, Vec<usize>>,
}

impl StarPlan {
    pub fn value(&self, inst: &StarInstance) -> Q {
        self.corners
            .iter()
            .chain(self.sides.values().flatten())
            .fold(Q::zero(), |acc, &i| acc + inst.profit(i))
    }

    pub fn placed(&self) -> BTreeSet<usize> {
        self.corners.iter().chain(self.sides.values().flatten()).copied().collect()
    }
}

fn side_gap(inst: &StarInstance, items: &[usize], with_corner_bins: bool) -> GapInstance {
    let (w0, h0) = (inst.center.width, inst.center.height);
    let mut bins = vec![
        Bin { id: "top".into(), capacity: w0 },
        Bin { id: "bottom".into(), capacity: w0 },
        Bin { id: "left".into(), capacity: h0 },
        Bin { id: "right".into(), capacity: h0 },
    ];
    if with_corner_bins {
        for c in ["ne", "nw", "sw", "se"] {
            bins.push(Bin { id: c.into(), capacity: q(1) });
        }
    }
    let items = items
        .iter()
        .map(|&i| {
            let leaf = &inst.leaves[i];
            let p = inst.profit(i);
            let mut sizes = vec![leaf.width, leaf.width, leaf.height, leaf.height];
            if with_corner_bins {
                sizes.extend([q(1); 4]);
            }
            GapItem { id: leaf.id.to_string(), values: vec![p; sizes.len()], sizes }
        })
        .collect();
    GapInstance { bins, items }
}

/// Best plan over all corner subsets (or the eight-bin formulation for large
/// stars). Corner slots are interchangeable because corner leaves touch the
/// center in a single point outside every side span, so subsets suffice.
pub fn plan_star(inst: &StarInstance, eps: Q) -> StarPlan {
    let n = inst.leaves.len();
    if n > CORNER_ENUMERATION_LIMIT {
        let all: Vec<usize> = (0..n).collect();
        let gap = side_gap(inst, &all, true);
        let a = gap_sequential(&gap, eps);
        let mut plan = StarPlan::default();
        for (b, side) in SIDES.iter().enumerate() {
            plan.sides.insert(*side, a.items_in(b).map(|j| all[j]).collect());
        }
        for b in 4..8 {
            plan.corners.extend(a.items_in(b).map(|j| all[j]));
        }
        return plan;
    }
    let mut best: Option<(Q, StarPlan)> = None;
    let mut corner = Vec::with_capacity(4);
    for size in 0..=n.min(4) {
        subsets(n, size, 0, &mut corner, &mut |corners| {
            let rest: Vec<usize> = (0..n).filter(|i| !corners.contains(i)).collect();
            let gap = side_gap(inst, &rest, false);
            let a = gap_sequential(&gap, eps);
            let mut plan = StarPlan { corners: corners.to_vec(), sides: BTreeMap::new() };
            for (b, side) in SIDES.iter().enumerate() {
                plan.sides.insert(*side, a.items_in(b).map(|j| rest[j]).collect());
            }
            let v = plan.value(inst);
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, plan));
            }
        });
    }
    best.map(|(_, p)| p).unwrap_or_default()
}

/// Visits all `size`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, size: usize, from: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == size {
        f(cur);
        return;
    }
    for i in from..n {
        if n - i < size - cur.len() {
            break;
        }
        cur.push(i);
        subsets(n, size, i + 1, cur, f);
        cur.pop();
    }
}

/// Places the center at the origin and the plan's leaves around it.
/// Returns the layout and the ids of discarded leaves.
pub fn layout_plan(inst: &StarInstance, plan: &StarPlan) -> (Layout, Vec<BoxId>) {
    let c = &inst.center;
    let (w0, h0) = (c.width, c.height);
    let mut l = Layout::new();
    l.place(c, Q::zero(), Q::zero());
    for (slot, &i) in plan.corners.iter().enumerate() {
        let b = &inst.leaves[i];
        let (x, y) = match slot {
            0 => (w0, h0),
            1 => (-b.width, h0),
            2 => (-b.width, -b.height),
            _ => (w0, -b.height),
        };
        l.place(b, x, y);
    }
    for (side, items) in &plan.sides {
        let mut cursor = Q::zero();
        for &i in items {
            let b = &inst.leaves[i];
            match side {
                Side::Top => l.place(b, cursor, h0),
                Side::Bottom => l.place(b, cursor, -b.height),
                Side::Left => l.place(b, -b.width, cursor),
                Side::Right => l.place(b, w0, cursor),
            }
            cursor += match side {
                Side::Top | Side::Bottom => b.width,
                Side::Left | Side::Right => b.height,
            };
        }
    }
    let placed = plan.placed();
    let discarded = (0..inst.leaves.len())
        .filter(|i| !placed.contains(i))
        .map(|i| inst.leaves[i].id.clone())
        .collect();
    (l, discarded)
}

/// Approximate MAX-CROWN for a star: the best corner choice combined with
/// the sequential GAP over the sides. Discarded leaves are packed separately.
pub fn solve_star(inst: &StarInstance, eps: Q) -> Result<Layout, StarError> {
    inst.validate()?;
    let plan = plan_star(inst, eps);
    let (core, discarded) = layout_plan(inst, &plan);
    let by_id: BTreeMap<&BoxId, &BoxSpec> = inst.leaves.iter().map(|b| (&b.id, b)).collect();
    let mut parts = vec![core];
    parts.extend(discarded.iter().map(|id| single(by_id[id])));
    Ok(pack_components(&parts)?)
}

fn single(b: &BoxSpec) -> Layout {
    let mut l = Layout::new();
    l.place(b, Q::zero(), Q::zero());
    l
}

/// A star by ids only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub center: BoxId,
    pub leaves: Vec<BoxId>,
}

/// Vertex-disjoint stars.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StarForest {
    pub stars: Vec<Star>,
}

impl StarForest {
    pub fn edges(&self) -> impl Iterator<Item = (BoxId, BoxId)> + '_ {
        self.stars
            .iter()
            .flat_map(|s| s.leaves.iter().map(move |l| ordered_pair(&s.center, l)))
    }

    pub fn edge_count(&self) -> usize {
        self.stars.iter().map(|s| s.leaves.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_count() == 0
    }

    /// Stars are pairwise vertex-disjoint and no star repeats a vertex.
    pub fn is_valid(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.stars.iter().all(|s| {
            seen.insert(s.center.clone()) && s.leaves.iter().all(|l| seen.insert(l.clone()))
        })
    }
}

/// Two star forests from a rooted tree: the edge from parent `u` to child
/// `v` goes to forest `depth(u) mod 2`, in the star centered at `u`.
pub fn partition_tree(tree: &ProfitGraph, root: &BoxId) -> Result<[StarForest; 2], StarError> {
    if !tree.is_tree() || !tree.contains_vertex(root) {
        return Err(StarError::NotATree);
    }
    let edges: Vec<(BoxId, BoxId)> = tree.edges().map(|(a, b, _)| (a.clone(), b.clone())).collect();
    Ok(partition_forest_edges(&edges, Some(root)))
}

/// Same as [`partition_tree`] for an acyclic edge set; every component is
/// rooted at `root` if it contains it, otherwise at its smallest id.
fn partition_forest_edges(edges: &[(BoxId, BoxId)], root: Option<&BoxId>) -> [StarForest; 2] {
    let mut adj: BTreeMap<&BoxId, Vec<&BoxId>> = BTreeMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    for nb in adj.values_mut() {
        nb.sort();
    }
    let mut depth: BTreeMap<&BoxId, usize> = BTreeMap::new();
    let mut children: BTreeMap<&BoxId, Vec<&BoxId>> = BTreeMap::new();
    let mut order: Vec<&BoxId> = Vec::new();
    let roots = root.into_iter().filter(|r| adj.contains_key(r)).chain(adj.keys().copied());
    for r in roots.collect::<Vec<_>>() {
        if depth.contains_key(r) {
            continue;
        }
        depth.insert(r, 0);
        let mut queue = VecDeque::from([r]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &adj[u] {
                if !depth.contains_key(v) {
                    depth.insert(v, depth[u] + 1);
                    children.entry(u).or_default().push(v);
                    queue.push_back(v);
                }
            }
        }
    }
    let mut forests = [StarForest::default(), StarForest::default()];
    for u in order {
        if let Some(ch) = children.get(u) {
            forests[depth[u] % 2].stars.push(Star {
                center: u.clone(),
                leaves: ch.iter().map(|v| (*v).clone()).collect(),
            });
        }
    }
    forests
}

/// Splits a planar graph's edges into at most six star forests: a
/// decomposition into three forests, each split in two.
pub fn partition_planar(graph: &ProfitGraph) -> Result<Vec<StarForest>, StarError> {
    if !graph.is_planar() {
        return Err(StarError::NotPlanar);
    }
    let edges: Vec<(BoxId, BoxId)> = graph.edges().map(|(a, b, _)| (a.clone(), b.clone())).collect();
    let mut out = Vec::new();
    for forest in forest_decomposition(&edges, 3) {
        for sf in partition_forest_edges(&forest, None) {
            if !sf.is_empty() {
                out.push(sf);
            }
        }
    }
    Ok(out)
}

/// Partitions `edges` into forests by matroid-partition augmenting paths,
/// starting with `k` forests and adding more only if an edge cannot be
/// inserted (never for planar input with `k = 3`).
pub fn forest_decomposition(edges: &[(BoxId, BoxId)], k: usize) -> Vec<Vec<(BoxId, BoxId)>> {
    let mut ids: BTreeMap<&BoxId, usize> = BTreeMap::new();
    for (a, b) in edges {
        let n = ids.len();
        ids.entry(a).or_insert(n);
        let n = ids.len();
        ids.entry(b).or_insert(n);
    }
    let ends: Vec<(usize, usize)> = edges.iter().map(|(a, b)| (ids[a], ids[b])).collect();
    let n = ids.len();
    let mut forests = Forests { n, owner: vec![None; ends.len()], count: k, ends: &ends };
    for e in 0..ends.len() {
        if !forests.insert(e) {
            forests.count += 1;
            let f = forests.count - 1;
            forests.owner[e] = Some(f);
        }
    }
    let mut out = vec![Vec::new(); forests.count];
    for (e, o) in forests.owner.iter().enumerate() {
        out[o.expect("all assigned")].push(edges[e].clone());
    }
    out.retain(|f| !f.is_empty());
    out
}

struct Forests<'a> {
    n: usize,
    owner: Vec<Option<usize>>,
    count: usize,
    ends: &'a [(usize, usize)],
}

impl Forests<'_> {
    /// Edge ids on the path between `u` and `v` in forest `f`, or `None` if
    /// they are not connected there.
    fn path(&self, f: usize, u: usize, v: usize) -> Option<Vec<usize>> {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.n];
        for (e, o) in self.owner.iter().enumerate() {
            if *o == Some(f) {
                let (a, b) = self.ends[e];
                adj[a].push((b, e));
                adj[b].push((a, e));
            }
        }
        let mut via: Vec<Option<(usize, usize)>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        seen[u] = true;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            if x == v {
                let mut path = Vec::new();
                let mut cur = v;
                while let Some((prev, e)) = via[cur] {
                    path.push(e);
                    cur = prev;
                }
                return Some(path);
            }
            for &(y, e) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    via[y] = Some((x, e));
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// Inserts edge `e`, re-homing other edges along a shortest augmenting
    /// path if needed. Returns false when no forest can take it.
    fn insert(&mut self, e: usize) -> bool {
        // label[x] = (previous edge, forest that x displaces it from).
        let mut label: BTreeMap<usize, Option<(usize, usize)>> = BTreeMap::new();
        label.insert(e, None);
        let mut queue = VecDeque::from([e]);
        while let Some(x) = queue.pop_front() {
            let (u, v) = self.ends[x];
            for f in 0..self.count {
                if self.owner[x] == Some(f) {
                    continue;
                }
                match self.path(f, u, v) {
                    None => {
                        // x fits in f: shift the chain.
                        let mut cur = x;
                        let mut target = f;
                        loop {
                            let prev_owner = self.owner[cur];
                            self.owner[cur] = Some(target);
                            match label[&cur] {
                                None => return true,
                                Some((prev, _)) => {
                                    target = prev_owner.expect("displaced edges are owned");
                                    cur = prev;
                                }
                            }
                        }
                    }
                    Some(path) => {
                        for y in path {
                            if let std::collections::btree_map::Entry::Vacant(slot) = label.entry(y) {
                                slot.insert(Some((x, f)));
                                queue.push_back(y);
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

fn spec_map(boxes: &[BoxSpec]) -> BTreeMap<&BoxId, &BoxSpec> {
    boxes.iter().map(|b| (&b.id, b)).collect()
}

/// Solves every star of `forest` and packs the results together with all
/// remaining boxes as isolated components.
pub fn solve_star_forest(
    forest: &StarForest,
    boxes: &[BoxSpec],
    graph: &ProfitGraph,
    eps: Q,
) -> Result<Layout, StarError> {
    let by_id = spec_map(boxes);
    let get = |id: &BoxId| by_id.get(id).copied().ok_or_else(|| StarError::MissingBox(id.clone()));
    let mut parts = Vec::new();
    let mut used: BTreeSet<BoxId> = BTreeSet::new();
    let mut discarded = Vec::new();
    for s in &forest.stars {
        let inst = StarInstance {
            center: get(&s.center)?.clone(),
            leaves: s.leaves.iter().map(|l| get(l).cloned()).collect::<Result<_, _>>()?,
            profits: s
                .leaves
                .iter()
                .map(|l| (l.clone(), graph.profit(&s.center, l).unwrap_or_else(Q::zero)))
                .collect(),
        };
        let plan = plan_star(&inst, eps);
        let (core, dropped) = layout_plan(&inst, &plan);
        used.extend(core.ids().cloned());
        parts.push(core);
        discarded.extend(dropped);
    }
    for id in discarded {
        parts.push(single(get(&id)?));
        used.insert(id);
    }
    for b in boxes {
        if !used.contains(&b.id) {
            parts.push(single(b));
        }
    }
    Ok(pack_components(&parts)?)
}

fn is_forest(graph: &ProfitGraph) -> bool {
    graph.edge_count() + graph.components().len() == graph.vertex_count()
}

/// Star forests used by [`max_crown_stars`]: two for acyclic graphs (each
/// component rooted at its smallest id), at most six for planar ones.
pub fn star_forests(graph: &ProfitGraph) -> Result<Vec<StarForest>, StarError> {
    if is_forest(graph) {
        let edges: Vec<(BoxId, BoxId)> = graph.edges().map(|(a, b, _)| (a.clone(), b.clone())).collect();
        Ok(partition_forest_edges(&edges, None).into_iter().filter(|f| !f.is_empty()).collect())
    } else {
        partition_planar(graph)
    }
}

/// Best layout over the star forests of the graph's edge partition.
pub fn max_crown_stars(graph: &ProfitGraph, boxes: &[BoxSpec], eps: Q) -> Result<Layout, StarError> {
    let by_id = spec_map(boxes);
    if let Some(v) = graph.vertices().find(|v| !by_id.contains_key(v)) {
        return Err(StarError::MissingBox(v.clone()));
    }
    let mut best: Option<(Q, Layout)> = None;
    for forest in star_forests(graph)? {
        let l = solve_star_forest(&forest, boxes, graph, eps)?;
        let p = realized_profit(&l, graph)?;
        if best.as_ref().is_none_or(|(bp, _)| p > *bp) {
            best = Some((p, l));
        }
    }
    match best {
        Some((_, l)) => Ok(l),
        None => solve_star_forest(&StarForest::default(), boxes, graph, eps),
    }
}

/// Greedy maximal planar subgraph: edges by decreasing profit (ties by id
/// pair), each kept if the graph stays planar.
pub fn maximal_planar_subgraph(graph: &ProfitGraph) -> ProfitGraph {
    let mut order: Vec<(&BoxId, &BoxId, &Q)> = graph.edges().collect();
    order.sort_by(|x, y| y.2.cmp(x.2).then_with(|| (x.0, x.1).cmp(&(y.0, y.1))));
    let vertices: Vec<BoxId> = graph.vertices().cloned().collect();
    let mut kept: Vec<(BoxId, BoxId)> = Vec::new();
    for (a, b, _) in order {
        kept.push((a.clone(), b.clone()));
        if !is_planar_edges(vertices.iter(), kept.iter()) {
            kept.pop();
        }
    }
    graph.with_edges(kept.iter())
}
