//! Rectangular duals of irreducible triangulations by the staircase greedy.
//!
//! The placed inner boxes always form a staircase above the horizontal ray
//! (standing in for `S`) and right of the vertical ray (standing in for
//! `W`). Each concavity of the staircase is bounded by two placed boxes
//! which have exactly one unplaced common neighbour; that box must be
//! seated with its bottom-left corner at the concavity. A box is placed
//! only if the region stays a staircase. At the end the inner boxes must
//! form a rectangle that the four outer boxes can frame.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{detect_contacts, ordered_pair, realizes, BoxId, BoxSpec, GeometryError, Layout, Placed};
use crate::graph::ProfitGraph;
use crate::rational::{q, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangulationInstance {
    pub boxes: Vec<BoxSpec>,
    pub edges: Vec<(BoxId, BoxId)>,
    /// Counterclockwise neighbour order per vertex.
    pub rotation: BTreeMap<BoxId, Vec<BoxId>>,
    /// Outer vertices N, E, S, W (clockwise).
    pub outer: [BoxId; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriViolationKind {
    MissingBox,
    UnknownVertex,
    OuterVertices,
    RotationMismatch,
    NotPlanar,
    OuterFace,
    NotTriangulated,
    SeparatingTriangle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriViolation {
    pub kind: TriViolationKind,
    pub witness: Vec<BoxId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriStage {
    Stuck,
    NotRectangle,
    OuterTooSmall,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriError {
    #[error("invalid instance: {:?} at {:?}", .0.kind, .0.witness)]
    Invalid(TriViolation),
    #[error("infeasible ({stage:?}) near {witness:?}")]
    Infeasible { stage: TriStage, witness: Vec<BoxId> },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl TriangulationInstance {
    pub fn graph(&self) -> ProfitGraph {
        let mut g = ProfitGraph::new();
        for b in &self.boxes {
            g.add_vertex(b.id.clone());
        }
        for (a, b) in &self.edges {
            // Self-loops are rejected by validation.
            let _ = g.add_edge(a.clone(), b.clone(), q(1));
        }
        g
    }
}

fn invalid(kind: TriViolationKind, witness: Vec<BoxId>) -> TriError {
    TriError::Invalid(TriViolation { kind, witness })
}

/// Faces of the embedding as vertex cycles.
fn faces(rotation: &BTreeMap<BoxId, Vec<BoxId>>) -> Vec<Vec<BoxId>> {
    let mut used: BTreeSet<(BoxId, BoxId)> = BTreeSet::new();
    let mut out = Vec::new();
    for (u, nbrs) in rotation {
        for v in nbrs {
            if used.contains(&(u.clone(), v.clone())) {
                continue;
            }
            let mut face = Vec::new();
            let (mut a, mut b) = (u.clone(), v.clone());
            while used.insert((a.clone(), b.clone())) {
                face.push(a.clone());
                let rot = &rotation[&b];
                let i = rot.iter().position(|x| *x == a).expect("consistent rotation");
                let next = rot[(i + 1) % rot.len()].clone();
                a = std::mem::replace(&mut b, next);
            }
            out.push(face);
        }
    }
    out
}

fn same_cycle(face: &[BoxId], cycle: &[BoxId]) -> bool {
    let n = cycle.len();
    if face.len() != n {
        return false;
    }
    let Some(s) = face.iter().position(|v| *v == cycle[0]) else { return false };
    let fwd = (0..n).all(|i| face[(s + i) % n] == cycle[i]);
    let bwd = (0..n).all(|i| face[(s + n - i) % n] == cycle[i]);
    fwd || bwd
}

/// Checks that the instance is an irreducible triangulation with the given
/// outer quadrangle.
pub fn validate_instance(inst: &TriangulationInstance) -> Result<(), TriError> {
    let ids: BTreeSet<&BoxId> = inst.boxes.iter().map(|b| &b.id).collect();
    let mut adj: BTreeMap<&BoxId, BTreeSet<&BoxId>> = ids.iter().map(|v| (*v, BTreeSet::new())).collect();
    for (a, b) in &inst.edges {
        for x in [a, b] {
            if !ids.contains(x) {
                return Err(invalid(TriViolationKind::MissingBox, vec![x.clone()]));
            }
        }
        if a == b {
            return Err(invalid(TriViolationKind::NotPlanar, vec![a.clone()]));
        }
        adj.get_mut(a).expect("known").insert(b);
        adj.get_mut(b).expect("known").insert(a);
    }
    let outer: BTreeSet<&BoxId> = inst.outer.iter().collect();
    if outer.len() != 4 || !outer.iter().all(|v| ids.contains(v)) {
        return Err(invalid(TriViolationKind::OuterVertices, inst.outer.to_vec()));
    }
    if let Some(v) = inst.rotation.keys().find(|v| !ids.contains(v)) {
        return Err(invalid(TriViolationKind::UnknownVertex, vec![v.clone()]));
    }
    for (v, nb) in &adj {
        let mut rot: Vec<&BoxId> = inst.rotation.get(*v).map(|r| r.iter().collect()).unwrap_or_default();
        rot.sort();
        if rot != nb.iter().copied().collect::<Vec<_>>() {
            return Err(invalid(TriViolationKind::RotationMismatch, vec![(*v).clone()]));
        }
    }
    let n = ids.len();
    let m = adj.values().map(BTreeSet::len).sum::<usize>() / 2;
    let faces = faces(&inst.rotation);
    let connected = {
        let start = *ids.iter().next().expect("four outer vertices");
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in &adj[v] {
                if seen.insert(*w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == n
    };
    if !connected || n + faces.len() != m + 2 {
        return Err(invalid(TriViolationKind::NotPlanar, Vec::new()));
    }
    let outer_face = faces.iter().position(|f| same_cycle(f, &inst.outer));
    let Some(outer_face) = outer_face else {
        return Err(invalid(TriViolationKind::OuterFace, inst.outer.to_vec()));
    };
    let mut triangles: BTreeSet<Vec<BoxId>> = BTreeSet::new();
    for (i, f) in faces.iter().enumerate() {
        if i == outer_face {
            continue;
        }
        if f.len() != 3 {
            return Err(invalid(TriViolationKind::NotTriangulated, f.clone()));
        }
        let mut t = f.clone();
        t.sort();
        triangles.insert(t);
    }
    for (a, na) in &adj {
        for b in na.iter().filter(|b| *b > a) {
            for c in adj[b].iter().filter(|c| *c > b && na.contains(*c)) {
                let t = vec![(*a).clone(), (*b).clone(), (*c).clone()];
                if !triangles.contains(&t) {
                    return Err(invalid(TriViolationKind::SeparatingTriangle, t));
                }
            }
        }
    }
    Ok(())
}

/// Upper boundary of the placed region: `(x_start, height)` per step,
/// x strictly increasing and height strictly decreasing; the last step runs
/// to infinity at height 0 once anything is placed.
type Steps = Vec<(Q, Q)>;

fn is_staircase(steps: &Steps) -> bool {
    steps.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1)
}

/// Runs the greedy and frames the inner rectangle with the outer boxes.
/// The returned layout is checked to realize every edge.
pub fn realize_triangulation(inst: &TriangulationInstance) -> Result<Layout, TriError> {
    validate_instance(inst)?;
    let specs: BTreeMap<&BoxId, &BoxSpec> = inst.boxes.iter().map(|b| (&b.id, b)).collect();
    let mut adj: BTreeMap<&BoxId, BTreeSet<&BoxId>> = specs.keys().map(|v| (*v, BTreeSet::new())).collect();
    for (a, b) in &inst.edges {
        adj.get_mut(a).expect("validated").insert(b);
        adj.get_mut(b).expect("validated").insert(a);
    }
    let [vn, ve, vs, vw] = &inst.outer;
    let inner: BTreeSet<&BoxId> = specs.keys().copied().filter(|v| !inst.outer.contains(v)).collect();
    let mut placed: BTreeMap<&BoxId, Placed> = BTreeMap::new();
    let mut steps: Steps = vec![(Q::zero(), Q::zero())];

    while placed.len() < inner.len() {
        let mut chosen = None;
        for (i, &(x, h)) in steps.iter().enumerate() {
            if placed.values().any(|p| p.right() == x && p.top() == h) {
                continue;
            }
            let wall = if i == 0 {
                Some(vw)
            } else {
                placed.iter().find(|(_, p)| p.right() == x && p.y <= h && h < p.top()).map(|(id, _)| *id)
            };
            let floor = if h.is_zero() {
                Some(vs)
            } else {
                placed.iter().find(|(_, p)| p.top() == h && p.x <= x && x < p.right()).map(|(id, _)| *id)
            };
            let (Some(wall), Some(floor)) = (wall, floor) else { continue };
            let fits: Vec<&BoxId> = adj[wall]
                .intersection(&adj[floor])
                .copied()
                .filter(|c| !placed.contains_key(c) && *c != vw && *c != vs)
                .collect();
            let [c] = fits.as_slice() else { continue };
            if !inner.contains(c) {
                continue;
            }
            let b = specs[c];
            let top_ok = i == 0 || h + b.height <= steps[i - 1].1;
            let right_ok = i + 1 == steps.len() || x + b.width <= steps[i + 1].0;
            if top_ok && right_ok {
                chosen = Some((i, *c));
                break;
            }
        }
        let Some((i, c)) = chosen else {
            return Err(TriError::Infeasible {
                stage: TriStage::Stuck,
                witness: placed.keys().map(|v| (*v).clone()).collect(),
            });
        };
        let (x, h) = steps[i];
        let b = specs[c];
        placed.insert(c, Placed { width: b.width, height: b.height, x, y: h });
        let mut replacement = vec![(x, h + b.height)];
        let next_x = steps.get(i + 1).map(|s| s.0);
        if next_x != Some(x + b.width) {
            replacement.push((x + b.width, h));
        }
        steps.splice(i..=i, replacement);
        steps.dedup_by(|later, earlier| later.1 == earlier.1);
        assert!(is_staircase(&steps), "staircase invariant broken after placing {c}");
    }

    let (width, height) = match steps.as_slice() {
        [(_, h), (w, zero)] if zero.is_zero() => (*w, *h),
        _ => {
            return Err(TriError::Infeasible {
                stage: TriStage::NotRectangle,
                witness: placed.keys().map(|v| (*v).clone()).collect(),
            })
        }
    };
    let (n, e, s, w) = (specs[vn], specs[ve], specs[vs], specs[vw]);
    let mut short = Vec::new();
    if n.width < width {
        short.push(vn.clone());
    }
    if s.width < width {
        short.push(vs.clone());
    }
    if e.height < height {
        short.push(ve.clone());
    }
    if w.height < height {
        short.push(vw.clone());
    }
    if !short.is_empty() {
        return Err(TriError::Infeasible { stage: TriStage::OuterTooSmall, witness: short });
    }
    let mut layout = Layout::new();
    for (id, p) in placed {
        layout.insert(id.clone(), p);
    }
    layout.place(w, -w.width, Q::zero());
    layout.place(n, Q::zero(), height);
    layout.place(e, width, height - e.height);
    layout.place(s, width - s.width, -s.height);
    if !realizes(&layout, &inst.graph())? {
        return Err(TriError::Infeasible {
            stage: TriStage::Stuck,
            witness: layout.ids().cloned().collect(),
        });
    }
    Ok(layout)
}

/// Builds an instance from a layout whose contacts are the intended graph:
/// edges are the contacts, rotations follow the box boundaries
/// counterclockwise.
pub fn instance_from_layout(layout: &Layout, outer: [BoxId; 4]) -> Result<TriangulationInstance, GeometryError> {
    let contacts = detect_contacts(layout)?;
    let mut around: BTreeMap<BoxId, Vec<(Q, BoxId)>> = layout.ids().map(|id| (id.clone(), Vec::new())).collect();
    for c in &contacts {
        for (me, other) in [(&c.a, &c.b), (&c.b, &c.a)] {
            let p = layout.get(me).expect("contact of placed box");
            let o = layout.get(other).expect("contact of placed box");
            let mid = (c.lo + c.hi) / q(2);
            let (w, h) = (p.width, p.height);
            // Perimeter parameter, counterclockwise from the bottom-left corner.
            let t = if o.top() == p.y && c.orientation == crate::geometry::Orientation::Vertical {
                mid - p.x
            } else if o.x == p.right() {
                w + mid - p.y
            } else if o.y == p.top() {
                w + h + p.right() - mid
            } else {
                w + w + h + p.top() - mid
            };
            around.get_mut(me).expect("placed").push((t, other.clone()));
        }
    }
    let rotation = around
        .into_iter()
        .map(|(id, mut v)| {
            v.sort();
            (id, v.into_iter().map(|(_, o)| o).collect())
        })
        .collect();
    Ok(TriangulationInstance {
        boxes: layout
            .iter()
            .map(|(id, p)| BoxSpec::new(id.clone(), p.width, p.height))
            .collect(),
        edges: contacts.iter().map(|c| ordered_pair(&c.a, &c.b)).collect(),
        rotation,
        outer,
    })
}

/// Surrounds a packing of `[0, w] x [0, h]` with a pinwheel of unit-thick
/// outer boxes and returns the resulting instance.
pub fn framed_instance(inner: &Layout, outer: [BoxId; 4]) -> Result<TriangulationInstance, GeometryError> {
    let r = inner.bounding_box().unwrap_or(crate::geometry::Rect {
        x0: Q::zero(),
        y0: Q::zero(),
        x1: q(1),
        y1: q(1),
    });
    let (w, h) = (r.width(), r.height());
    let mut l = inner.translated(-r.x0, -r.y0);
    let [n, e, s, wv] = outer.clone();
    l.place(&BoxSpec::new(wv, q(1), h + q(1)), q(-1), Q::zero());
    l.place(&BoxSpec::new(n, w + q(1), q(1)), Q::zero(), h);
    l.place(&BoxSpec::new(e, q(1), h + q(1)), w, q(-1));
    l.place(&BoxSpec::new(s, w + q(1), q(1)), q(-1), q(-1));
    instance_from_layout(&l, outer)
}
