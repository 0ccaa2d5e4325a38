//! Boxes, placements and contacts.
//!
//! Every coordinate is an exact rational, so abutment is decided by exact
//! equality. A contact is any non-empty intersection of two closed boxes whose
//! interiors are disjoint, including a single shared corner point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::ProfitGraph;
use crate::rational::{q, Q};

/// Opaque box identifier. Ordering is lexicographic on the string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoxId(pub String);

impl BoxId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BoxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for BoxId {
    fn from(s: &str) -> Self {
        BoxId(s.to_owned())
    }
}

impl From<String> for BoxId {
    fn from(s: String) -> Self {
        BoxId(s)
    }
}

/// Orders a pair so that the smaller id comes first.
pub fn ordered_pair(a: &BoxId, b: &BoxId) -> (BoxId, BoxId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("boxes {0} and {1} overlap")]
    Overlap(BoxId, BoxId),
    #[error("box {0} is not placed")]
    MissingBox(BoxId),
    #[error("duplicate box id {0}")]
    DuplicateId(BoxId),
    #[error("box {0} must have positive width and height")]
    NonPositiveDimension(BoxId),
}

/// An input rectangle with fixed dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxSpec {
    pub id: BoxId,
    pub width: Q,
    pub height: Q,
}

impl BoxSpec {
    pub fn new(id: impl Into<BoxId>, width: Q, height: Q) -> Self {
        BoxSpec { id: id.into(), width, height }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.width > Q::zero() && self.height > Q::zero() {
            Ok(())
        } else {
            Err(GeometryError::NonPositiveDimension(self.id.clone()))
        }
    }
}

/// Checks positivity of every box and uniqueness of ids.
pub fn validate_boxes(boxes: &[BoxSpec]) -> Result<(), GeometryError> {
    let mut seen = BTreeSet::new();
    for b in boxes {
        b.validate()?;
        if !seen.insert(&b.id) {
            return Err(GeometryError::DuplicateId(b.id.clone()));
        }
    }
    Ok(())
}

/// A box with its lower-left corner fixed in the plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placed {
    pub width: Q,
    pub height: Q,
    pub x: Q,
    pub y: Q,
}

impl Placed {
    pub fn right(&self) -> Q {
        self.x + self.width
    }

    pub fn top(&self) -> Q {
        self.y + self.height
    }
}

/// Axis-aligned bounding rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub x0: Q,
    pub y0: Q,
    pub x1: Q,
    pub y1: Q,
}

impl Rect {
    pub fn width(&self) -> Q {
        self.x1 - self.x0
    }

    pub fn height(&self) -> Q {
        self.y1 - self.y0
    }
}

/// Placement map from box id to placed rectangle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Layout {
    boxes: BTreeMap<BoxId, Placed>,
}

impl Layout {
    pub fn new() -> Self {
        Layout::default()
    }

    /// Places `spec` with its lower-left corner at `(x, y)`, replacing any
    /// previous placement of the same id.
    pub fn place(&mut self, spec: &BoxSpec, x: Q, y: Q) {
        self.boxes.insert(
            spec.id.clone(),
            Placed { width: spec.width, height: spec.height, x, y },
        );
    }

    pub fn insert(&mut self, id: BoxId, placed: Placed) {
        self.boxes.insert(id, placed);
    }

    pub fn get(&self, id: &BoxId) -> Option<&Placed> {
        self.boxes.get(id)
    }

    pub fn contains(&self, id: &BoxId) -> bool {
        self.boxes.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BoxId, &Placed)> {
        self.boxes.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = &BoxId> {
        self.boxes.keys()
    }

    pub fn bounding_box(&self) -> Option<Rect> {
        let mut it = self.boxes.values();
        let first = it.next()?;
        let mut r = Rect { x0: first.x, y0: first.y, x1: first.right(), y1: first.top() };
        for p in it {
            r.x0 = r.x0.min(p.x);
            r.y0 = r.y0.min(p.y);
            r.x1 = r.x1.max(p.right());
            r.y1 = r.y1.max(p.top());
        }
        Some(r)
    }

    /// Rigid translation of every box.
    pub fn translate(&mut self, dx: Q, dy: Q) {
        for p in self.boxes.values_mut() {
            p.x += dx;
            p.y += dy;
        }
    }

    pub fn translated(&self, dx: Q, dy: Q) -> Layout {
        let mut l = self.clone();
        l.translate(dx, dy);
        l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// Side by side: the shared segment is vertical.
    #[serde(rename = "h")]
    Horizontal,
    /// One above the other: the shared segment is horizontal.
    #[serde(rename = "v")]
    Vertical,
}

/// Shared boundary of two touching boxes. For a horizontal contact the
/// segment is `x = fixed, y ∈ [lo, hi]`; for a vertical one it is
/// `y = fixed, x ∈ [lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contact {
    pub a: BoxId,
    pub b: BoxId,
    pub orientation: Orientation,
    pub fixed: Q,
    pub lo: Q,
    pub hi: Q,
}

impl Contact {
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn length(&self) -> Q {
        self.hi - self.lo
    }

    pub fn pair(&self) -> (BoxId, BoxId) {
        (self.a.clone(), self.b.clone())
    }
}

fn interiors_overlap(p: &Placed, r: &Placed) -> bool {
    p.x < r.right() && r.x < p.right() && p.y < r.top() && r.y < p.top()
}

/// Classifies the closed intersection of two interior-disjoint boxes.
/// `a` and `b` must already be in id order.
fn classify(a: &BoxId, p: &Placed, b: &BoxId, r: &Placed) -> Option<Contact> {
    let xlo = p.x.max(r.x);
    let xhi = p.right().min(r.right());
    let ylo = p.y.max(r.y);
    let yhi = p.top().min(r.top());
    if xlo > xhi || ylo > yhi {
        return None;
    }
    let (orientation, fixed, lo, hi) = if xlo < xhi {
        (Orientation::Vertical, ylo, xlo, xhi)
    } else if ylo < yhi {
        (Orientation::Horizontal, xlo, ylo, yhi)
    } else {
        // Single point. Horizontal iff it is the south-west corner of one box
        // and the north-east corner of the other.
        let sw_p = p.x == xlo && p.y == ylo;
        let ne_p = p.right() == xlo && p.top() == ylo;
        let sw_r = r.x == xlo && r.y == ylo;
        let ne_r = r.right() == xlo && r.top() == ylo;
        if (sw_p && ne_r) || (sw_r && ne_p) {
            (Orientation::Horizontal, xlo, ylo, ylo)
        } else {
            (Orientation::Vertical, ylo, xlo, xlo)
        }
    };
    Some(Contact { a: a.clone(), b: b.clone(), orientation, fixed, lo, hi })
}

/// Fails with the first (in id order) pair of boxes whose interiors intersect.
pub fn validate_no_overlap(layout: &Layout) -> Result<(), GeometryError> {
    scan_pairs(layout, |_, _, _, _| {})
}

/// Visits every pair whose closed rectangles intersect, reporting overlap as
/// an error. Pairs are visited in an x-sorted sweep; callers sort as needed.
fn scan_pairs(
    layout: &Layout,
    mut visit: impl FnMut(&BoxId, &Placed, &BoxId, &Placed),
) -> Result<(), GeometryError> {
    let mut order: Vec<(&BoxId, &Placed)> = layout.iter().collect();
    order.sort_by(|l, r| l.1.x.cmp(&r.1.x).then_with(|| l.0.cmp(r.0)));
    let mut overlap: Option<(BoxId, BoxId)> = None;
    for i in 0..order.len() {
        let (ia, pa) = order[i];
        let right = pa.right();
        for &(ib, pb) in &order[i + 1..] {
            if pb.x > right {
                break;
            }
            if interiors_overlap(pa, pb) {
                let pair = ordered_pair(ia, ib);
                if overlap.as_ref().is_none_or(|o| pair < *o) {
                    overlap = Some(pair);
                }
                continue;
            }
            visit(ia, pa, ib, pb);
        }
    }
    match overlap {
        Some((a, b)) => Err(GeometryError::Overlap(a, b)),
        None => Ok(()),
    }
}

/// All touching pairs, sorted lexicographically by id pair.
pub fn detect_contacts(layout: &Layout) -> Result<Vec<Contact>, GeometryError> {
    let mut out = Vec::new();
    scan_pairs(layout, |ia, pa, ib, pb| {
        let c = if ia <= ib { classify(ia, pa, ib, pb) } else { classify(ib, pb, ia, pa) };
        if let Some(c) = c {
            out.push(c);
        }
    })?;
    out.sort_by(|l, r| (&l.a, &l.b).cmp(&(&r.a, &r.b)));
    Ok(out)
}

/// Sum of profits of graph edges whose endpoints touch.
pub fn realized_profit(layout: &Layout, graph: &ProfitGraph) -> Result<Q, GeometryError> {
    let contacts = detect_contacts(layout)?;
    Ok(contacts
        .iter()
        .filter_map(|c| graph.profit(&c.a, &c.b))
        .fold(Q::zero(), |acc, p| acc + p))
}

/// Whether every edge of `graph` is a contact of `layout`.
pub fn realizes(layout: &Layout, graph: &ProfitGraph) -> Result<bool, GeometryError> {
    if let Some(v) = graph.vertices().find(|v| !layout.contains(v)) {
        return Err(GeometryError::MissingBox(v.clone()));
    }
    let touching: BTreeSet<(BoxId, BoxId)> =
        detect_contacts(layout)?.into_iter().map(|c| (c.a, c.b)).collect();
    Ok(graph.edges().all(|(a, b, _)| touching.contains(&(a.clone(), b.clone()))))
}

pub const DEFAULT_GAP: i128 = 1;

/// Places component layouts in a left-to-right row, bottoms aligned at
/// `y = 0`, with `gap` between consecutive bounding boxes.
pub fn pack_components_with_gap(layouts: &[Layout], gap: Q) -> Result<Layout, GeometryError> {
    let mut out = Layout::new();
    let mut cursor = Q::zero();
    for l in layouts {
        let Some(bb) = l.bounding_box() else { continue };
        let dx = cursor - bb.x0;
        let dy = -bb.y0;
        for (id, p) in l.iter() {
            if out.contains(id) {
                return Err(GeometryError::DuplicateId(id.clone()));
            }
            out.insert(
                id.clone(),
                Placed { width: p.width, height: p.height, x: p.x + dx, y: p.y + dy },
            );
        }
        cursor += bb.width() + gap;
    }
    Ok(out)
}

pub fn pack_components(layouts: &[Layout]) -> Result<Layout, GeometryError> {
    pack_components_with_gap(layouts, q(DEFAULT_GAP))
}

/// Layout with each box isolated in its own component.
pub fn singletons<'a>(boxes: impl IntoIterator<Item = &'a BoxSpec>) -> Vec<Layout> {
    boxes
        .into_iter()
        .map(|b| {
            let mut l = Layout::new();
            l.place(b, Q::zero(), Q::zero());
            l
        })
        .collect()
}
