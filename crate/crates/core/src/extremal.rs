//! Many-contact placements and hardness gadgets.
//!
//! [`place_extremal`] puts four boxes around a common corner point (six
//! contacts) and then grows two channels to the right along the horizontal
//! line through that point: boxes sitting on the line and boxes hanging
//! from it. Each new box goes to the channel that ends further left, so it
//! touches its channel predecessor and the box across the line: exactly two
//! new contacts. When both channels end at the same x the new box straddles
//! the line instead and the line moves up to its top edge.

use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use crate::geometry::{BoxId, BoxSpec, Layout};
use crate::graph::ProfitGraph;
use crate::rational::{q, qf, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtremalError {
    #[error("need at least 2 boxes, got {0}")]
    TooFewBoxes(usize),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

/// Growing end of one channel.
struct Channel {
    end: Q,
    last: BoxId,
}

/// Four boxes meeting at the origin (NW, SW, NE, SE), the first `k` of them.
fn corner_start(b: &[&BoxSpec], layout: &mut Layout) {
    let spots = [
        |s: &BoxSpec| (-s.width, Q::zero()),
        |s: &BoxSpec| (-s.width, -s.height),
        |_: &BoxSpec| (Q::zero(), Q::zero()),
        |s: &BoxSpec| (Q::zero(), -s.height),
    ];
    for (s, spot) in b.iter().zip(spots) {
        let (x, y) = spot(s);
        layout.place(s, x, y);
    }
}

/// Places `boxes` realizing exactly `2n - 2` contacts for `n >= 4` and
/// `2n - 3` for `n` in `{2, 3}`.
pub fn place_extremal(boxes: &[BoxSpec]) -> Result<Layout, ExtremalError> {
    let n = boxes.len();
    if n < 2 {
        return Err(ExtremalError::TooFewBoxes(n));
    }
    let mut layout = Layout::new();
    if n < 5 {
        let refs: Vec<&BoxSpec> = boxes.iter().collect();
        corner_start(&refs, &mut layout);
        return Ok(layout);
    }
    // Two tallest of the first five go left, two widest of the rest right.
    let mut first: Vec<&BoxSpec> = boxes[..5].iter().collect();
    first.sort_by_key(|b| std::cmp::Reverse(b.height));
    let (tall, rest) = first.split_at(2);
    let mut rest = rest.to_vec();
    rest.sort_by_key(|b| std::cmp::Reverse(b.width));
    let start = [tall[0], tall[1], rest[0], rest[1]];
    corner_start(&start, &mut layout);

    let mut line = Q::zero();
    let mut top = Channel { end: start[2].width, last: start[2].id.clone() };
    let mut bottom = Channel { end: start[3].width, last: start[3].id.clone() };
    for b in std::iter::once(rest[2]).chain(boxes[5..].iter()) {
        if top.end < bottom.end {
            layout.place(b, top.end, line);
            top = Channel { end: top.end + b.width, last: b.id.clone() };
        } else if bottom.end < top.end {
            layout.place(b, bottom.end, line - b.height);
            bottom = Channel { end: bottom.end + b.width, last: b.id.clone() };
        } else {
            let above = layout.get(&top.last).expect("placed").top() - line;
            let rise = above.min(b.height) / q(2);
            layout.place(b, bottom.end, line + rise - b.height);
            line += rise;
            bottom = Channel { end: bottom.end + b.width, last: b.id.clone() };
        }
    }
    Ok(layout)
}

/// Squares of side `2^1 .. 2^n`.
pub fn gen_power_squares(n: u32) -> Vec<BoxSpec> {
    (1..=n).map(|i| BoxSpec::new(format!("sq{i}"), q(1 << i), q(1 << i))).collect()
}

/// Boxes, a 0/1-profit supporting graph and, for yes-instances, a layout
/// realizing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetInstance {
    pub boxes: Vec<BoxSpec>,
    pub graph: ProfitGraph,
    pub witness: Option<Layout>,
}

fn star_gadget_graph(center: &BoxId, leaves: &[BoxSpec]) -> ProfitGraph {
    let mut g = ProfitGraph::new();
    for l in leaves {
        g.add_edge(center.clone(), l.id.clone(), q(1)).expect("distinct ids");
    }
    g
}

/// Indices of one half of a balanced partition, if any (subset-sum table).
pub fn find_partition(values: &[i128]) -> Option<Vec<usize>> {
    let total: i128 = values.iter().sum();
    if total % 2 != 0 || values.iter().any(|&v| v <= 0) {
        return None;
    }
    let half = usize::try_from(total / 2).ok()?;
    // reach[i][s]: some subset of the first i values sums to s.
    let mut reach = vec![vec![false; half + 1]; values.len() + 1];
    reach[0][0] = true;
    for (i, &v) in values.iter().enumerate() {
        let v = v as usize;
        for s in 0..=half {
            reach[i + 1][s] = reach[i][s] || (s >= v && reach[i][s - v]);
        }
    }
    if !reach[values.len()][half] {
        return None;
    }
    let mut picked = Vec::new();
    let mut s = half;
    for i in (0..values.len()).rev() {
        if !reach[i][s] {
            picked.push(i);
            s -= values[i] as usize;
        }
    }
    picked.reverse();
    Some(picked)
}

/// Star gadget for PARTITION: a `(B/2, delta)` center, four `(B, B)`
/// squares and one `(a_i, a_i)` square per value, where `B` is the sum and
/// `delta = min a_i / 2`. With `top` (indices of a half summing to `B/2`)
/// the witness puts that half on top of the center and the rest below.
pub fn gen_partition_star_instance(values: &[i128], top: Option<&[usize]>) -> Result<GadgetInstance, ExtremalError> {
    if values.is_empty() || values.iter().any(|&v| v <= 0) {
        return Err(ExtremalError::InvalidInstance("values must be positive".into()));
    }
    let total: i128 = values.iter().sum();
    let b = q(total);
    let half = b / q(2);
    let delta = qf(*values.iter().min().expect("non-empty"), 2);
    let center = BoxSpec::new("center", half, delta);
    let mut leaves: Vec<BoxSpec> = (0..4).map(|k| BoxSpec::new(format!("big{k}"), b, b)).collect();
    leaves.extend(values.iter().enumerate().map(|(i, &v)| BoxSpec::new(format!("a{i}"), q(v), q(v))));
    let graph = star_gadget_graph(&center.id, &leaves);

    let witness = match top {
        None => None,
        Some(top) => {
            let up: BTreeSet<usize> = top.iter().copied().collect();
            if up.len() != top.len() || up.iter().any(|&i| i >= values.len()) {
                return Err(ExtremalError::InvalidPartition("bad indices".into()));
            }
            let up_sum: i128 = up.iter().map(|&i| values[i]).sum();
            if q(up_sum) != half {
                return Err(ExtremalError::InvalidPartition(format!("top part sums to {up_sum}")));
            }
            let mut l = Layout::new();
            l.place(&center, Q::zero(), Q::zero());
            l.place(&leaves[0], -b, delta - b);
            l.place(&leaves[1], half, delta - b);
            l.place(&leaves[2], -b, delta);
            l.place(&leaves[3], half, delta);
            let (mut xt, mut xb) = (Q::zero(), Q::zero());
            for (i, leaf) in leaves[4..].iter().enumerate() {
                if up.contains(&i) {
                    l.place(leaf, xt, delta);
                    xt += leaf.width;
                } else {
                    l.place(leaf, xb, -leaf.height);
                    xb += leaf.width;
                }
            }
            Some(l)
        }
    };
    let mut boxes = vec![center];
    boxes.extend(leaves);
    Ok(GadgetInstance { boxes, graph, witness })
}

/// Tree gadget for 3-PARTITION with `K = (m+1)B + m + 1`: a `(K, 1/2)` box
/// `c` touching the `(s_i, B)` boxes `v_i`, the `(1, B)` separators `u_j`
/// (`j = 0..=m`), five `(K, K)` squares and two `(B/2, B)` boxes `d`; each
/// `u_j` also touches `b_j` of size `(1, B)` and `l_j`, `r_j` of size
/// `(B/2, B)`. `groups` (triples of indices summing to `B`) yields the
/// witness layout.
pub fn gen_3partition_tree_instance(
    s: &[i128],
    m: usize,
    b: i128,
    groups: Option<&[[usize; 3]]>,
) -> Result<GadgetInstance, ExtremalError> {
    if m == 0 || s.len() != 3 * m {
        return Err(ExtremalError::InvalidInstance(format!("need 3m = {} values, got {}", 3 * m, s.len())));
    }
    if s.iter().sum::<i128>() != m as i128 * b {
        return Err(ExtremalError::InvalidInstance("values must sum to m*B".into()));
    }
    if let Some(v) = s.iter().find(|&&v| !(4 * v > b && 2 * v < b)) {
        return Err(ExtremalError::InvalidInstance(format!("value {v} is not strictly between B/4 and B/2")));
    }
    let bq = q(b);
    let hb = bq / q(2);
    let k = q((m as i128 + 1) * b + m as i128 + 1);
    let c = BoxSpec::new("c", k, qf(1, 2));
    let v: Vec<BoxSpec> = s.iter().enumerate().map(|(i, &w)| BoxSpec::new(format!("v{i}"), q(w), bq)).collect();
    let u: Vec<BoxSpec> = (0..=m).map(|j| BoxSpec::new(format!("u{j}"), q(1), bq)).collect();
    let bj: Vec<BoxSpec> = (0..=m).map(|j| BoxSpec::new(format!("b{j}"), q(1), bq)).collect();
    let lj: Vec<BoxSpec> = (0..=m).map(|j| BoxSpec::new(format!("l{j}"), hb, bq)).collect();
    let rj: Vec<BoxSpec> = (0..=m).map(|j| BoxSpec::new(format!("r{j}"), hb, bq)).collect();
    let a: Vec<BoxSpec> = (1..=5).map(|i| BoxSpec::new(format!("a{i}"), k, k)).collect();
    let d: Vec<BoxSpec> = (1..=2).map(|i| BoxSpec::new(format!("d{i}"), hb, bq)).collect();

    let mut graph = ProfitGraph::new();
    for x in v.iter().chain(&u).chain(&a).chain(&d) {
        graph.add_edge(c.id.clone(), x.id.clone(), q(1)).expect("distinct ids");
    }
    for j in 0..=m {
        for x in [&bj[j], &lj[j], &rj[j]] {
            graph.add_edge(u[j].id.clone(), x.id.clone(), q(1)).expect("distinct ids");
        }
    }

    let witness = match groups {
        None => None,
        Some(groups) => {
            let used: BTreeSet<usize> = groups.iter().flatten().copied().collect();
            if groups.len() != m || used.len() != 3 * m || used.iter().any(|&i| i >= s.len()) {
                return Err(ExtremalError::InvalidPartition("groups must use every index once".into()));
            }
            if let Some(g) = groups.iter().find(|g| g.iter().map(|&i| s[i]).sum::<i128>() != b) {
                return Err(ExtremalError::InvalidPartition(format!("group {g:?} does not sum to B")));
            }
            let half = qf(1, 2);
            let mut l = Layout::new();
            l.place(&c, Q::zero(), Q::zero());
            l.place(&a[0], Q::zero(), half);
            l.place(&a[1], -k, half);
            l.place(&a[2], k, half);
            l.place(&a[3], -k, half - k);
            l.place(&a[4], k, half - k);
            let mut x = Q::zero();
            l.place(&d[0], x, -bq);
            x += hb;
            for j in 0..=m {
                l.place(&u[j], x, -bq);
                l.place(&bj[j], x, -bq - bq);
                l.place(&lj[j], x - hb, -bq - bq);
                l.place(&rj[j], x + q(1), -bq - bq);
                x += q(1);
                if let Some(g) = groups.get(j) {
                    for &i in g {
                        l.place(&v[i], x, -bq);
                        x += v[i].width;
                    }
                }
            }
            l.place(&d[1], x, -bq);
            debug_assert_eq!(x + hb, k);
            Some(l)
        }
    };

    let mut boxes = vec![c];
    for group in [&v, &u, &bj, &lj, &rj, &a, &d] {
        boxes.extend(group.iter().cloned());
    }
    Ok(GadgetInstance { boxes, graph, witness })
}
