//! Knapsack FPTAS and a sequential-knapsack solver for the Generalized
//! Assignment Problem (GAP), plus an exhaustive solver for small instances.
//!
//! The sequential solver fills bins one at a time, each with a
//! `(1 - eps)`-approximate knapsack over the items still unassigned. With a
//! `β`-approximate knapsack this is a `β / (β + 1)` approximation for GAP.

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::rational::{common_denominator, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GapError {
    #[error("instance too large for exhaustive search: {items} items, {bins} bins")]
    TooLarge { items: usize, bins: usize },
    #[error("item {0} does not define a size and value for every bin")]
    Malformed(String),
}

pub const EXACT_MAX_ITEMS: usize = 12;
pub const EXACT_MAX_BINS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bin {
    pub id: String,
    pub capacity: Q,
}

/// An item with a size and value per bin, indexed like `GapInstance::bins`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapItem {
    pub id: String,
    pub sizes: Vec<Q>,
    pub values: Vec<Q>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GapInstance {
    pub bins: Vec<Bin>,
    pub items: Vec<GapItem>,
}

impl GapInstance {
    pub fn validate(&self) -> Result<(), GapError> {
        let k = self.bins.len();
        match self.items.iter().find(|it| it.sizes.len() != k || it.values.len() != k) {
            Some(it) => Err(GapError::Malformed(it.id.clone())),
            None => Ok(()),
        }
    }
}

/// `assignment[i]` is the bin index of item `i`, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapAssignment {
    pub assignment: Vec<Option<usize>>,
}

impl GapAssignment {
    pub fn empty(items: usize) -> Self {
        GapAssignment { assignment: vec![None; items] }
    }

    pub fn value(&self, inst: &GapInstance) -> Q {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.map(|b| inst.items[i].values[b]))
            .fold(Q::zero(), |acc, v| acc + v)
    }

    pub fn load(&self, inst: &GapInstance, bin: usize) -> Q {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, b)| **b == Some(bin))
            .fold(Q::zero(), |acc, (i, _)| acc + inst.items[i].sizes[bin])
    }

    pub fn is_feasible(&self, inst: &GapInstance) -> bool {
        self.assignment.len() == inst.items.len()
            && (0..inst.bins.len()).all(|b| self.load(inst, b) <= inst.bins[b].capacity)
    }

    pub fn items_in(&self, bin: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(move |(_, b)| **b == Some(bin))
            .map(|(i, _)| i)
    }
}

/// Value-scaling knapsack FPTAS. Returns indices (ascending) of a feasible
/// subset whose value is at least `(1 - eps)` times the optimum.
///
/// Values are scaled by `K = eps * v_max / n` and floored; the dynamic
/// program runs over total scaled value and keeps the minimum total size,
/// with sizes made integral by clearing denominators. Among subsets with the
/// best scaled value the smallest total size wins; remaining ties keep the
/// earlier items.
///
/// Panics if `eps` is not in `(0, 1)`.
pub fn knapsack_fptas(items: &[(Q, Q)], capacity: Q, eps: Q) -> Vec<usize> {
    assert!(eps > Q::zero() && eps < Q::from_integer(1), "eps must lie in (0, 1)");
    let cand: Vec<usize> = (0..items.len())
        .filter(|&i| items[i].0 <= capacity && items[i].1 > Q::zero() && items[i].0 >= Q::zero())
        .collect();
    if cand.is_empty() {
        return Vec::new();
    }
    let n = cand.len() as i128;
    let vmax = cand.iter().map(|&i| items[i].1).max().expect("non-empty");
    let k = eps * vmax / Q::from_integer(n);
    let scaled: Vec<usize> = cand
        .iter()
        .map(|&i| (items[i].1 / k).floor().to_integer().to_usize().expect("scaled value fits"))
        .collect();

    let denom = common_denominator(cand.iter().map(|&i| &items[i].0).chain(std::iter::once(&capacity)));
    let dq = Q::from_integer(denom);
    let sizes: Vec<i128> = cand.iter().map(|&i| (items[i].0 * dq).to_integer()).collect();
    let cap = (capacity * dq).to_integer();

    let total: usize = scaled.iter().sum();
    const UNREACHABLE: i128 = i128::MAX;
    // best[v] = minimum integral size reaching scaled value v with a prefix of
    // the items; take[j][v] records whether item j was used to reach it.
    let mut best = vec![UNREACHABLE; total + 1];
    best[0] = 0;
    let mut take = vec![vec![false; total + 1]; cand.len()];
    let mut reach = 0usize;
    for j in 0..cand.len() {
        let sv = scaled[j];
        let sz = sizes[j];
        for v in (sv..=reach + sv).rev() {
            let prev = best[v - sv];
            if prev == UNREACHABLE {
                continue;
            }
            let with = prev + sz;
            // Strict improvement only, so earlier items are kept on equal size.
            if with <= cap && with < best[v] {
                best[v] = with;
                take[j][v] = true;
            }
        }
        reach += sv;
    }
    let Some(target) = (0..=total).rev().find(|&v| best[v] != UNREACHABLE) else {
        return Vec::new();
    };
    let mut chosen = Vec::new();
    let mut v = target;
    for j in (0..cand.len()).rev() {
        if take[j][v] {
            chosen.push(cand[j]);
            v -= scaled[j];
        }
    }
    chosen.reverse();
    debug_assert!(chosen.iter().map(|&i| items[i].0).fold(Q::zero(), |a, s| a + s) <= capacity);
    chosen
}

/// Sequential GAP: bins in input order, each filled by [`knapsack_fptas`].
///
/// Bin `j` is offered every item with its residual value: its value in `j`
/// minus the value it currently earns elsewhere (zero when unassigned). Items
/// picked for `j` move there. When an item has the same value in every bin
/// the residual of an assigned item is zero, so assigned items stay put and
/// each bin simply packs the still-unassigned items.
pub fn gap_sequential(inst: &GapInstance, eps: Q) -> GapAssignment {
    let mut out = GapAssignment::empty(inst.items.len());
    for (b, bin) in inst.bins.iter().enumerate() {
        let offered: Vec<(usize, Q)> = (0..inst.items.len())
            .filter_map(|i| {
                let current = out.assignment[i].map_or_else(Q::zero, |c| inst.items[i].values[c]);
                let residual = inst.items[i].values[b] - current;
                (residual > Q::zero()).then_some((i, residual))
            })
            .collect();
        let view: Vec<(Q, Q)> = offered.iter().map(|&(i, r)| (inst.items[i].sizes[b], r)).collect();
        for pick in knapsack_fptas(&view, bin.capacity, eps) {
            out.assignment[offered[pick].0] = Some(b);
        }
    }
    out
}

/// Optimal assignment by exhaustive search over item → bin-or-none maps,
/// pruning only capacity-infeasible branches and branches that cannot beat
/// the incumbent.
pub fn gap_exact(inst: &GapInstance) -> Result<GapAssignment, GapError> {
    inst.validate()?;
    if inst.items.len() > EXACT_MAX_ITEMS || inst.bins.len() > EXACT_MAX_BINS {
        return Err(GapError::TooLarge { items: inst.items.len(), bins: inst.bins.len() });
    }
    let best_possible: Vec<Q> = inst
        .items
        .iter()
        .map(|it| it.values.iter().copied().max().unwrap_or_else(Q::zero))
        .collect();
    let mut suffix = vec![Q::zero(); inst.items.len() + 1];
    for i in (0..inst.items.len()).rev() {
        suffix[i] = suffix[i + 1] + best_possible[i];
    }
    let mut search = ExactSearch {
        inst,
        suffix,
        loads: inst.bins.iter().map(|_| Q::zero()).collect(),
        current: vec![None; inst.items.len()],
        best: vec![None; inst.items.len()],
        best_value: Q::zero(),
    };
    search.go(0, Q::zero());
    Ok(GapAssignment { assignment: search.best })
}

struct ExactSearch<'a> {
    inst: &'a GapInstance,
    suffix: Vec<Q>,
    loads: Vec<Q>,
    current: Vec<Option<usize>>,
    best: Vec<Option<usize>>,
    best_value: Q,
}

impl ExactSearch<'_> {
    fn go(&mut self, i: usize, value: Q) {
        if value > self.best_value {
            self.best_value = value;
            self.best = self.current.clone();
        }
        if i == self.inst.items.len() || value + self.suffix[i] <= self.best_value {
            return;
        }
        let item = &self.inst.items[i];
        for b in 0..self.inst.bins.len() {
            let load = self.loads[b] + item.sizes[b];
            if load <= self.inst.bins[b].capacity {
                let saved = self.loads[b];
                self.loads[b] = load;
                self.current[i] = Some(b);
                self.go(i + 1, value + item.values[b]);
                self.current[i] = None;
                self.loads[b] = saved;
            }
        }
        self.go(i + 1, value);
    }
}

/// Exact 0/1 knapsack optimum by enumerating all subsets (≤ 20 items).
pub fn knapsack_bruteforce(items: &[(Q, Q)], capacity: Q) -> Q {
    assert!(items.len() <= 20);
    let mut best = Q::zero();
    for mask in 0u32..(1 << items.len()) {
        let (mut s, mut v) = (Q::zero(), Q::zero());
        for (i, it) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s += it.0;
                v += it.1;
            }
        }
        if s <= capacity && v > best {
            best = v;
        }
    }
    best
}
