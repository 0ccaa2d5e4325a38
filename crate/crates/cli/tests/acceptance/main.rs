//! End-to-end acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p crown-cli --test acceptance`. The process exits
//! non-zero if any criterion fails or runs past its time budget.


use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crown::cycle::{layout_cycle, max_crown_cycles};
use crown::extremal::{gen_3partition_tree_instance, gen_partition_star_instance, gen_power_squares, place_extremal};
use crown::geometry::{detect_contacts, realized_profit, realizes, validate_no_overlap};
use crown::hier::{solve_hier, EmbeddedDag};
use crown::io::{LayoutDoc, TriangulationDoc};
use crown::pipeline::{build_instance, parse_stopwords, random_baseline, FontParams, Similarity};
use crown::rational::{q, qf, to_f64};
use crown::star::{max_crown_stars, maximal_planar_subgraph, solve_star, StarInstance};
use crown::triangulation::{framed_instance, realize_triangulation, TriangulationInstance};
use crown::{BoxId, BoxSpec, Layout, Orientation, ProfitGraph, Q};

use oracles::R;

const EPS: (i128, i128) = (1, 10);

fn eps() -> Q {
    qf(EPS.0, EPS.1)
}

/// GAP guarantee of the sequential knapsack scheme, `(1 - eps) / (2 - eps)`.
fn alpha() -> Q {
    (q(1) - eps()) / (q(2) - eps())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_q(rng: &mut impl Rng, max_num: i128, max_den: i128) -> Q {
    qf(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den))
}

fn id(prefix: &str, i: usize) -> BoxId {
    BoxId(format!("{prefix}{i}"))
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

type Outcome = Result<String, String>;

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

// ------------------------------------------------------------------ 1

fn random_bounded_graph(rng: &mut impl Rng) -> (ProfitGraph, Vec<BoxSpec>) {
    let n = rng.gen_range(3..=50);
    let cap = rng.gen_range(2..=8);
    let boxes: Vec<BoxSpec> = (0..n).map(|i| BoxSpec::new(id("v", i), rand_q(rng, 40, 4), rand_q(rng, 40, 4))).collect();
    let mut g = ProfitGraph::new();
    for b in &boxes {
        g.add_vertex(b.id.clone());
    }
    for _ in 0..rng.gen_range(n..=n * cap / 2 + n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (a, b) = (&boxes[a].id, &boxes[b].id);
        if a == b || g.has_edge(a, b) || g.degree(a) >= cap || g.degree(b) >= cap {
            continue;
        }
        g.add_edge(a.clone(), b.clone(), rand_q(rng, 20, 6)).unwrap();
    }
    (g, boxes)
}

fn cycle_cover_bound() -> Outcome {
    let mut rng = rng(1);
    let mut tight = f64::INFINITY;
    for trial in 0..200 {
        let (g, boxes) = random_bounded_graph(&mut rng);
        let l = max_crown_cycles(&g, &boxes).map_err(|e| format!("graph {trial}: {e}"))?;
        validate_no_overlap(&l).map_err(|e| format!("graph {trial}: {e}"))?;
        let got = realized_profit(&l, &g).unwrap();
        let k = g.max_degree().div_ceil(2).max(1) as i128;
        let total = g.total_profit();
        ensure!(got * q(k) >= total, "graph {trial}: realized {got} < {total}/{k}");
        if total > q(0) {
            tight = tight.min(to_f64(&(got * q(k) / total)));
        }
    }
    Ok(format!("200 graphs, min realized*ceil(D/2)/total = {tight:.3}"))
}

// ------------------------------------------------------------------ 2

fn cycle_layouts() -> Outcome {
    let mut rng = rng(2);
    for trial in 0..10_000 {
        let n = rng.gen_range(3..=50);
        let boxes: Vec<BoxSpec> = (0..n).map(|i| BoxSpec::new(id("c", i), rand_q(&mut rng, 30, 3), rand_q(&mut rng, 30, 3))).collect();
        let mut g = ProfitGraph::new();
        for i in 0..n {
            g.add_edge(boxes[i].id.clone(), boxes[(i + 1) % n].id.clone(), q(1)).unwrap();
        }
        let l = layout_cycle(&boxes).map_err(|e| format!("cycle {trial}: {e}"))?;
        validate_no_overlap(&l).map_err(|e| format!("cycle {trial}: {e}"))?;
        ensure!(realized_profit(&l, &g).unwrap() == q(n as i128), "cycle {trial} (n = {n}) misses an edge");
    }
    Ok("10000 cycles fully realized".into())
}

// ------------------------------------------------------------------ 3

fn star_approximation() -> Outcome {
    let mut rng = rng(3);
    let (mut worst, mut sum, mut good, mut counted) = (f64::INFINITY, 0.0, 0, 0);
    for trial in 0..100 {
        let center = BoxSpec::new("center", q(rng.gen_range(1..=6)), q(rng.gen_range(1..=6)));
        let leaves: Vec<BoxSpec> = (0..rng.gen_range(5..=9))
            .map(|i| BoxSpec::new(id("leaf", i), q(rng.gen_range(1..=6)), q(rng.gen_range(1..=6))))
            .collect();
        let profits: BTreeMap<BoxId, Q> = leaves.iter().map(|b| (b.id.clone(), rand_q(&mut rng, 12, 4))).collect();
        let mut g = ProfitGraph::new();
        for b in &leaves {
            g.add_edge(center.id.clone(), b.id.clone(), profits[&b.id]).unwrap();
        }
        let triples: Vec<(Q, Q, Q)> = leaves.iter().map(|b| (b.width, b.height, profits[&b.id])).collect();
        let opt = oracles::star_optimum((center.width, center.height), &triples);
        let witness = oracles::star_layout(&center, &leaves, &opt.slots);
        validate_no_overlap(&witness).map_err(|e| format!("star {trial}: oracle layout {e}"))?;
        ensure!(realized_profit(&witness, &g).unwrap() == opt.value, "star {trial}: oracle layout misses its value");

        let inst = StarInstance { center: center.clone(), leaves, profits };
        let l = solve_star(&inst, eps()).map_err(|e| format!("star {trial}: {e}"))?;
        validate_no_overlap(&l).map_err(|e| format!("star {trial}: {e}"))?;
        let got = realized_profit(&l, &g).unwrap();
        ensure!(got >= alpha() * opt.value, "star {trial}: {got} < alpha * {}", opt.value);
        ensure!(got <= opt.value, "star {trial}: {got} beats the optimum {}", opt.value);
        let ratio = to_f64(&(got / opt.value));
        worst = worst.min(ratio);
        sum += ratio;
        counted += 1;
        good += usize::from(ratio >= 0.9);
    }
    Ok(format!(
        "ratio to optimum min {worst:.3}, mean {:.3}, >= 0.9 on {good}/{counted}",
        sum / counted as f64
    ))
}

// ------------------------------------------------------------------ 4

fn random_tree(rng: &mut impl Rng, n: usize, max_side: i128) -> (Vec<BoxSpec>, Vec<(BoxId, BoxId, Q)>) {
    let boxes: Vec<BoxSpec> =
        (0..n).map(|i| BoxSpec::new(id("t", i), q(rng.gen_range(1..=max_side)), q(rng.gen_range(1..=max_side)))).collect();
    let edges = (1..n).map(|i| (boxes[rng.gen_range(0..i)].id.clone(), boxes[i].id.clone(), rand_q(rng, 10, 3))).collect();
    (boxes, edges)
}

fn tree_approximation() -> Outcome {
    let mut rng = rng(4);
    let (mut worst, mut exact) = (f64::INFINITY, 0);
    for trial in 0..50 {
        let n = rng.gen_range(2..=6);
        let (boxes, edges) = random_tree(&mut rng, n, 3);
        let mut g = ProfitGraph::new();
        for (a, b, p) in &edges {
            g.add_edge(a.clone(), b.clone(), *p).unwrap();
        }
        let opt = oracles::tree_optimum(&boxes, &edges);
        let l = max_crown_stars(&g, &boxes, eps()).map_err(|e| format!("tree {trial}: {e}"))?;
        validate_no_overlap(&l).map_err(|e| format!("tree {trial}: {e}"))?;
        let got = realized_profit(&l, &g).unwrap();
        ensure!(got * q(2) >= alpha() * opt, "tree {trial}: {got} < alpha/2 * {opt}");
        ensure!(got <= opt, "tree {trial}: {got} beats the optimum {opt}");
        worst = worst.min(to_f64(&(got / opt)));
        exact += usize::from(got == opt);
    }
    Ok(format!("min ratio to optimum {worst:.3}, optimal on {exact}/50"))
}

// ------------------------------------------------------------------ 5

/// Random hierarchy grown downward from the sink on the integer grid, so
/// that it is realizable as generated; half the time the dimensions are
/// then redrawn, which may make it infeasible.
fn random_hierarchy(rng: &mut impl Rng) -> (EmbeddedDag, Vec<BoxSpec>) {
    let n = rng.gen_range(3..=5);
    let mut rects: Vec<R> = vec![R { x: 0, y: -rng.gen_range(1..=3), w: rng.gen_range(2..=3), h: 0 }];
    rects[0].h = -rects[0].y;
    while rects.len() < n {
        // Mostly unit heights, so siblings share a bottom edge and a new box
        // can hang below two of them.
        let (w, h) = (rng.gen_range(1..=3), if rng.gen_bool(0.6) { 1 } else { rng.gen_range(2..=3) });
        let line = rects[rng.gen_range(0..rects.len())].y;
        let row: Vec<&R> = rects.iter().filter(|o| o.y == line).collect();
        let lo = row.iter().map(|o| o.x).min().unwrap() - w + 1;
        let hi = row.iter().map(|o| o.x + o.w).max().unwrap() - 1;
        let r = R { x: rng.gen_range(lo..=hi), y: line - h, w, h };
        let parents = row.iter().filter(|o| (o.x + o.w).min(r.x + r.w) - o.x.max(r.x) >= 1).count();
        let wanted = if row.len() > 1 && rng.gen_bool(0.7) { 2 } else { 1 };
        if parents >= wanted && rects.iter().all(|o| !o.overlaps(&r)) {
            rects.push(r);
        }
    }
    let ids: Vec<BoxId> = (0..n).map(|i| id("h", i)).collect();
    let mut edges = Vec::new();
    let mut up: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut down: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, a) in rects.iter().enumerate() {
        for (j, b) in rects.iter().enumerate() {
            let overlap = (a.x + a.w).min(b.x + b.w) - a.x.max(b.x);
            if a.y + a.h == b.y && overlap > 0 {
                edges.push((ids[i].clone(), ids[j].clone()));
                up.entry(i).or_default().push(j);
                down.entry(j).or_default().push(i);
            }
        }
    }
    let rotation = (0..n)
        .map(|v| {
            let mut parents = up.remove(&v).unwrap_or_default();
            let mut children = down.remove(&v).unwrap_or_default();
            parents.sort_by_key(|&u| std::cmp::Reverse(rects[u].x));
            children.sort_by_key(|&u| rects[u].x);
            (ids[v].clone(), parents.into_iter().chain(children).map(|u| ids[u].clone()).collect())
        })
        .collect();
    let resample = rng.gen_bool(0.5);
    let boxes = rects
        .iter()
        .zip(&ids)
        .map(|(r, v)| {
            let (w, h) = if resample { (rng.gen_range(1..=3), rng.gen_range(1..=3)) } else { (r.w, r.h) };
            BoxSpec::new(v.clone(), q(w as i128), q(h as i128))
        })
        .collect();
    (EmbeddedDag { vertices: ids, edges, rotation }, boxes)
}

fn hier_exactness() -> Outcome {
    let mut rng = rng(5);
    let mut feasible = 0;
    for trial in 0..100 {
        let (dag, boxes) = random_hierarchy(&mut rng);
        let expected = oracles::hier_feasible(&boxes, &dag.edges, &dag.rotation, 1);
        let got = solve_hier(&dag, &boxes, q(1));
        match (&got, expected) {
            (Ok(l), true) => {
                feasible += 1;
                validate_no_overlap(l).map_err(|e| format!("dag {trial}: {e}"))?;
                for (u, v) in &dag.edges {
                    let (a, b) = (l.get(u).unwrap(), l.get(v).unwrap());
                    let overlap = a.right().min(b.right()) - a.x.max(b.x);
                    ensure!(a.top() == b.y && overlap >= q(1), "dag {trial}: {u} -> {v} is not a contact of length >= 1");
                }
            }
            (Err(_), false) => {}
            (Ok(_), false) => return Err(format!("dag {trial}: solved but the oracle finds no layout: {dag:?} {boxes:?}")),
            (Err(e), true) => return Err(format!("dag {trial}: oracle finds a layout but solver fails at {}: {dag:?} {boxes:?}", e.stage())),
        }
    }
    Ok(format!("verdicts agree on 100 hierarchies ({feasible} feasible)"))
}

// ------------------------------------------------------------------ 6

const OUTER: [&str; 4] = ["N", "E", "S", "W"];

fn outer_ids() -> [BoxId; 4] {
    OUTER.map(BoxId::from)
}

fn wheel() -> TriangulationInstance {
    let b = |v: &str, w, h| BoxSpec::new(v, q(w), q(h));
    let ids = |vs: &[&str]| vs.iter().map(|&v| BoxId::from(v)).collect::<Vec<_>>();
    let edges = [("c", "N"), ("c", "E"), ("c", "S"), ("c", "W"), ("N", "E"), ("E", "S"), ("S", "W"), ("W", "N")];
    TriangulationInstance {
        boxes: vec![b("c", 2, 2), b("N", 4, 1), b("E", 1, 4), b("S", 4, 1), b("W", 1, 4)],
        edges: edges.iter().map(|(a, b)| (BoxId::from(*a), BoxId::from(*b))).collect(),
        rotation: [
            ("c", ids(&["E", "N", "W", "S"])),
            ("N", ids(&["W", "c", "E"])),
            ("E", ids(&["N", "c", "S"])),
            ("S", ids(&["E", "c", "W"])),
            ("W", ids(&["S", "c", "N"])),
        ]
        .into_iter()
        .map(|(v, r)| (BoxId::from(v), r))
        .collect(),
        outer: outer_ids(),
    }
}

/// Random slicing floorplan of `count` boxes tiling a `w x h` rectangle.
fn slicing(rng: &mut impl Rng, count: usize, w: i64, h: i64) -> Vec<R> {
    let mut rects = vec![R { x: 0, y: 0, w, h }];
    let mut tries = 0;
    while rects.len() < count && tries < 100 {
        tries += 1;
        let i = rng.gen_range(0..rects.len());
        let r = rects[i];
        if rng.gen_bool(0.5) && r.w > 1 {
            let cut = rng.gen_range(1..r.w);
            rects[i] = R { w: cut, ..r };
            rects.push(R { x: r.x + cut, w: r.w - cut, ..r });
        } else if r.h > 1 {
            let cut = rng.gen_range(1..r.h);
            rects[i] = R { h: cut, ..r };
            rects.push(R { y: r.y + cut, h: r.h - cut, ..r });
        }
    }
    rects
}

fn triangulation_exactness() -> Outcome {
    let wheel = wheel();
    let l = realize_triangulation(&wheel).map_err(|e| format!("wheel: {e}"))?;
    validate_no_overlap(&l).map_err(|e| format!("wheel: {e}"))?;
    let g = wheel.graph();
    ensure!(g.edge_count() == 8 && realizes(&l, &g).unwrap(), "wheel: not all 8 edges realized");

    let mut rng = rng(6);
    let (mut done, mut feasible) = (0, 0);
    while done < 25 {
        let (count, w, h) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let rects = slicing(&mut rng, count, w, h);
        let mut inner = Layout::new();
        for (i, r) in rects.iter().enumerate() {
            inner.place(&BoxSpec::new(id("r", i), q(r.w as i128), q(r.h as i128)), q(r.x as i128), q(r.y as i128));
        }
        let mut inst = framed_instance(&inner, outer_ids()).map_err(|e| format!("framing: {e}"))?;
        if crown::triangulation::validate_instance(&inst).is_err() {
            continue;
        }
        if rng.gen_bool(0.5) {
            for b in &mut inst.boxes {
                b.width = q(rng.gen_range(1..=4));
                b.height = q(rng.gen_range(1..=4));
            }
        }
        done += 1;
        let expected = oracles::tri_feasible(&inst.boxes, &inst.edges, &inst.outer);
        let got = realize_triangulation(&inst);
        match (&got, expected) {
            (Ok(l), true) => {
                feasible += 1;
                validate_no_overlap(l).map_err(|e| format!("instance {done}: {e}"))?;
                ensure!(realizes(l, &inst.graph()).unwrap(), "instance {done}: output misses an edge");
            }
            (Err(_), false) => {}
            (Ok(_), false) => return Err(format!("instance {done}: realized but the oracle finds no layout: {inst:?}")),
            (Err(e), true) => return Err(format!("instance {done}: oracle finds a layout but realizer fails ({e}): {inst:?}")),
        }
    }
    Ok(format!("wheel realized; verdicts agree on 25 instances ({feasible} feasible)"))
}

// ------------------------------------------------------------------ 7

fn is_forest(n: usize, index: &BTreeMap<&BoxId, usize>, edges: &[(BoxId, BoxId)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    edges.iter().all(|(a, b)| {
        let (ra, rb) = (find(&mut parent, index[a]), find(&mut parent, index[b]));
        parent[ra] = rb;
        ra != rb
    })
}

fn extremal_counts() -> Outcome {
    let mut rng = rng(7);
    for n in 5..=50usize {
        for set in 0..20 {
            let boxes: Vec<BoxSpec> =
                (0..n).map(|i| BoxSpec::new(id("e", i), rand_q(&mut rng, 50, 5), rand_q(&mut rng, 50, 5))).collect();
            let l = place_extremal(&boxes).map_err(|e| format!("n = {n}, set {set}: {e}"))?;
            validate_no_overlap(&l).map_err(|e| format!("n = {n}, set {set}: {e}"))?;
            let found = detect_contacts(&l).unwrap().len();
            ensure!(found == 2 * n - 2, "n = {n}, set {set}: {found} contacts instead of {}", 2 * n - 2);
        }
        let squares = gen_power_squares(n as u32);
        let l = place_extremal(&squares).map_err(|e| format!("squares n = {n}: {e}"))?;
        let contacts = detect_contacts(&l).unwrap();
        ensure!(contacts.len() == 2 * n - 2, "squares n = {n}: {} contacts", contacts.len());
        let index: BTreeMap<&BoxId, usize> = squares.iter().enumerate().map(|(i, b)| (&b.id, i)).collect();
        for o in [Orientation::Horizontal, Orientation::Vertical] {
            let es: Vec<(BoxId, BoxId)> = contacts.iter().filter(|c| c.orientation == o).map(|c| c.pair()).collect();
            ensure!(is_forest(n, &index, &es), "squares n = {n}: {o:?} contacts form a cycle");
        }
    }
    Ok("2n-2 contacts for n in 5..=50 (920 sets), square classes are forests".into())
}

// ------------------------------------------------------------------ 8

fn gadget_witnesses() -> Outcome {
    let mut rng = rng(8);
    for trial in 0..10 {
        let mut halves: [Vec<i128>; 2] = [Vec::new(), Vec::new()];
        for half in &mut halves {
            for _ in 0..rng.gen_range(1..=4) {
                half.push(rng.gen_range(1..=12));
            }
        }
        let diff = halves[0].iter().sum::<i128>() - halves[1].iter().sum::<i128>();
        match diff.signum() {
            1 => halves[1].push(diff),
            -1 => halves[0].push(-diff),
            _ => {}
        }
        let mut tagged: Vec<(i128, bool)> =
            halves[0].iter().map(|&v| (v, true)).chain(halves[1].iter().map(|&v| (v, false))).collect();
        tagged.shuffle(&mut rng);
        let values: Vec<i128> = tagged.iter().map(|t| t.0).collect();
        let top: Vec<usize> = (0..tagged.len()).filter(|&i| tagged[i].1).collect();
        let gadget = gen_partition_star_instance(&values, Some(&top)).map_err(|e| format!("partition {trial}: {e}"))?;
        check_witness(&gadget.witness, &gadget.graph).map_err(|e| format!("partition {trial} {values:?}: {e}"))?;
    }
    for trial in 0..10 {
        let m = rng.gen_range(2..=4);
        let b = rng.gen_range(12..=40);
        let mut values = Vec::new();
        while values.len() < 3 * m {
            let x = rng.gen_range(b / 4 + 1..=(b - 1) / 2);
            let y = rng.gen_range(b / 4 + 1..=(b - 1) / 2);
            let z = b - x - y;
            if 4 * z > b && 2 * z < b {
                values.extend([x, y, z]);
            }
        }
        let mut order: Vec<usize> = (0..3 * m).collect();
        order.shuffle(&mut rng);
        let s: Vec<i128> = order.iter().map(|&i| values[i]).collect();
        let mut at = vec![0; 3 * m];
        for (pos, &i) in order.iter().enumerate() {
            at[i] = pos;
        }
        let groups: Vec<[usize; 3]> = (0..m).map(|j| [at[3 * j], at[3 * j + 1], at[3 * j + 2]]).collect();
        let gadget = gen_3partition_tree_instance(&s, m, b, Some(&groups)).map_err(|e| format!("3-partition {trial}: {e}"))?;
        check_witness(&gadget.witness, &gadget.graph).map_err(|e| format!("3-partition {trial} {s:?}: {e}"))?;
    }
    Ok("10 Partition and 10 3-Partition witnesses realize their graphs".into())
}

fn check_witness(witness: &Option<Layout>, g: &ProfitGraph) -> Result<(), String> {
    let l = witness.as_ref().ok_or("no witness")?;
    validate_no_overlap(l).map_err(|e| e.to_string())?;
    if realizes(l, g).map_err(|e| e.to_string())? {
        Ok(())
    } else {
        Err("witness misses an edge".into())
    }
}

// ------------------------------------------------------------------ 9

fn corpus_ordering() -> Outcome {
    let root = workspace_root();
    let stopwords = parse_stopwords(&fs::read_to_string(root.join("data/stopwords.txt")).map_err(|e| e.to_string())?);
    let mut files: Vec<PathBuf> = fs::read_dir(root.join("data/corpus"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    files.sort();
    ensure!(files.len() >= 10, "only {} documents", files.len());
    let mut pct = [0.0f64; 3];
    for f in &files {
        let text = fs::read_to_string(f).map_err(|e| e.to_string())?;
        let words = text.split_whitespace().count();
        ensure!(words >= 400, "{} has only {words} words", f.display());
        let inst = build_instance(&text, &stopwords, 50, Similarity::Cooccurrence, FontParams::default());
        let g = &inst.graph;
        let total = g.total_profit();
        let planar = maximal_planar_subgraph(g);
        let layouts = [
            random_baseline(&inst.boxes, 0),
            max_crown_stars(&planar, &inst.boxes, eps()).map_err(|e| e.to_string())?,
            max_crown_cycles(g, &inst.boxes).map_err(|e| e.to_string())?,
        ];
        for (slot, l) in pct.iter_mut().zip(&layouts) {
            validate_no_overlap(l).map_err(|e| format!("{}: {e}", f.display()))?;
            *slot += 100.0 * to_f64(&(realized_profit(l, g).unwrap() / total));
        }
    }
    let [random, stars, cycles] = pct.map(|p| p / files.len() as f64);
    let summary = format!("{} documents, k = 50: random {random:.1}%, star forest {stars:.1}%, cycle cover {cycles:.1}%", files.len());
    ensure!(cycles > stars && stars > random && cycles >= 2.0 * random, "ordering fails: {summary}");
    Ok(summary)
}

// ------------------------------------------------------------------ 10

fn hier_doc() -> &'static str {
    r#"{"boxes":[{"id":"top","w":"6","h":"1"},{"id":"left","w":"3","h":"2"},{"id":"right","w":"2","h":"2"},{"id":"low","w":"4","h":"1"}],
"edges":[["left","top"],["right","top"],["low","left"],["low","right"]],
"rotation":{"top":["left","right"],"left":["top","low"],"right":["top","low"],"low":["right","left"]}}"#
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_crown")).args(args).current_dir(dir).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("crown {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))
    }
}

fn cli_round(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let _ = fs::remove_dir_all(dir);
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let doc = workspace_root().join("data/corpus/bridges.txt");
    fs::write(dir.join("dag.json"), hier_doc()).map_err(|e| e.to_string())?;
    let tri = serde_json::to_string_pretty(&TriangulationDoc::from_instance(&wheel())).map_err(|e| e.to_string())?;
    fs::write(dir.join("tri.json"), tri).map_err(|e| e.to_string())?;
    run_cli(dir, &["instance", doc.to_str().unwrap(), "--out", "inst.json"])?;
    for algo in ["random", "star-forest", "cycle-cover"] {
        let (json, svg) = (format!("{algo}.json"), format!("{algo}.svg"));
        run_cli(dir, &["layout", "inst.json", "--algo", algo, "--seed", "7", "--out", &json, "--svg", &svg])?;
    }
    run_cli(dir, &["hier", "dag.json", "--delta", "1/2", "--out", "hier.json", "--svg", "hier.svg"])?;
    run_cli(dir, &["tri", "tri.json", "--out", "tri-out.json", "--svg", "tri.svg"])?;
    let mut files = BTreeMap::new();
    for e in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let p = e.map_err(|e| e.to_string())?.path();
        files.insert(p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).map_err(|e| e.to_string())?);
    }
    Ok(files)
}

fn determinism() -> Outcome {
    let base = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-determinism");
    let first = cli_round(&base.join("a"))?;
    let second = cli_round(&base.join("b"))?;
    ensure!(first.keys().eq(second.keys()), "different output files");
    for (name, bytes) in &first {
        ensure!(*bytes == second[name], "{name} differs between runs");
    }
    let mut layouts = 0;
    for name in ["random.json", "star-forest.json", "cycle-cover.json", "hier.json", "tri-out.json"] {
        let text = String::from_utf8(first[name].clone()).map_err(|e| e.to_string())?;
        let doc = LayoutDoc::from_json(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure!(doc.to_json() == text, "{name} does not round-trip byte for byte");
        layouts += 1;
    }
    Ok(format!("{} output files identical across runs, {layouts} layouts round-trip", first.len()))
}

// ------------------------------------------------------------------ driver

fn main() {
    let criteria: [Criterion; 10] = [
        ("cycle-cover bound", 10, cycle_cover_bound),
        ("cycle layout correctness", 30, cycle_layouts),
        ("star approximation", 60, star_approximation),
        ("tree approximation", 300, tree_approximation),
        ("hierarchy exactness", 120, hier_exactness),
        ("triangulation realizer", 120, triangulation_exactness),
        ("extremal contact counts", 10, extremal_counts),
        ("hardness gadget witnesses", 5, gadget_witnesses),
        ("corpus ordering", 120, corpus_ordering),
        ("determinism", 120, determinism),
    ];
    let only: BTreeSet<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > Duration::from_secs(budget) => Err(format!("{msg}; over the {budget} s budget")),
            o => o,
        };
        let (tag, msg) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        failed += usize::from(outcome.is_err());
        println!("[{tag}] {n:>2} {name}: {msg} ({:.2} s of {budget} s)", took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
