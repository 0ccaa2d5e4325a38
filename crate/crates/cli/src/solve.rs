//! Algorithm dispatch shared by `layout` and `bench`.

use clap::ValueEnum;
use crown::cycle::max_crown_cycles;
use crown::pipeline::random_baseline;
use crown::star::{max_crown_stars, maximal_planar_subgraph};
use crown::{BoxSpec, Layout, ProfitGraph, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Algo {
    Random,
    StarForest,
    CycleCover,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Random, Algo::StarForest, Algo::CycleCover];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Random => "random",
            Algo::StarForest => "star-forest",
            Algo::CycleCover => "cycle-cover",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Algo::Random => "Random",
            Algo::StarForest => "Star Forest",
            Algo::CycleCover => "Cycle Cover",
        }
    }
}

/// Runs `algo`. Star forests need a planar graph, so non-planar inputs are
/// first cut down to a maximal planar subgraph; profit is still measured
/// against the full graph by the caller.
pub fn run(algo: Algo, graph: &ProfitGraph, boxes: &[BoxSpec], eps: Q, seed: u64) -> Result<Layout, String> {
    match algo {
        Algo::Random => Ok(random_baseline(boxes, seed)),
        Algo::CycleCover => max_crown_cycles(graph, boxes).map_err(|e| e.to_string()),
        Algo::StarForest => {
            let planar;
            let g = if graph.is_planar() {
                graph
            } else {
                planar = maximal_planar_subgraph(graph);
                &planar
            };
            max_crown_stars(g, boxes, eps).map_err(|e| e.to_string())
        }
    }
}
