mod bench;
mod solve;
mod svg;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use crown::hier::{default_delta, solve_hier, HierError};
use crown::io::{DagDoc, InstanceDoc, LayoutDoc, TriangulationDoc};
use crown::pipeline::{build_instance, parse_stopwords, FontParams, Similarity};
use crown::rational::{format_q, parse_q};
use crown::triangulation::{realize_triangulation, TriError};
use crown::{BoxId, Layout, ProfitGraph, Q};
use serde_json::{json, Value};

use crate::bench::{bench_corpus, corpus_files, BenchConfig};
use crate::solve::Algo;

const BUNDLED_STOPWORDS: &str = include_str!("../../../data/stopwords.txt");

#[derive(Parser)]
#[command(name = "crown", version, about = "Contact layouts of fixed-size rectangles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lay out a MAX-CROWN instance with one of the approximation algorithms.
    Layout {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "cycle-cover")]
        algo: Algo,
        /// Knapsack accuracy for the star solver.
        #[arg(long, default_value = "1/10", value_parser = parse_q)]
        eps: Q,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the layout JSON here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Solve a hierarchical instance (embedded single-sink DAG) exactly.
    Hier {
        dag: PathBuf,
        /// Minimum horizontal overlap of each edge. Defaults to a thousandth
        /// of the narrowest box.
        #[arg(long, value_parser = parse_q)]
        delta: Option<Q>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Realize an irreducible triangulation as a rectangular dual.
    Tri {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Turn a text document into a word-cloud instance.
    Instance {
        text: PathBuf,
        #[arg(long, default_value_t = 50)]
        k: usize,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        /// Use rank-r latent semantic similarity instead of co-occurrence.
        #[arg(long)]
        lsa: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the algorithms on a directory of `.txt` documents.
    Bench {
        corpus: PathBuf,
        #[arg(long, default_value_t = 50)]
        k: usize,
        /// Algorithms to run (repeatable); all by default.
        #[arg(long, value_enum)]
        algo: Vec<Algo>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "1/10", value_parser = parse_q)]
        eps: Q,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long)]
        lsa: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// A failed run: exit code plus the JSON report written to stderr.
struct Failure {
    code: u8,
    report: Value,
}

impl Failure {
    fn malformed(stage: &str, message: impl ToString) -> Self {
        Failure { code: 2, report: json!({ "error": "malformed", "stage": stage, "message": message.to_string() }) }
    }

    fn infeasible(stage: &str, message: impl ToString, witness: Value) -> Self {
        Failure {
            code: 3,
            report: json!({ "error": "infeasible", "stage": stage, "message": message.to_string(), "witness": witness }),
        }
    }

    fn output(message: impl ToString) -> Self {
        Failure { code: 1, report: json!({ "error": "output", "stage": "write", "message": message.to_string() }) }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::malformed("read", format!("{}: {e}", path.display())))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::output(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(
    layout: &Layout,
    graph: &ProfitGraph,
    labels: &BTreeMap<BoxId, String>,
    out: Option<&Path>,
    svg_path: Option<&Path>,
) -> Result<(), Failure> {
    let doc = LayoutDoc::new(layout, graph).map_err(|e| Failure::infeasible("validate", e, Value::Null))?;
    write_text(out, &doc.to_json())?;
    if let Some(p) = svg_path {
        std::fs::write(p, svg::render(layout, labels)).map_err(|e| Failure::output(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn stopword_set(path: Option<&Path>) -> Result<std::collections::BTreeSet<String>, Failure> {
    Ok(match path {
        Some(p) => parse_stopwords(&read_input(p)?),
        None => parse_stopwords(BUNDLED_STOPWORDS),
    })
}

fn similarity(lsa: Option<usize>) -> Similarity {
    lsa.map_or(Similarity::Cooccurrence, |rank| Similarity::Lsa { rank })
}

fn hier_failure(e: HierError) -> Failure {
    let stage = e.stage();
    match &e {
        HierError::Embedding(v) => Failure {
            code: 2,
            report: json!({ "error": "malformed", "stage": stage, "message": e.to_string(), "witness": v }),
        },
        HierError::MissingBox(_) | HierError::UnknownBox(_) => Failure::malformed(stage, &e),
        HierError::YConflict { id, first, second } => {
            Failure::infeasible(stage, &e, json!({ "box": id, "tops": [format_q(first), format_q(second)] }))
        }
        HierError::SplitBox(id) | HierError::ParentOrder(id) => Failure::infeasible(stage, &e, json!({ "box": id })),
        HierError::Infeasible(cycle) => Failure::infeasible(stage, &e, json!(cycle)),
    }
}

fn tri_failure(e: TriError) -> Failure {
    match &e {
        TriError::Invalid(v) => Failure {
            code: 2,
            report: json!({ "error": "malformed", "stage": "validate", "message": e.to_string(), "witness": v }),
        },
        TriError::Infeasible { stage, witness } => {
            let name = serde_json::to_value(stage).unwrap_or(Value::Null);
            Failure {
                code: 3,
                report: json!({ "error": "infeasible", "stage": name, "message": e.to_string(), "witness": witness }),
            }
        }
        TriError::Geometry(_) => Failure::infeasible("validate", &e, Value::Null),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Layout { instance, algo, eps, seed, out, svg } => {
            let doc = InstanceDoc::from_json(&read_input(&instance)?).map_err(|e| Failure::malformed("parse", e))?;
            let graph = doc.graph().map_err(|e| Failure::malformed("parse", e))?;
            let boxes = doc.specs();
            let layout = solve::run(algo, &graph, &boxes, eps, seed).map_err(|e| Failure::malformed("solve", e))?;
            emit(&layout, &graph, &doc.labels(), out.as_deref(), svg.as_deref())
        }
        Command::Hier { dag, delta, out, svg } => {
            let doc = DagDoc::from_json(&read_input(&dag)?).map_err(|e| Failure::malformed("parse", e))?;
            let graph = doc.graph().map_err(|e| Failure::malformed("parse", e))?;
            let boxes = doc.specs();
            let delta = match delta.or_else(|| default_delta(&boxes)) {
                Some(d) if d > Q::from_integer(0) => d,
                _ => return Err(Failure::malformed("parse", "delta must be positive")),
            };
            let layout = solve_hier(&doc.dag(), &boxes, delta).map_err(hier_failure)?;
            let labels = doc.boxes.iter().filter_map(|b| b.label.clone().map(|l| (b.id.clone(), l))).collect();
            emit(&layout, &graph, &labels, out.as_deref(), svg.as_deref())
        }
        Command::Tri { instance, out, svg } => {
            let doc = TriangulationDoc::from_json(&read_input(&instance)?).map_err(|e| Failure::malformed("parse", e))?;
            let graph = doc.graph().map_err(|e| Failure::malformed("parse", e))?;
            let layout = realize_triangulation(&doc.instance()).map_err(tri_failure)?;
            let labels = doc.boxes.iter().filter_map(|b| b.label.clone().map(|l| (b.id.clone(), l))).collect();
            emit(&layout, &graph, &labels, out.as_deref(), svg.as_deref())
        }
        Command::Instance { text, k, stopwords, lsa, out } => {
            if k < 2 {
                return Err(Failure::malformed("parse", "k must be at least 2"));
            }
            let words = stopword_set(stopwords.as_deref())?;
            let inst = build_instance(&read_input(&text)?, &words, k, similarity(lsa), FontParams::default());
            write_text(out.as_deref(), &InstanceDoc::new(&inst.boxes, &inst.graph, &inst.labels).to_json())
        }
        Command::Bench { corpus, k, algo, seed, eps, stopwords, lsa, csv } => {
            if k < 2 {
                return Err(Failure::malformed("parse", "k must be at least 2"));
            }
            let mut algos = if algo.is_empty() { Algo::ALL.to_vec() } else { algo };
            algos.sort();
            algos.dedup();
            let cfg = BenchConfig { k, algos, seed, eps, similarity: similarity(lsa), stopwords: stopword_set(stopwords.as_deref())? };
            let files = corpus_files(&corpus).map_err(|e| Failure::malformed("read", format!("{}: {e}", corpus.display())))?;
            let (rows, warnings) = bench_corpus(&files, &cfg);
            for w in &warnings {
                eprintln!("warning: skipped {w}");
            }
            if rows.is_empty() {
                return Err(Failure::malformed("bench", "no document could be benchmarked"));
            }
            if let Some(p) = csv {
                std::fs::write(&p, bench::csv(&rows)).map_err(|e| Failure::output(format!("{}: {e}", p.display())))?;
            }
            print!("{}", bench::table(&rows, &cfg.algos, k));
            Ok(())
        }
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("CROWN_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.report);
            ExitCode::from(f.code)
        }
    }
}
