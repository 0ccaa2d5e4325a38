//! Corpus benchmark: percentage of realized profit per document and
//! algorithm, with a per-document CSV and a table of means.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crown::geometry::{realized_profit, validate_no_overlap};
use crown::pipeline::{build_instance, FontParams, Similarity};
use crown::rational::{q, to_f64};
use crown::Q;
use rayon::prelude::*;
use std::collections::BTreeSet;

use crate::solve::{run, Algo};

#[derive(Debug, Clone)]
pub struct Row {
    pub doc_id: String,
    pub algo: Algo,
    pub k: usize,
    pub realized: Q,
    pub total: Q,
    pub millis: u128,
    /// `ceil(max_degree / 2)`, the cycle-cover guarantee divisor.
    pub cover_divisor: usize,
}

impl Row {
    pub fn pct(&self) -> Q {
        self.realized * q(100) / self.total
    }

    pub fn bound_holds(&self) -> bool {
        self.realized * q(self.cover_divisor.max(1) as i128) >= self.total
    }
}

pub struct BenchConfig {
    pub k: usize,
    pub algos: Vec<Algo>,
    pub seed: u64,
    pub eps: Q,
    pub similarity: Similarity,
    pub stopwords: BTreeSet<String>,
}

pub fn corpus_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    files.sort();
    Ok(files)
}

fn doc_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Rows for one document, or a warning explaining why it was skipped.
pub fn bench_document(path: &Path, cfg: &BenchConfig) -> Result<Vec<Row>, String> {
    let id = doc_id(path);
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let inst = build_instance(&text, &cfg.stopwords, cfg.k, cfg.similarity, FontParams::default());
    let total = inst.graph.total_profit();
    if total <= q(0) {
        return Err(format!("{id}: supporting graph has no profit"));
    }
    let cover_divisor = inst.graph.max_degree().div_ceil(2);
    let mut rows = Vec::new();
    for &algo in &cfg.algos {
        let start = Instant::now();
        let layout = run(algo, &inst.graph, &inst.boxes, cfg.eps, cfg.seed).map_err(|e| format!("{id}: {e}"))?;
        let millis = start.elapsed().as_millis();
        validate_no_overlap(&layout).map_err(|e| format!("{id}: {e}"))?;
        let realized = realized_profit(&layout, &inst.graph).map_err(|e| format!("{id}: {e}"))?;
        rows.push(Row { doc_id: id.clone(), algo, k: cfg.k, realized, total, millis, cover_divisor });
    }
    Ok(rows)
}

/// Runs every document (in parallel) and returns rows in file order plus
/// warnings for skipped documents.
pub fn bench_corpus(files: &[PathBuf], cfg: &BenchConfig) -> (Vec<Row>, Vec<String>) {
    let results: Vec<Result<Vec<Row>, String>> = files.par_iter().map(|f| bench_document(f, cfg)).collect();
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for r in results {
        match r {
            Ok(mut rs) => rows.append(&mut rs),
            Err(w) => warnings.push(w),
        }
    }
    (rows, warnings)
}

/// Exact value rounded half away from zero to `places` decimals.
pub fn decimal(v: &Q, places: u32) -> String {
    let scale = 10i128.pow(places);
    let n = (*v * q(scale)).round().to_integer();
    let sign = if n < 0 { "-" } else { "" };
    if places == 0 {
        return format!("{n}");
    }
    format!("{sign}{}.{:0width$}", n.abs() / scale, n.abs() % scale, width = places as usize)
}

pub fn csv(rows: &[Row]) -> String {
    let mut out = String::from("doc_id,algorithm,k,realized,total,pct,millis\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.doc_id,
            r.algo.name(),
            r.k,
            decimal(&r.realized, 6),
            decimal(&r.total, 6),
            decimal(&r.pct(), 1),
            r.millis
        );
    }
    out
}

/// Mean percentage per algorithm, in algorithm order.
pub fn means(rows: &[Row], algos: &[Algo]) -> Vec<(Algo, f64, usize)> {
    algos
        .iter()
        .map(|&a| {
            let pcts: Vec<f64> = rows.iter().filter(|r| r.algo == a).map(|r| to_f64(&r.pct())).collect();
            let mean = if pcts.is_empty() { 0.0 } else { pcts.iter().sum::<f64>() / pcts.len() as f64 };
            (a, mean, pcts.len())
        })
        .collect()
}

pub fn table(rows: &[Row], algos: &[Algo], k: usize) -> String {
    let docs: BTreeSet<&str> = rows.iter().map(|r| r.doc_id.as_str()).collect();
    let mut out = String::new();
    let _ = writeln!(out, "Realized profit of G_{k} ({} documents)", docs.len());
    let _ = writeln!(out, "{:<12} {:>8} {:>10}", "algorithm", "mean %", "bound");
    for (a, mean, _) in means(rows, algos) {
        let bound = if a == Algo::CycleCover {
            let held = rows.iter().filter(|r| r.algo == a && r.bound_holds()).count();
            let all = rows.iter().filter(|r| r.algo == a).count();
            format!("{held}/{all}")
        } else {
            "-".to_string()
        };
        let _ = writeln!(out, "{:<12} {:>8.1} {:>10}", a.title(), mean, bound);
    }
    out
}
