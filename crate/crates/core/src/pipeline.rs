//! Text to word-cloud instance: sentences, stop-words, stemming, word
//! frequencies, co-occurrence similarity profits and box sizes, plus a
//! spiral-placement baseline.
//!
//! Stemming rules, applied once per token and only when at least three
//! characters remain:
//! - `ies` -> `y`, `sses` -> `ss`
//! - `es` is dropped after `s`, `x`, `z`, `ch` or `sh`
//! - `ing` and `ed` are dropped; a doubled final consonant other than
//!   `l`, `s` or `z` is then undoubled
//! - a final `s` is dropped unless preceded by `s`, `u` or `i`

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{BoxId, BoxSpec, Layout};
use crate::graph::ProfitGraph;
use crate::rational::{q, round_to_denominator, to_f64, Q};

/// Profits are cosines rounded to this denominator.
pub const PROFIT_DENOMINATOR: i128 = 1_000_000;
/// Box dimensions live on this grid.
pub const GRID: i128 = 64;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordEntry {
    pub freq: usize,
    pub label: String,
    pub surfaces: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordStats {
    pub words: BTreeMap<String, WordEntry>,
    /// Stems present in each sentence.
    pub sentences: Vec<BTreeSet<String>>,
}

pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

/// Splits after `.`, `!` or `?` followed by whitespace.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') && chars.peek().is_none_or(|(_, n)| n.is_whitespace()) {
            let end = i + c.len_utf8();
            out.push(&text[start..end]);
            start = end;
        }
    }
    if start < text.len() {
        out.push(&text[start..]);
    }
    out.into_iter().filter(|s| !s.trim().is_empty()).collect()
}

fn clean_token(raw: &str) -> String {
    raw.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

fn undouble(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 2 && b[n - 1] == b[n - 2] && !b"aeioulsz".contains(&b[n - 1]) {
        stem[..n - 1].to_string()
    } else {
        stem.to_string()
    }
}

pub fn stem(word: &str) -> String {
    let keep = |s: &str| s.chars().count() >= 3;
    if let Some(s) = word.strip_suffix("ies").filter(|s| keep(s)) {
        return format!("{s}y");
    }
    if let Some(s) = word.strip_suffix("sses") {
        return format!("{s}ss");
    }
    if let Some(s) = word.strip_suffix("es").filter(|s| keep(s)) {
        if ["s", "x", "z", "ch", "sh"].iter().any(|e| s.ends_with(e)) {
            return s.to_string();
        }
    }
    for suffix in ["ing", "ed"] {
        if let Some(s) = word.strip_suffix(suffix).filter(|s| keep(s)) {
            return undouble(s);
        }
    }
    if let Some(s) = word.strip_suffix('s').filter(|s| keep(s)) {
        if !(s.ends_with('s') || s.ends_with('u') || s.ends_with('i')) {
            return s.to_string();
        }
    }
    word.to_string()
}

pub fn preprocess(text: &str, stopwords: &BTreeSet<String>) -> WordStats {
    let mut stats = WordStats::default();
    for sentence in split_sentences(text) {
        let mut present = BTreeSet::new();
        for raw in sentence.split_whitespace() {
            let token = clean_token(raw);
            if token.is_empty() || stopwords.contains(&token) {
                continue;
            }
            let s = stem(&token);
            let entry = stats.words.entry(s.clone()).or_default();
            entry.freq += 1;
            *entry.surfaces.entry(token).or_default() += 1;
            present.insert(s);
        }
        if !present.is_empty() {
            stats.sentences.push(present);
        }
    }
    for entry in stats.words.values_mut() {
        // Most frequent surface form; BTreeMap order breaks ties lexicographically.
        let best = entry.surfaces.iter().fold(None::<(&String, usize)>, |acc, (w, &c)| match acc {
            Some((_, bc)) if bc >= c => acc,
            _ => Some((w, c)),
        });
        entry.label = best.map(|(w, _)| w.clone()).unwrap_or_default();
    }
    stats
}

/// The `k` most frequent stems, ties by stem.
pub fn top_words(stats: &WordStats, k: usize) -> Vec<String> {
    let mut all: Vec<(&String, usize)> = stats.words.iter().map(|(s, e)| (s, e.freq)).collect();
    all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    all.into_iter().take(k).map(|(s, _)| s.clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Similarity {
    /// Cosine of binary sentence-incidence vectors.
    #[default]
    Cooccurrence,
    /// Cosine after projecting onto the top `rank` singular directions of
    /// the word-sentence matrix.
    Lsa { rank: usize },
}

fn incidence(stats: &WordStats, words: &[String]) -> Vec<Vec<f64>> {
    words
        .iter()
        .map(|w| stats.sentences.iter().map(|s| if s.contains(w) { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Rows projected onto the top `rank` eigenvectors of `M M^T`, found by
/// power iteration with deflation from a fixed start vector.
fn lsa_vectors(m: &[Vec<f64>], rank: usize) -> Vec<Vec<f64>> {
    let k = m.len();
    let gram: Vec<Vec<f64>> =
        (0..k).map(|i| (0..k).map(|j| m[i].iter().zip(&m[j]).map(|(a, b)| a * b).sum()).collect()).collect();
    let mut basis: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..rank.min(k) {
        let mut v: Vec<f64> = (0..k).map(|i| 1.0 + (i as f64) * 1e-3).collect();
        let mut lambda = 0.0;
        for _ in 0..500 {
            let mut w: Vec<f64> = (0..k).map(|i| gram[i].iter().zip(&v).map(|(g, x)| g * x).sum()).collect();
            for (l, u) in &basis {
                let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= l * d * ui;
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                break;
            }
            lambda = norm;
            v = w.into_iter().map(|x| x / norm).collect();
        }
        if lambda < 1e-12 {
            break;
        }
        basis.push((lambda, v));
    }
    // Row i of U * Sigma.
    (0..k).map(|i| basis.iter().map(|(l, u)| u[i] * l.sqrt()).collect()).collect()
}

/// Supporting graph over the top-`k` stems; profits are similarities in
/// `(0, 1]` rounded to [`PROFIT_DENOMINATOR`], pairs rounding to zero are
/// left out.
pub fn similarity_profits(stats: &WordStats, k: usize, mode: Similarity) -> ProfitGraph {
    let words = top_words(stats, k);
    let rows = incidence(stats, &words);
    let vectors = match mode {
        Similarity::Cooccurrence => rows,
        Similarity::Lsa { rank } => lsa_vectors(&rows, rank),
    };
    let mut g = ProfitGraph::new();
    for w in &words {
        g.add_vertex(w.as_str());
    }
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let p = round_to_denominator(cosine(&vectors[i], &vectors[j]).min(1.0), PROFIT_DENOMINATOR);
            if p > q(0) {
                g.add_edge(words[i].as_str(), words[j].as_str(), p).expect("distinct stems");
            }
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FontParams {
    pub base_height: f64,
    pub min_height: f64,
    pub aspect: f64,
}

impl Default for FontParams {
    fn default() -> Self {
        FontParams { base_height: 2.0, min_height: 0.5, aspect: 0.55 }
    }
}

fn on_grid(x: f64) -> Q {
    let v = round_to_denominator(x, GRID);
    v.max(Q::new(1, GRID))
}

/// One box per word: height follows the square root of the relative
/// frequency, width is proportional to the label length.
pub fn box_dimensions(stats: &WordStats, words: &[String], font: FontParams) -> Vec<BoxSpec> {
    let max = words.iter().map(|w| stats.words[w].freq).max().unwrap_or(1) as f64;
    words
        .iter()
        .map(|w| {
            let e = &stats.words[w];
            let h = (font.base_height * (e.freq as f64 / max).sqrt()).clamp(font.min_height, font.base_height);
            let height = on_grid(h);
            let width = on_grid(to_f64(&height) * font.aspect * e.label.chars().count() as f64);
            BoxSpec::new(w.as_str(), width, height)
        })
        .collect()
}

/// A document turned into a MAX-CROWN instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordInstance {
    pub boxes: Vec<BoxSpec>,
    pub graph: ProfitGraph,
    pub labels: BTreeMap<BoxId, String>,
}

pub fn build_instance(
    text: &str,
    stopwords: &BTreeSet<String>,
    k: usize,
    mode: Similarity,
    font: FontParams,
) -> WordInstance {
    let stats = preprocess(text, stopwords);
    let words = top_words(&stats, k);
    let graph = similarity_profits(&stats, k, mode);
    let boxes = box_dimensions(&stats, &words, font);
    let labels = words.iter().map(|w| (BoxId::from(w.as_str()), stats.words[w].label.clone())).collect();
    WordInstance { boxes, graph, labels }
}

/// Spiral placement: boxes by decreasing area (ties by id), each at the
/// first point of an Archimedean spiral, from a seeded random start angle,
/// where its center does not overlap anything placed so far.
pub fn random_baseline(boxes: &[BoxSpec], seed: u64) -> Layout {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<&BoxSpec> = boxes.iter().collect();
    order.sort_by(|a, b| (b.width * b.height).cmp(&(a.width * a.height)).then_with(|| a.id.cmp(&b.id)));
    // Work in integer grid units; every dimension is a multiple of 1/GRID
    // for pipeline boxes, other inputs are snapped up to it.
    let units = |v: &Q| -> i128 { (*v * q(GRID)).ceil().to_integer() };
    let mut rects: Vec<(i128, i128, i128, i128)> = Vec::new();
    let mut layout = Layout::new();
    for b in order {
        let (w, h) = (units(&b.width), units(&b.height));
        let start: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let step = 0.5 * GRID as f64 / std::f64::consts::TAU;
        let mut t = 0.0f64;
        loop {
            let r = step * t;
            let cx = (r * (start + t).cos()).round() as i128;
            let cy = (r * (start + t).sin()).round() as i128;
            let (x0, y0) = (cx - w / 2, cy - h / 2);
            let free = rects.iter().all(|&(a0, b0, a1, b1)| x0 >= a1 || a0 >= x0 + w || y0 >= b1 || b0 >= y0 + h);
            if free {
                rects.push((x0, y0, x0 + w, y0 + h));
                layout.place(b, Q::new(x0, GRID), Q::new(y0, GRID));
                break;
            }
            t += 0.05;
        }
    }
    layout
}
