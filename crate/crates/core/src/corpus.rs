//! Corpora of `q`-critical graphs: exhaustive generation for small orders,
//! graph6 ingestion, Hajós joins, and a graph6 + JSON-lines file format.
//!
//! Generation adds one vertex at a time, trying every neighborhood of the
//! new vertex, and deduplicates each level by canonical form. Every
//! `q`-critical graph other than `K_q` is `K_q`-free, and every proper
//! induced subgraph of it is `(q-1)`-colorable. Both properties pass to
//! induced subgraphs, so intermediate levels keep only graphs having both,
//! and the last level keeps only the critical ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, CanonicalForm};
use crate::coloring::{is_colorable, is_critical};
use crate::error::{Error, Result};
use crate::graph::{bit, Edge, Graph, MAX_VERTICES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Generated,
    Ingested,
    Hajos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub graph: Graph,
    pub cert: CanonicalForm,
    pub n: usize,
    pub m: usize,
    pub min_degree: usize,
    pub provenance: Provenance,
}

impl CorpusEntry {
    fn new(graph: Graph, cert: CanonicalForm, provenance: Provenance) -> Self {
        let n = graph.n();
        let m = graph.edge_count();
        let min_degree = (0..n).map(|v| graph.degree(v)).min().unwrap_or(0);
        CorpusEntry { graph, cert, n, m, min_degree, provenance }
    }
}

/// What happened to a graph offered to a corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Admission {
    Added,
    Duplicate,
    NotCritical,
}

/// `q`-critical graphs, pairwise non-isomorphic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    k_plus_1: usize,
    entries: Vec<CorpusEntry>,
    certs: BTreeSet<CanonicalForm>,
}

impl Corpus {
    pub fn new(k_plus_1: usize) -> Self {
        Corpus { k_plus_1, entries: Vec::new(), certs: BTreeSet::new() }
    }

    pub fn k_plus_1(&self) -> usize {
        self.k_plus_1
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn graphs(&self) -> impl Iterator<Item = &Graph> {
        self.entries.iter().map(|e| &e.graph)
    }

    pub fn contains(&self, cert: &CanonicalForm) -> bool {
        self.certs.contains(cert)
    }

    /// Adds `g` if it is critical and new.
    pub fn offer(&mut self, g: &Graph, provenance: Provenance) -> Admission {
        if !is_critical(g, self.k_plus_1) {
            return Admission::NotCritical;
        }
        self.offer_critical(canonical_form(g), provenance)
    }

    fn offer_critical(&mut self, cert: CanonicalForm, provenance: Provenance) -> Admission {
        if !self.certs.insert(cert.clone()) {
            return Admission::Duplicate;
        }
        self.entries.push(CorpusEntry::new(cert.graph(), cert, provenance));
        Admission::Added
    }

    /// Appends the entries of `other` not already present.
    pub fn extend(&mut self, other: &Corpus) {
        for e in &other.entries {
            if self.certs.insert(e.cert.clone()) {
                self.entries.push(e.clone());
            }
        }
    }

    pub fn sort_by_cert(&mut self) {
        self.entries.sort_by(|a, b| a.cert.cmp(&b.cert));
    }

    /// Number of entries with minimum degree above `d`.
    pub fn count_min_degree_above(&self, d: usize) -> usize {
        self.entries.iter().filter(|e| e.min_degree > d).count()
    }
}

/// Which end of the neighborhood range the augmentation scans first.
/// Results do not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AugmentOrder {
    #[default]
    Forward,
    Reverse,
}

/// One canonical representative of each graph on `parents`' order plus one
/// vertex that passes `keep`, sorted by certificate. `allowed` filters
/// neighborhoods of the new vertex before the child is built.
fn augment<A, K>(parents: &[Graph], order: AugmentOrder, allowed: A, keep: K) -> Vec<(CanonicalForm, Graph)>
where
    A: Fn(&Graph, u64) -> bool + Sync,
    K: Fn(&Graph) -> bool + Sync,
{
    let per_parent: Vec<Vec<CanonicalForm>> = parents
        .par_iter()
        .map(|p| {
            let n = p.n();
            let full: u64 = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
            let masks: Box<dyn Iterator<Item = u64>> = match order {
                AugmentOrder::Forward => Box::new(0..=full),
                AugmentOrder::Reverse => Box::new((0..=full).rev()),
            };
            let mut found = BTreeSet::new();
            for mask in masks {
                if !allowed(p, mask) {
                    continue;
                }
                let child = p.with_vertex(mask);
                if keep(&child) {
                    found.insert(canonical_form(&child));
                }
            }
            found.into_iter().collect()
        })
        .collect();
    let mut merged = BTreeSet::new();
    for certs in per_parent {
        merged.extend(certs);
    }
    merged.into_iter().map(|c| (c.clone(), c.graph())).collect()
}

/// All graphs on `n` vertices up to isomorphism, sorted by certificate.
pub fn all_graphs(n: usize) -> Result<Vec<Graph>> {
    all_graphs_with(n, AugmentOrder::Forward)
}

pub fn all_graphs_with(n: usize, order: AugmentOrder) -> Result<Vec<Graph>> {
    if n > 9 {
        return Err(Error::UnsupportedSize(format!("all graphs on {n} vertices")));
    }
    let mut level = vec![Graph::empty(0)];
    for _ in 0..n {
        level = augment(&level, order, |_, _| true, |_| true).into_iter().map(|(_, g)| g).collect();
    }
    Ok(level)
}

/// Graphs that are `(q-1)`-colorable and contain no `K_q`.
fn hereditary_ok(g: &Graph, q: usize) -> bool {
    !g.has_clique(q) && is_colorable(g, q - 1)
}

/// Intermediate levels `0..=top`: all `(q-1)`-colorable, `K_q`-free graphs.
fn hereditary_levels(top: usize, q: usize, order: AugmentOrder) -> Vec<Vec<Graph>> {
    let mut levels = vec![vec![Graph::empty(0)]];
    for _ in 0..top {
        let prev = levels.last().expect("level 0 exists");
        let next = augment(prev, order, |_, _| true, |g| hereditary_ok(g, q)).into_iter().map(|(_, g)| g).collect();
        levels.push(next);
    }
    levels
}

/// `q`-critical graphs obtained by adding one vertex to a graph of `parents`.
fn critical_children(parents: &[Graph], q: usize, order: AugmentOrder) -> Vec<(CanonicalForm, Graph)> {
    let eligible: Vec<Graph> = parents
        .iter()
        .filter(|p| (0..p.n()).all(|v| p.degree(v) + 2 >= q))
        .cloned()
        .collect();
    let n = eligible.first().map_or(0, |p| p.n() + 1);
    augment(
        &eligible,
        order,
        |p, mask| {
            // The new vertex needs degree q - 1, and must lift every parent
            // vertex of degree q - 2.
            let low = (0..p.n()).filter(|&v| p.degree(v) + 2 == q).fold(0, |m, v| m | bit(v));
            mask.count_ones() as usize + 1 >= q && mask & low == low
        },
        |g| (n == q || !g.has_clique(q)) && is_critical(g, q),
    )
}

fn check_generation_range(n: usize, q: usize) -> Result<()> {
    if !(4..=11).contains(&n) {
        return Err(Error::UnsupportedSize(format!("exhaustive generation for n = {n}; supported range is 4..=11")));
    }
    if q < 2 {
        return Err(Error::Precondition(format!("target chromatic number must be at least 2, got {q}")));
    }
    Ok(())
}

/// Every `q`-critical graph on exactly `n` vertices, once each up to
/// isomorphism, sorted by certificate.
pub fn generate_exhaustive(n: usize, q: usize) -> Result<Corpus> {
    generate_exhaustive_with(n, q, AugmentOrder::Forward)
}

pub fn generate_exhaustive_with(n: usize, q: usize, order: AugmentOrder) -> Result<Corpus> {
    check_generation_range(n, q)?;
    generate_orders(n, n, q, order)
}

/// Every `q`-critical graph with `lo <= n <= hi` vertices, sorted by order
/// and then certificate.
pub fn generate_range(lo: usize, hi: usize, q: usize) -> Result<Corpus> {
    check_generation_range(lo, q)?;
    check_generation_range(hi, q)?;
    generate_orders(lo, hi, q, AugmentOrder::Forward)
}

fn generate_orders(lo: usize, hi: usize, q: usize, order: AugmentOrder) -> Result<Corpus> {
    let levels = hereditary_levels(hi - 1, q, order);
    let mut corpus = Corpus::new(q);
    for n in lo..=hi {
        for (cert, _) in critical_children(&levels[n - 1], q, order) {
            corpus.offer_critical(cert, Provenance::Generated);
        }
    }
    Ok(corpus)
}

/// Tallies from [`ingest_graph6`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestSummary {
    pub lines: usize,
    pub accepted: usize,
    pub parse_failures: usize,
    pub not_critical: usize,
    pub duplicates: usize,
}

impl IngestSummary {
    pub fn rejected(&self) -> usize {
        self.parse_failures + self.not_critical + self.duplicates
    }
}

/// Reads graph6 lines, keeping the `q`-critical ones once each. Rejected
/// lines are logged with their reason.
pub fn ingest_graph6(path: &Path, q: usize) -> Result<(Corpus, IngestSummary)> {
    let reader = BufReader::new(File::open(path)?);
    let mut corpus = Corpus::new(q);
    let mut summary = IngestSummary::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        summary.lines += 1;
        let g = match Graph::parse_graph6(trimmed) {
            Ok(g) => g,
            Err(e) => {
                warn!("{}:{}: parse failure: {e}", path.display(), i + 1);
                summary.parse_failures += 1;
                continue;
            }
        };
        match corpus.offer(&g, Provenance::Ingested) {
            Admission::Added => summary.accepted += 1,
            Admission::Duplicate => {
                warn!("{}:{}: duplicate of an earlier graph", path.display(), i + 1);
                summary.duplicates += 1;
            }
            Admission::NotCritical => {
                warn!("{}:{}: not {q}-critical", path.display(), i + 1);
                summary.not_critical += 1;
            }
        }
    }
    Ok((corpus, summary))
}

/// Hajós join: the disjoint union of `g1` and `g2` with edges `x1y1` and
/// `x2y2` deleted, `x2` merged into `x1`, and `y1y2` added. Here `x` is the
/// smaller endpoint of each edge. Vertices of `g1` keep their labels;
/// those of `g2` other than `x2` follow in order.
pub fn hajos_join(g1: &Graph, e1: Edge, g2: &Graph, e2: Edge) -> Result<Graph> {
    if e1.v >= g1.n() || !g1.has_edge(e1.u, e1.v) {
        return Err(Error::Precondition(format!("{e1} is not an edge of the first graph")));
    }
    if e2.v >= g2.n() || !g2.has_edge(e2.u, e2.v) {
        return Err(Error::Precondition(format!("{e2} is not an edge of the second graph")));
    }
    let (n1, n2) = (g1.n(), g2.n());
    let n = n1 + n2 - 1;
    if n > MAX_VERTICES {
        return Err(Error::UnsupportedSize(format!("Hajós join on {n} vertices")));
    }
    let map = |w: usize| match w.cmp(&e2.u) {
        std::cmp::Ordering::Equal => e1.u,
        std::cmp::Ordering::Less => n1 + w,
        std::cmp::Ordering::Greater => n1 + w - 1,
    };
    let mut h = Graph::empty(n);
    for e in g1.edges().filter(|&e| e != e1) {
        h.add_edge(e.u, e.v);
    }
    for e in g2.edges().filter(|&e| e != e2) {
        h.add_edge(map(e.u), map(e.v));
    }
    h.add_edge(e1.v, map(e2.v));
    Ok(h)
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
struct MetaRecord {
    cert: CanonicalForm,
    n: usize,
    m: usize,
    min_degree: usize,
    provenance: Provenance,
}

impl From<&CorpusEntry> for MetaRecord {
    fn from(e: &CorpusEntry) -> Self {
        MetaRecord { cert: e.cert.clone(), n: e.n, m: e.m, min_degree: e.min_degree, provenance: e.provenance }
    }
}

/// The metadata sidecar stored next to a corpus file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.jsonl");
    PathBuf::from(s)
}

fn write_entries(c: &Corpus, path: &Path, append: bool) -> Result<()> {
    let open = |p: &Path| -> Result<BufWriter<File>> {
        let f = OpenOptions::new().create(true).write(true).append(append).truncate(!append).open(p)?;
        Ok(BufWriter::new(f))
    };
    let mut lines = open(path)?;
    let mut meta = open(&sidecar_path(path))?;
    for e in c.entries() {
        writeln!(lines, "{}", e.graph.write_graph6()?)?;
        let record = serde_json::to_string(&MetaRecord::from(e)).map_err(|err| Error::Corrupt(err.to_string()))?;
        writeln!(meta, "{record}")?;
    }
    lines.flush()?;
    meta.flush()?;
    Ok(())
}

/// Writes `c` as graph6 lines, replacing any existing file and sidecar.
pub fn save_corpus(c: &Corpus, path: &Path) -> Result<()> {
    write_entries(c, path, false)
}

/// Appends the entries of `c` to a corpus file. Duplicates are dropped on
/// load.
pub fn append_corpus(c: &Corpus, path: &Path) -> Result<()> {
    write_entries(c, path, true)
}

fn nonblank_lines(path: &Path) -> Result<Vec<String>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(line.trim().to_string());
        }
    }
    Ok(out)
}

/// Reads a corpus written by [`save_corpus`] or [`append_corpus`],
/// checking every metadata record against the graph it describes and every
/// graph for `q`-criticality. Repeated graphs keep their first occurrence.
pub fn load_corpus(path: &Path, q: usize) -> Result<Corpus> {
    let graphs = nonblank_lines(path)?;
    let meta_path = sidecar_path(path);
    let metas = if meta_path.exists() {
        nonblank_lines(&meta_path)?
    } else if graphs.is_empty() {
        Vec::new()
    } else {
        return Err(Error::Corrupt(format!("missing metadata file {}", meta_path.display())));
    };
    if graphs.len() != metas.len() {
        return Err(Error::Corrupt(format!("{} graphs but {} metadata records", graphs.len(), metas.len())));
    }
    let mut corpus = Corpus::new(q);
    for (i, (line, meta)) in graphs.iter().zip(&metas).enumerate() {
        let g = Graph::parse_graph6(line)
            .map_err(|e| Error::Corrupt(format!("{}:{}: {e}", path.display(), i + 1)))?;
        let record: MetaRecord = serde_json::from_str(meta)
            .map_err(|e| Error::Corrupt(format!("{}:{}: {e}", meta_path.display(), i + 1)))?;
        let cert = canonical_form(&g);
        let entry = CorpusEntry::new(cert.graph(), cert, record.provenance);
        if MetaRecord::from(&entry) != record {
            return Err(Error::Corrupt(format!("{}:{}: metadata does not match graph {line}", meta_path.display(), i + 1)));
        }
        if corpus.contains(&entry.cert) {
            continue;
        }
        if !is_critical(&g, q) {
            return Err(Error::Corrupt(format!("{}:{}: {line} is not {q}-critical", path.display(), i + 1)));
        }
        corpus.certs.insert(entry.cert.clone());
        corpus.entries.push(entry);
    }
    Ok(corpus)
}

/// Per-order counts of a corpus, keyed by vertex count.
pub fn order_histogram(c: &Corpus) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for e in c.entries() {
        *h.entry(e.n).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::chromatic_number;
    use std::collections::HashSet;

    fn certs(c: &Corpus) -> BTreeSet<CanonicalForm> {
        c.entries().iter().map(|e| e.cert.clone()).collect()
    }

    #[test]
    fn unlabeled_graph_counts() {
        let counts: Vec<usize> = (1..=7).map(|n| all_graphs(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34, 156, 1044]);
    }

    /// Brute force over labeled graphs: dedup every edge subset by
    /// certificate.
    #[test]
    fn augmentation_matches_labeled_brute_force() {
        for n in 1..=5 {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
            let mut seen = HashSet::new();
            for mask in 0u32..(1 << pairs.len()) {
                let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
                seen.insert(canonical_form(&Graph::from_edges(n, &edges)));
            }
            let generated: HashSet<_> = all_graphs(n).unwrap().iter().map(canonical_form).collect();
            assert_eq!(generated, seen, "n = {n}");
        }
    }

    #[test]
    fn small_critical_sets() {
        let c4 = generate_exhaustive(4, 4).unwrap();
        assert_eq!(c4.len(), 1);
        assert_eq!(c4.entries()[0].cert, canonical_form(&Graph::complete(4)));
        assert!(generate_exhaustive(5, 4).unwrap().is_empty());
        let c6 = generate_exhaustive(6, 4).unwrap();
        assert_eq!(certs(&c6), BTreeSet::from([canonical_form(&Graph::wheel(5))]));
    }

    #[test]
    fn generation_matches_filter_over_all_graphs() {
        for n in 4..=7 {
            let filtered: BTreeSet<_> =
                all_graphs(n).unwrap().iter().filter(|g| is_critical(g, 4)).map(canonical_form).collect();
            assert_eq!(certs(&generate_exhaustive(n, 4).unwrap()), filtered, "n = {n}");
        }
    }

    #[test]
    fn generation_is_order_invariant() {
        for n in 4..=7 {
            let a = generate_exhaustive_with(n, 4, AugmentOrder::Forward).unwrap();
            let b = generate_exhaustive_with(n, 4, AugmentOrder::Reverse).unwrap();
            assert_eq!(certs(&a), certs(&b));
        }
    }

    #[test]
    fn corpus_entries_meet_invariants() {
        let c = generate_range(4, 7, 4).unwrap();
        for e in c.entries() {
            assert!(is_critical(&e.graph, 4));
            assert!(e.min_degree >= 3);
            assert!(e.graph.structural_predicates().two_connected);
        }
        assert_eq!(order_histogram(&c).values().sum::<usize>(), c.len());
    }

    #[test]
    fn range_checks() {
        assert!(matches!(generate_exhaustive(3, 4), Err(Error::UnsupportedSize(_))));
        assert!(matches!(generate_exhaustive(12, 4), Err(Error::UnsupportedSize(_))));
    }

    #[test]
    fn five_critical_small() {
        let c = generate_exhaustive(5, 5).unwrap();
        assert_eq!(certs(&c), BTreeSet::from([canonical_form(&Graph::complete(5))]));
        assert!(generate_exhaustive(6, 5).unwrap().is_empty());
    }

    #[test]
    fn hajos_examples() {
        let k4 = Graph::complete(4);
        let h = hajos_join(&k4, Edge::new(0, 1), &k4, Edge::new(0, 1)).unwrap();
        assert_eq!(h.n(), 7);
        assert_eq!(h.edge_count(), 11);
        assert!(is_critical(&h, 4));
        assert_eq!((0..7).map(|v| h.degree(v)).min(), Some(3));

        let mut g = k4.clone();
        for j in 2..=4 {
            g = hajos_join(&g, g.edges().last().unwrap(), &k4, Edge::new(0, 1)).unwrap();
            assert_eq!(g.n(), 3 * j + 1);
            assert!(is_critical(&g, 4));
            assert_eq!(chromatic_number(&g).unwrap(), 4);
        }
        assert!(hajos_join(&Graph::cycle(5), Edge::new(0, 2), &k4, Edge::new(0, 1)).is_err());
    }

    #[test]
    fn hajos_of_small_critical_pairs() {
        let small = generate_range(4, 6, 4).unwrap();
        for a in small.graphs() {
            for b in small.graphs() {
                for e1 in a.edges().take(3) {
                    let h = hajos_join(a, e1, b, b.edges().next().unwrap()).unwrap();
                    assert!(is_critical(&h, 4));
                }
            }
        }
    }

    #[test]
    fn ingest_examples() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("in.g6");
        std::fs::write(&p, "C~\nC~\nDhc\nnot graph6\n").unwrap();
        let (c, s) = ingest_graph6(&p, 4).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.entries()[0].cert, canonical_form(&Graph::complete(4)));
        assert_eq!(s, IngestSummary { lines: 4, accepted: 1, parse_failures: 1, not_critical: 1, duplicates: 1 });
        assert!(ingest_graph6(&dir.path().join("missing"), 4).is_err());
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.g6");
        let mut c = Corpus::new(4);
        c.offer(&Graph::complete(4), Provenance::Generated);
        c.offer(&Graph::wheel(5), Provenance::Ingested);
        save_corpus(&c, &p).unwrap();
        assert_eq!(load_corpus(&p, 4).unwrap(), c);

        append_corpus(&c, &p).unwrap();
        assert_eq!(load_corpus(&p, 4).unwrap(), c);

        let empty = dir.path().join("empty.g6");
        std::fs::write(&empty, "").unwrap();
        assert!(load_corpus(&empty, 4).unwrap().is_empty());
    }

    #[test]
    fn tampered_metadata_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.g6");
        let mut c = Corpus::new(4);
        c.offer(&Graph::complete(4), Provenance::Generated);
        save_corpus(&c, &p).unwrap();
        let meta = sidecar_path(&p);
        let text = std::fs::read_to_string(&meta).unwrap().replace("\"m\":6", "\"m\":7");
        std::fs::write(&meta, text).unwrap();
        assert!(matches!(load_corpus(&p, 4), Err(Error::Corrupt(_))));

        std::fs::write(&meta, "").unwrap();
        assert!(matches!(load_corpus(&p, 4), Err(Error::Corrupt(_))));
    }
}
