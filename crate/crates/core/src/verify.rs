//! Verification sweeps over corpora of critical graphs.
//!
//! Each graph gets one [`VerificationRecord`] holding its census figures and
//! a list of named checks. A failed check is a counterexample to a proven
//! statement, so callers treat any failure as fatal.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::canonical_form;
use crate::census::{census_mod, check_chen_saito, find_admissible_paths, ChenSaito, CycleCensus, CycleSeq};
use crate::corpus::{all_graphs, Corpus};
use crate::error::{Error, Result};
use crate::graph::{members, Graph};
use crate::kempe::{build_injection_f, extract_one_mod_k, extract_zero_mod_r, min_degree_vertex, prescribed_coloring};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Main,
    OneMod,
    Structure,
    Borrowed,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "main" => Ok(Suite::Main),
            "onemod" => Ok(Suite::OneMod),
            "structure" => Ok(Suite::Structure),
            "borrowed" => Ok(Suite::Borrowed),
            _ => Err(format!("unknown suite {s:?}; expected main, onemod, structure or borrowed")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Main => "main",
            Suite::OneMod => "onemod",
            Suite::Structure => "structure",
            Suite::Borrowed => "borrowed",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    fn new(name: &str, status: Status, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), status, detail: detail.into() }
    }

    fn holds(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Check::new(name, if ok { Status::Pass } else { Status::Fail }, detail)
    }

    fn skipped(name: &str, reason: &str) -> Self {
        Check::new(name, Status::Skipped, reason)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationRecord {
    pub cert: String,
    pub n: usize,
    pub m: usize,
    pub min_degree: usize,
    pub good_count: Option<u64>,
    pub one_mod_count: Option<u64>,
    pub bound_0mod: Option<u64>,
    pub bound_1mod: Option<u64>,
    pub is_complete: bool,
    pub per_vertex_min_incidence: Option<u64>,
    pub per_edge_incidence_range: Option<[u64; 2]>,
    /// Whether every vertex lies on at most two good cycles.
    pub light_hypothesis_met: Option<bool>,
    pub checks: Vec<Check>,
}

impl VerificationRecord {
    fn blank(g: &Graph) -> Self {
        let p = g.structural_predicates();
        VerificationRecord {
            cert: canonical_form(g).to_string(),
            n: g.n(),
            m: g.edge_count(),
            min_degree: p.min_degree,
            good_count: None,
            one_mod_count: None,
            bound_0mod: None,
            bound_1mod: None,
            is_complete: p.is_complete,
            per_vertex_min_incidence: None,
            per_edge_incidence_range: None,
            light_hypothesis_met: None,
            checks: Vec::new(),
        }
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    fn take_incidence(&mut self, g: &Graph, census: &CycleCensus) {
        self.per_vertex_min_incidence = census.vertex_incidence().iter().copied().min();
        let edges: Vec<u64> = census.edge_incidences(g).into_iter().map(|(_, c)| c).collect();
        if let (Some(&lo), Some(&hi)) = (edges.iter().min(), edges.iter().max()) {
            self.per_edge_incidence_range = Some([lo, hi]);
        }
    }
}

/// Cycles of the census, for membership tests. `None` if the census
/// dropped its stored cycles at the cap.
struct CycleIndex(Option<HashSet<CycleSeq>>);

impl CycleIndex {
    fn new(census: &CycleCensus) -> Self {
        CycleIndex(census.cycles().map(|cs| cs.iter().cloned().collect()))
    }

    /// Whether `c` is a cycle of `g` that the census counted with length
    /// `residue` modulo `r`.
    fn confirms(&self, g: &Graph, c: &CycleSeq, r: usize, residue: usize) -> bool {
        let present = match &self.0 {
            Some(set) => set.contains(c),
            None => c.is_cycle_of(g),
        };
        present && c.len() % r == residue
    }
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// `(k+1)(k-1)!/2`: cycles of length `0 mod k` in `K_{k+1}`.
pub fn complete_zero_mod_count(k: usize) -> u64 {
    (k as u64 + 1) * factorial(k - 1) / 2
}

fn failure_detail(e: &Error) -> String {
    match e {
        Error::Invariant(msg) => format!("construction failed: {msg}"),
        other => format!("construction refused: {other}"),
    }
}

/// Checks for a 4-critical graph: at least 4 good cycles with equality
/// only for `K_4`, good cycles through every vertex and avoiding every
/// edge, the injection when the minimum degree is 3, and at least 5 good
/// cycles when it is 4 or more.
pub fn verify_main(g: &Graph) -> VerificationRecord {
    let mut rec = VerificationRecord::blank(g);
    let census = match census_mod(g, 3, 0) {
        Ok(c) => c,
        Err(e) => {
            rec.checks.push(Check::holds("census", false, e.to_string()));
            return rec;
        }
    };
    let good = census.count(0);
    rec.good_count = Some(good);
    rec.bound_0mod = Some(4);
    rec.take_incidence(g, &census);
    rec.checks.push(Check::holds("good_cycle_bound", good >= 4, format!("{good} good cycles")));
    rec.checks.push(Check::holds(
        "equality_only_complete",
        good != 4 || rec.is_complete,
        if good == 4 { "exactly 4 good cycles" } else { "" },
    ));
    let min_inc = rec.per_vertex_min_incidence.unwrap_or(0);
    rec.checks.push(Check::holds("vertex_good_incidence", min_inc >= 2, format!("least vertex incidence {min_inc}")));

    let index = CycleIndex::new(&census);
    rec.checks.push(edge_deletion_check(g, &index));
    if rec.min_degree == 3 {
        rec.checks.push(injection_check(g, 3, &index, complete_zero_mod_count(3)));
        rec.checks.push(Check::skipped("min_degree_4_bound", "min degree 3"));
    } else {
        rec.checks.push(Check::skipped("injection", "min degree above 3"));
        rec.checks.push(Check::holds("min_degree_4_bound", good >= 5, format!("{good} good cycles")));
    }
    rec
}

/// For every edge `e`, constructs good cycles of `g - e` and confirms each
/// against the census.
fn edge_deletion_check(g: &Graph, index: &CycleIndex) -> Check {
    const NAME: &str = "edge_deletion_cycles";
    let mut fewest = usize::MAX;
    for e in g.edges() {
        match extract_zero_mod_r(g, e, 3, 3) {
            Ok(cycles) => {
                if cycles.is_empty() {
                    return Check::holds(NAME, false, format!("no cycle for {e}"));
                }
                if let Some(bad) = cycles.iter().find(|c| c.uses_edge(e) || !index.confirms(g, c, 3, 0)) {
                    return Check::holds(NAME, false, format!("{bad} for {e} is not a good cycle of g - e"));
                }
                fewest = fewest.min(cycles.len());
            }
            Err(err) => return Check::holds(NAME, false, format!("{e}: {}", failure_detail(&err))),
        }
    }
    Check::holds(NAME, true, format!("at least {fewest} per edge"))
}

/// Builds the injection at a least degree-`k` vertex and confirms that its
/// images are distinct census cycles, at least `need` of them of length
/// `0 mod k`.
fn injection_check(g: &Graph, k: usize, index: &CycleIndex, need: u64) -> Check {
    const NAME: &str = "injection";
    let Some(v) = min_degree_vertex(g, k) else {
        return Check::skipped(NAME, "no vertex of degree k");
    };
    let built = prescribed_coloring(g, v, k).and_then(|c| build_injection_f(g, v, &c, k));
    let f = match built {
        Ok(f) => f,
        Err(err) => return Check::holds(NAME, false, failure_detail(&err)),
    };
    for (dom, img) in &f {
        if !index.confirms(g, img, dom.len(), 0) {
            return Check::holds(NAME, false, format!("f({dom}) = {img} is not a census cycle of length 0 mod {}", dom.len()));
        }
    }
    let zero_mod_k = f.values().filter(|c| c.len() % k == 0).count() as u64;
    Check::holds(NAME, zero_mod_k >= need, format!("{} images, {zero_mod_k} of length 0 mod {k}", f.len()))
}

/// Checks for a `(k+1)`-critical graph: at least `k!/2` cycles of length
/// `1 mod k`, equality only for `K_{k+1}`, and the per-vertex construction
/// confirmed against the census.
pub fn verify_one_mod(g: &Graph, k: usize) -> VerificationRecord {
    let mut rec = VerificationRecord::blank(g);
    let census = match census_mod(g, k, 1) {
        Ok(c) => c,
        Err(e) => {
            rec.checks.push(Check::holds("census", false, e.to_string()));
            return rec;
        }
    };
    let bound = factorial(k) / 2;
    let count = census.count(1);
    rec.one_mod_count = Some(count);
    rec.bound_1mod = Some(bound);
    rec.take_incidence(g, &census);
    rec.checks.push(Check::holds("one_mod_bound", count >= bound, format!("{count} cycles, bound {bound}")));
    rec.checks.push(Check::holds(
        "one_mod_equality",
        count != bound || (rec.is_complete && g.n() == k + 1),
        if count == bound { "bound attained" } else { "" },
    ));
    let min_inc = rec.per_vertex_min_incidence.unwrap_or(0);
    rec.checks.push(Check::holds("one_mod_vertex_incidence", min_inc >= bound, format!("least vertex incidence {min_inc}")));

    let index = CycleIndex::new(&census);
    let mut check = Check::holds("one_mod_construction", true, "");
    let mut fewest = usize::MAX;
    for v in 0..g.n() {
        match extract_one_mod_k(g, v, k) {
            Ok(cycles) => {
                if let Some(bad) = cycles.iter().find(|c| !c.contains(v) || !index.confirms(g, c, k, 1)) {
                    check = Check::holds("one_mod_construction", false, format!("{bad} at {v} is not a census cycle through {v}"));
                    break;
                }
                fewest = fewest.min(cycles.len());
            }
            Err(err) => {
                check = Check::holds("one_mod_construction", false, format!("vertex {v}: {}", failure_detail(&err)));
                break;
            }
        }
    }
    if check.status == Status::Pass {
        check.detail = format!("at least {fewest} per vertex");
    }
    rec.checks.push(check);
    rec
}

/// Structure checks for 4-critical graphs of minimum degree at least 4.
///
/// If some vertex lies on 3 or more good cycles there must be at least 5
/// good cycles. Otherwise the graph must be 4-regular with every edge on
/// exactly one good cycle, and again have at least 5. Graphs of minimum
/// degree 3 are skipped.
pub fn verify_structure(g: &Graph) -> VerificationRecord {
    let mut rec = VerificationRecord::blank(g);
    if rec.min_degree < 4 {
        rec.checks.push(Check::skipped("heavy_vertex_branch", "min degree 3"));
        rec.checks.push(Check::skipped("light_vertices_branch", "min degree 3"));
        return rec;
    }
    let census = match census_mod(g, 3, 0) {
        Ok(c) => c,
        Err(e) => {
            rec.checks.push(Check::holds("census", false, e.to_string()));
            return rec;
        }
    };
    let good = census.count(0);
    rec.good_count = Some(good);
    rec.bound_0mod = Some(5);
    rec.take_incidence(g, &census);
    let heaviest = census.vertex_incidence().iter().copied().max().unwrap_or(0);
    let light = heaviest <= 2;
    rec.light_hypothesis_met = Some(light);
    if light {
        rec.checks.push(Check::skipped("heavy_vertex_branch", "no vertex on 3 good cycles"));
        let regular = (0..g.n()).all(|v| g.degree(v) == 4);
        let one_each = census.edge_incidences(g).iter().all(|&(_, c)| c == 1);
        rec.checks.push(Check::holds(
            "light_vertices_branch",
            regular && one_each && good >= 5,
            format!("4-regular {regular}, every edge on one good cycle {one_each}, {good} good cycles"),
        ));
    } else {
        rec.checks.push(Check::holds("heavy_vertex_branch", good >= 5, format!("{good} good cycles")));
        rec.checks.push(Check::skipped("light_vertices_branch", "a vertex lies on 3 good cycles"));
    }
    rec
}

/// Chen–Saito and admissible-path checks on one graph, wherever their
/// hypotheses hold.
pub fn verify_borrowed(g: &Graph) -> VerificationRecord {
    let mut rec = VerificationRecord::blank(g);
    let low = (0..g.n()).filter(|&v| g.degree(v) <= 2).count();
    if g.n() < 2 || low > 1 {
        rec.checks.push(Check::skipped("chen_saito", "hypothesis not met"));
    } else {
        rec.checks.push(match check_chen_saito(g) {
            Ok(ChenSaito::Witness(c)) => Check::holds("chen_saito", c.len() % 3 == 0 && c.is_cycle_of(g), format!("{c}")),
            Ok(ChenSaito::Violation) => Check::holds("chen_saito", false, "no cycle of length 0 mod 3"),
            Err(e) => Check::holds("chen_saito", false, e.to_string()),
        });
    }
    rec.checks.push(admissible_check(g));
    rec
}

fn admissible_check(g: &Graph) -> Check {
    const NAME: &str = "admissible_paths";
    if g.n() < 3 || !g.structural_predicates().two_connected {
        return Check::skipped(NAME, "not 2-connected");
    }
    let mut pairs = 0;
    for x in 0..g.n() {
        for y in x + 1..g.n() {
            let others = g.all_vertices() & !(1 << x) & !(1 << y);
            let ell = members(others).map(|v| g.degree(v)).min().unwrap_or(0).saturating_sub(1);
            if ell == 0 {
                continue;
            }
            match find_admissible_paths(g, x, y, ell) {
                Ok(Some(paths)) if paths.len() == ell => pairs += 1,
                Ok(_) => return Check::holds(NAME, false, format!("no {ell} admissible paths from {x} to {y}")),
                Err(e) => return Check::holds(NAME, false, e.to_string()),
            }
        }
    }
    if pairs == 0 {
        Check::skipped(NAME, "no pair with a positive path count")
    } else {
        Check::holds(NAME, true, format!("{pairs} pairs"))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub k: usize,
    pub jobs: usize,
    pub fail_fast: bool,
    /// Largest order of the graphs swept by the borrowed suite.
    pub n_max: usize,
}

impl VerifyOptions {
    pub fn new(suite: Suite, k: usize) -> Self {
        VerifyOptions { suite, k, jobs: 1, fail_fast: false, n_max: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: Suite,
    pub records: Vec<VerificationRecord>,
}

/// Pass, fail and skip counts for one check name.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

impl Report {
    pub fn counterexamples(&self) -> impl Iterator<Item = &VerificationRecord> {
        self.records.iter().filter(|r| r.failed())
    }

    pub fn has_counterexample(&self) -> bool {
        self.records.iter().any(|r| r.failed())
    }

    pub fn tallies(&self) -> BTreeMap<String, Tally> {
        let mut out: BTreeMap<String, Tally> = BTreeMap::new();
        for check in self.records.iter().flat_map(|r| &r.checks) {
            let t = out.entry(check.name.clone()).or_default();
            match check.status {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::Skipped => t.skipped += 1,
            }
        }
        out
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        for r in &self.records {
            let line = serde_json::to_string(r).map_err(|e| Error::Corrupt(e.to_string()))?;
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
        w.write_record(["check", "pass", "fail", "skipped"]).map_err(csv_error)?;
        w.write_record(["records", &self.records.len().to_string(), &self.counterexamples().count().to_string(), "0"])
            .map_err(csv_error)?;
        for (name, t) in self.tallies() {
            w.write_record([name, t.pass.to_string(), t.fail.to_string(), t.skipped.to_string()]).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Corrupt(format!("{other:?}")),
    }
}

/// Where the CSV summary of a report at `path` goes.
pub fn summary_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".summary.csv");
    PathBuf::from(s)
}

/// Every graph on `2..=n_max` vertices, followed by the graphs of `extra`
/// not already among them.
pub fn borrowed_graphs(n_max: usize, extra: Option<&Corpus>) -> Result<Vec<Graph>> {
    if n_max > 8 {
        return Err(Error::UnsupportedSize(format!("borrowed sweep up to n = {n_max}; at most 8 is supported")));
    }
    let mut graphs = Vec::new();
    for n in 2..=n_max {
        graphs.extend(all_graphs(n)?);
    }
    if let Some(c) = extra {
        graphs.extend(c.graphs().filter(|g| g.n() > n_max).cloned());
    }
    Ok(graphs)
}

fn check_suite_class(opts: &VerifyOptions, corpus: Option<&Corpus>) -> Result<()> {
    match opts.suite {
        Suite::Main | Suite::Structure if opts.k != 3 => Err(Error::Precondition(format!(
            "the {} suite applies to 4-critical graphs; got k = {}",
            opts.suite, opts.k
        ))),
        Suite::OneMod if opts.k < 3 => Err(Error::Precondition(format!("the onemod suite needs k >= 3, got {}", opts.k))),
        _ => match corpus {
            Some(c) if opts.suite != Suite::Borrowed && c.k_plus_1() != opts.k + 1 => Err(Error::Precondition(format!(
                "corpus holds {}-critical graphs but k + 1 = {}",
                c.k_plus_1(),
                opts.k + 1
            ))),
            _ => Ok(()),
        },
    }
}

/// Runs a suite over `corpus` (for the borrowed suite, over all small
/// graphs plus the corpus). Records come out sorted by certificate whatever
/// the number of jobs.
pub fn verify_corpus(corpus: Option<&Corpus>, opts: &VerifyOptions) -> Result<Report> {
    check_suite_class(opts, corpus)?;
    let graphs: Vec<Graph> = match (opts.suite, corpus) {
        (Suite::Borrowed, c) => borrowed_graphs(opts.n_max, c)?,
        (_, Some(c)) => c.graphs().cloned().collect(),
        (_, None) => return Err(Error::Precondition(format!("the {} suite needs a corpus", opts.suite))),
    };
    let run = |g: &Graph| match opts.suite {
        Suite::Main => verify_main(g),
        Suite::OneMod => verify_one_mod(g, opts.k),
        Suite::Structure => verify_structure(g),
        Suite::Borrowed => verify_borrowed(g),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start {} workers: {e}", opts.jobs)))?;
    let mut records: Vec<VerificationRecord> = pool.install(|| graphs.par_iter().map(run).collect());
    records.sort_by(|a, b| a.cert.cmp(&b.cert));
    records.dedup_by(|a, b| a.cert == b.cert);
    if opts.fail_fast {
        if let Some(i) = records.iter().position(|r| r.failed()) {
            records.truncate(i + 1);
        }
    }
    Ok(Report { suite: opts.suite, records })
}
