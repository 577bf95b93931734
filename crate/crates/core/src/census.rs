//! Cycle enumeration, residue-class census, and the two borrowed existence
//! checks: good cycles under a low-degree condition, and admissible path
//! families between two vertices.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{bit, members, Edge, Graph};

/// Default number of cycles a census keeps explicitly.
pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// Environment variable that overrides [`DEFAULT_CYCLE_CAP`].
pub const CYCLE_CAP_ENV: &str = "MODK_CYCLE_CAP";

pub fn cycle_cap_from_env() -> usize {
    std::env::var(CYCLE_CAP_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_CYCLE_CAP)
}

/// An undirected cycle, stored as the lexicographically least of its
/// rotations and reflections: it starts at its minimum vertex and proceeds
/// toward the smaller of that vertex's two cycle neighbors.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleSeq(Vec<usize>);

impl CycleSeq {
    /// Canonicalizes a cyclic vertex sequence. Does not check edges; see
    /// [`CycleSeq::is_cycle_of`].
    pub fn new(seq: &[usize]) -> Result<Self> {
        let len = seq.len();
        if len < 3 {
            return Err(Error::Precondition(format!("a cycle needs at least 3 vertices, got {len}")));
        }
        let mut seen = 0u128;
        for &v in seq {
            if v >= 128 || seen & (1u128 << v) != 0 {
                return Err(Error::Precondition(format!("vertex {v} repeated or out of range in cycle")));
            }
            seen |= 1u128 << v;
        }
        let (start, _) = seq.iter().enumerate().min_by_key(|(_, &v)| v).expect("nonempty");
        let next = seq[(start + 1) % len];
        let prev = seq[(start + len - 1) % len];
        let out = if next < prev {
            (0..len).map(|i| seq[(start + i) % len]).collect()
        } else {
            (0..len).map(|i| seq[(start + len - i) % len]).collect()
        };
        Ok(CycleSeq(out))
    }

    /// Wraps a sequence already in canonical form.
    pub(crate) fn from_canonical(seq: Vec<usize>) -> Self {
        debug_assert_eq!(CycleSeq::new(&seq).map(|c| c.0).ok(), Some(seq.clone()));
        CycleSeq(seq)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vertex_set(&self) -> u64 {
        self.0.iter().fold(0, |m, &v| m | bit(v))
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let len = self.0.len();
        (0..len).map(move |i| Edge::new(self.0[i], self.0[(i + 1) % len]))
    }

    pub fn uses_edge(&self, e: Edge) -> bool {
        self.edges().any(|f| f == e)
    }

    /// Whether every consecutive pair (cyclically) is an edge of `g`.
    pub fn is_cycle_of(&self, g: &Graph) -> bool {
        self.0.iter().all(|&v| v < g.n()) && self.edges().all(|e| g.has_edge(e.u, e.v))
    }
}

impl fmt::Debug for CycleSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycleSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

impl Serialize for CycleSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Calls `visit` once per cycle of length at most `max_len` (all cycles if
/// `None`), with the cycle already in canonical form. Stops early when the
/// visitor breaks.
///
/// Unbounded enumeration runs Johnson's circuit search on the symmetric
/// digraph restricted to vertices `>= s` for each start `s`, keeping one of
/// the two orientations. A length bound breaks Johnson's blocking argument,
/// so bounded enumeration falls back to depth-limited backtracking.
pub fn visit_cycles<B>(
    g: &Graph,
    max_len: Option<usize>,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> Option<B> {
    let n = g.n();
    let bounded = max_len.filter(|&l| l < n);
    for s in 0..n {
        let allowed = g.all_vertices() & !((bit(s) << 1) - 1) | bit(s);
        if (g.neighbors(s) & allowed).count_ones() < 2 {
            continue;
        }
        let mut walker = Walker { g, s, allowed, stack: Vec::with_capacity(n), blocked: 0, b: vec![0; n] };
        let flow = match bounded {
            Some(limit) => walker.bounded(s, limit, &mut visit),
            None => walker.circuit(s, &mut visit).map_continue(|_| ()),
        };
        if let ControlFlow::Break(b) = flow {
            return Some(b);
        }
    }
    None
}

struct Walker<'a> {
    g: &'a Graph,
    s: usize,
    allowed: u64,
    stack: Vec<usize>,
    blocked: u64,
    b: Vec<u64>,
}

impl Walker<'_> {
    fn unblock(&mut self, u: usize) {
        self.blocked &= !bit(u);
        let waiting = std::mem::take(&mut self.b[u]);
        for w in members(waiting) {
            if self.blocked & bit(w) != 0 {
                self.unblock(w);
            }
        }
    }

    /// Johnson's CIRCUIT. Continue carries whether a circuit closed below `v`.
    fn circuit<B>(
        &mut self,
        v: usize,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<B>,
    ) -> ControlFlow<B, bool> {
        let mut found = false;
        self.stack.push(v);
        self.blocked |= bit(v);
        let nbrs = self.g.neighbors(v) & self.allowed;
        for w in members(nbrs) {
            if w == self.s {
                found = true;
                let len = self.stack.len();
                if len >= 3 && self.stack[1] < self.stack[len - 1] {
                    visit(&self.stack)?;
                }
            } else if self.blocked & bit(w) == 0 && self.circuit(w, visit)? {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for w in members(nbrs) {
                self.b[w] |= bit(v);
            }
        }
        self.stack.pop();
        ControlFlow::Continue(found)
    }

    fn bounded<B>(
        &mut self,
        v: usize,
        limit: usize,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        self.stack.push(v);
        self.blocked |= bit(v);
        let len = self.stack.len();
        for w in members(self.g.neighbors(v) & self.allowed) {
            if w == self.s {
                if len >= 3 && self.stack[1] < self.stack[len - 1] {
                    visit(&self.stack)?;
                }
            } else if self.blocked & bit(w) == 0 && len < limit {
                self.bounded(w, limit, visit)?;
            }
        }
        self.blocked &= !bit(v);
        self.stack.pop();
        ControlFlow::Continue(())
    }
}

/// Every cycle of length at most `max_len` (or every cycle), each once.
pub fn enumerate_cycles(g: &Graph, max_len: Option<usize>) -> Vec<CycleSeq> {
    let mut out = Vec::new();
    visit_cycles::<()>(g, max_len, |c| {
        out.push(CycleSeq::from_canonical(c.to_vec()));
        ControlFlow::Continue(())
    });
    out
}

/// Cycle counts by length residue modulo `r`, with vertex and edge
/// incidence tallies for one residue class.
#[derive(Clone, Debug)]
pub struct CycleCensus {
    n: usize,
    r: usize,
    residue: usize,
    counts: Vec<u64>,
    vertex_incidence: Vec<u64>,
    /// Row-major `n * n`, symmetric.
    edge_incidence: Vec<u64>,
    cycles: Option<Vec<CycleSeq>>,
}

impl CycleCensus {
    pub fn modulus(&self) -> usize {
        self.r
    }

    pub fn residue(&self) -> usize {
        self.residue
    }

    /// `counts()[j]` is the number of cycles with length congruent to `j`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, residue: usize) -> u64 {
        self.counts[residue % self.r]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Cycles in the designated residue class through each vertex.
    pub fn vertex_incidence(&self) -> &[u64] {
        &self.vertex_incidence
    }

    pub fn edge_incidence(&self, e: Edge) -> u64 {
        self.edge_incidence[e.u * self.n + e.v]
    }

    /// Incidence for each edge of `g`, in edge order.
    pub fn edge_incidences(&self, g: &Graph) -> Vec<(Edge, u64)> {
        g.edges().map(|e| (e, self.edge_incidence(e))).collect()
    }

    /// Every cycle, if the census stayed under its storage cap.
    pub fn cycles(&self) -> Option<&[CycleSeq]> {
        self.cycles.as_deref()
    }

    /// Stored cycles whose length is congruent to `residue`.
    pub fn cycles_in_class(&self, residue: usize) -> Option<Vec<&CycleSeq>> {
        let r = self.r;
        self.cycles.as_ref().map(|cs| cs.iter().filter(|c| c.len() % r == residue % r).collect())
    }
}

/// Census using the cap from the environment (or the default).
pub fn census_mod(g: &Graph, r: usize, residue: usize) -> Result<CycleCensus> {
    census_mod_capped(g, r, residue, cycle_cap_from_env())
}

/// Census keeping at most `cap` cycles explicitly. Counts and incidences are
/// exact regardless of the cap.
pub fn census_mod_capped(g: &Graph, r: usize, residue: usize, cap: usize) -> Result<CycleCensus> {
    if r < 2 {
        return Err(Error::Precondition(format!("modulus must be at least 2, got {r}")));
    }
    if residue >= r {
        return Err(Error::Precondition(format!("residue {residue} not in 0..{r}")));
    }
    let n = g.n();
    let mut census = CycleCensus {
        n,
        r,
        residue,
        counts: vec![0; r],
        vertex_incidence: vec![0; n],
        edge_incidence: vec![0; n * n],
        cycles: Some(Vec::new()),
    };
    visit_cycles::<()>(g, None, |c| {
        let len = c.len();
        census.counts[len % r] += 1;
        if len % r == residue {
            for i in 0..len {
                census.vertex_incidence[c[i]] += 1;
                let (a, b) = (c[i], c[(i + 1) % len]);
                census.edge_incidence[a * n + b] += 1;
                census.edge_incidence[b * n + a] += 1;
            }
        }
        if let Some(store) = census.cycles.as_mut() {
            if store.len() < cap {
                store.push(CycleSeq::from_canonical(c.to_vec()));
            } else {
                census.cycles = None;
            }
        }
        ControlFlow::Continue(())
    });
    Ok(census)
}

/// Outcome of searching for a cycle of length divisible by 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChenSaito {
    Witness(CycleSeq),
    /// No such cycle although the degree hypothesis holds. This would refute
    /// the cited theorem; callers must treat it as a counterexample.
    Violation,
}

/// For a graph with `n >= 2` and at most one vertex of degree `<= 2`,
/// returns a cycle whose length is divisible by 3.
pub fn check_chen_saito(g: &Graph) -> Result<ChenSaito> {
    if g.n() < 2 {
        return Err(Error::Precondition("needs at least 2 vertices".into()));
    }
    let low = (0..g.n()).filter(|&v| g.degree(v) <= 2).count();
    if low > 1 {
        return Err(Error::Precondition(format!("{low} vertices of degree at most 2")));
    }
    let witness = visit_cycles(g, None, |c| {
        if c.len() % 3 == 0 {
            ControlFlow::Break(CycleSeq::from_canonical(c.to_vec()))
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(witness.map_or(ChenSaito::Violation, ChenSaito::Witness))
}

/// Visits every simple `x`-`y` path in lexicographic order of vertex
/// sequences.
pub fn visit_paths<B>(g: &Graph, x: usize, y: usize, mut visit: impl FnMut(&[usize]) -> ControlFlow<B>) -> Option<B> {
    fn go<B>(
        g: &Graph,
        y: usize,
        path: &mut Vec<usize>,
        used: u64,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        let v = *path.last().expect("path starts at x");
        for w in members(g.neighbors(v) & !used) {
            path.push(w);
            if w == y {
                visit(path)?;
            } else {
                go(g, y, path, used | bit(w), visit)?;
            }
            path.pop();
        }
        ControlFlow::Continue(())
    }
    let mut path = vec![x];
    match go(g, y, &mut path, bit(x), &mut visit) {
        ControlFlow::Break(b) => Some(b),
        ControlFlow::Continue(()) => None,
    }
}

/// Looks for `ell` simple `x`-`y` paths, each with at least two edges, whose
/// lengths form an arithmetic progression with common difference 1 or 2.
///
/// Among qualifying length progressions the lexicographically smallest is
/// chosen, and for each length the lexicographically least path. Returns
/// `None` when no family exists.
pub fn find_admissible_paths(g: &Graph, x: usize, y: usize, ell: usize) -> Result<Option<Vec<Vec<usize>>>> {
    if x == y || x >= g.n() || y >= g.n() {
        return Err(Error::Precondition(format!("endpoints {x},{y} must be distinct vertices")));
    }
    if ell == 0 {
        return Err(Error::Precondition("ell must be at least 1".into()));
    }
    let mut by_length: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    visit_paths::<()>(g, x, y, |p| {
        let len = p.len() - 1;
        if len >= 2 {
            by_length.entry(len).or_insert_with(|| p.to_vec());
        }
        ControlFlow::Continue(())
    });
    for &start in by_length.keys() {
        for step in [1, 2] {
            if (0..ell).all(|j| by_length.contains_key(&(start + j * step))) {
                let family = (0..ell).map(|j| by_length[&(start + j * step)].clone()).collect();
                return Ok(Some(family));
            }
            if ell == 1 {
                break;
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_seq_canonical_under_rotation_and_reflection() {
        let a = CycleSeq::new(&[3, 1, 4, 2]).unwrap();
        assert_eq!(a.vertices(), &[1, 3, 2, 4]);
        assert_eq!(CycleSeq::new(&[4, 1, 3, 2]).unwrap(), a);
        assert_eq!(CycleSeq::new(&[2, 4, 1, 3]).unwrap(), a);
        assert!(CycleSeq::new(&[0, 1]).is_err());
        assert!(CycleSeq::new(&[0, 1, 0]).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let k4 = enumerate_cycles(&Graph::complete(4), None);
        assert_eq!(k4.len(), 7);
        assert_eq!(k4.iter().filter(|c| c.len() == 3).count(), 4);
        assert_eq!(k4.iter().filter(|c| c.len() == 4).count(), 3);

        let c5 = enumerate_cycles(&Graph::cycle(5), None);
        assert_eq!(c5, vec![CycleSeq::new(&[0, 1, 2, 3, 4]).unwrap()]);

        let tree = Graph::from_edges(6, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)]);
        assert!(enumerate_cycles(&tree, None).is_empty());
        assert!(enumerate_cycles(&Graph::empty(0), None).is_empty());
    }

    #[test]
    fn bounded_enumeration() {
        let k5 = Graph::complete(5);
        assert_eq!(enumerate_cycles(&k5, Some(3)).len(), 10);
        assert_eq!(enumerate_cycles(&k5, Some(4)).len(), 25);
        assert_eq!(enumerate_cycles(&k5, Some(5)).len(), 37);
        assert_eq!(enumerate_cycles(&k5, Some(2)).len(), 0);
    }

    #[test]
    fn census_examples() {
        let k4 = Graph::complete(4);
        let c = census_mod(&k4, 3, 0).unwrap();
        assert_eq!(c.counts(), &[4, 3, 0]);
        assert!(c.vertex_incidence().iter().all(|&x| x == 3));
        assert!(c.edge_incidences(&k4).iter().all(|&(_, x)| x == 2));

        let k5 = census_mod(&Graph::complete(5), 4, 0).unwrap();
        assert_eq!((k5.count(0), k5.count(1)), (15, 12));

        assert_eq!(census_mod(&Graph::cycle(5), 3, 0).unwrap().counts(), &[0, 0, 1]);
        assert!(census_mod(&k4, 1, 0).is_err());
        assert!(census_mod(&k4, 3, 3).is_err());
    }

    #[test]
    fn census_cap_drops_storage_but_keeps_counts() {
        let k5 = Graph::complete(5);
        let capped = census_mod_capped(&k5, 3, 0, 5).unwrap();
        let full = census_mod_capped(&k5, 3, 0, 100).unwrap();
        assert!(capped.cycles().is_none());
        assert_eq!(full.cycles().unwrap().len(), 37);
        assert_eq!(capped.counts(), full.counts());
        assert_eq!(capped.vertex_incidence(), full.vertex_incidence());
    }

    #[test]
    fn incidence_sum_matches_lengths() {
        let g = Graph::petersen();
        let c = census_mod(&g, 3, 0).unwrap();
        let class_len: u64 = c.cycles_in_class(0).unwrap().iter().map(|cy| cy.len() as u64).sum();
        assert_eq!(c.vertex_incidence().iter().sum::<u64>(), class_len);
        assert_eq!(c.edge_incidences(&g).iter().map(|&(_, x)| x).sum::<u64>(), class_len);
    }

    #[test]
    fn chen_saito_examples() {
        match check_chen_saito(&Graph::complete(4)).unwrap() {
            ChenSaito::Witness(c) => assert_eq!(c.len(), 3),
            ChenSaito::Violation => panic!("K4 has triangles"),
        }
        let mut k4e = Graph::complete(4);
        k4e.remove_edge(0, 1);
        assert!(matches!(check_chen_saito(&k4e), Err(Error::Precondition(_))));
        let p = Graph::petersen();
        match check_chen_saito(&p).unwrap() {
            ChenSaito::Witness(c) => {
                assert!(c.len() == 6 || c.len() == 9);
                assert!(c.is_cycle_of(&p));
            }
            ChenSaito::Violation => panic!("Petersen has 6-cycles"),
        }
    }

    #[test]
    fn admissible_examples() {
        let k4 = Graph::complete(4);
        let fam = find_admissible_paths(&k4, 0, 1, 2).unwrap().unwrap();
        assert_eq!(fam, vec![vec![0, 2, 1], vec![0, 2, 3, 1]]);

        assert_eq!(find_admissible_paths(&Graph::cycle(5), 0, 1, 2).unwrap(), None);

        let k5 = Graph::complete(5);
        let fam = find_admissible_paths(&k5, 1, 3, 3).unwrap().unwrap();
        let lens: Vec<usize> = fam.iter().map(|p| p.len() - 1).collect();
        assert_eq!(lens, vec![2, 3, 4]);
        for p in &fam {
            assert_eq!((p[0], *p.last().unwrap()), (1, 3));
            assert!(p.windows(2).all(|w| k5.has_edge(w[0], w[1])));
        }
        assert!(find_admissible_paths(&k5, 1, 1, 2).is_err());
    }

    #[test]
    fn admissible_uses_step_two_when_needed() {
        // Two internally disjoint x-y paths of lengths 2 and 4: only step 2 fits.
        let g = Graph::from_edges(6, &[(0, 2), (2, 1), (0, 3), (3, 4), (4, 5), (5, 1)]);
        let fam = find_admissible_paths(&g, 0, 1, 2).unwrap().unwrap();
        assert_eq!(fam, vec![vec![0, 2, 1], vec![0, 3, 4, 5, 1]]);
    }
}
