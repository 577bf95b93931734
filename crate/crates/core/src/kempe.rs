//! σ-subdigraphs of properly colored graphs, Kempe-style color shifts, and
//! the cycle constructions built on them.
//!
//! Given a proper coloring φ and a cyclic permutation σ of some colors, the
//! σ-subdigraph has an arc `u -> w` exactly when `uw` is an edge and
//! `σ(φ(u)) = φ(w)`. Shifting the colors of any set closed under these arcs
//! by σ keeps the coloring proper. Every construction below runs the same
//! argument: if a required directed path were missing, the shift would
//! produce a coloring that cannot exist, so a missing path is reported as an
//! [`Error::Invariant`] rather than as an ordinary failure.

use std::collections::{BTreeMap, BTreeSet};

use crate::census::{enumerate_cycles, CycleSeq};
use crate::coloring::{find_coloring, is_colorable, is_critical, is_proper, Color, Coloring, Prescription};
use crate::error::{Error, Result};
use crate::graph::{bit, members, Edge, Graph, VertexSet};

/// A cyclic permutation of `r` distinct colors: `ring[j]` maps to
/// `ring[j + 1]`, the last back to the first.
///
/// The ring is stored rotated so that its smallest color comes first, which
/// makes equality mean equality of permutations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicPerm {
    ring: Vec<Color>,
}

impl CyclicPerm {
    pub fn new(ring: &[Color]) -> Result<Self> {
        if ring.len() < 2 {
            return Err(Error::Precondition(format!("a cyclic permutation needs 2 or more colors, got {ring:?}")));
        }
        let mut seen = 0u64;
        for &c in ring {
            if c == 0 || c >= 64 || seen & bit(c as usize) != 0 {
                return Err(Error::Precondition(format!("ring {ring:?} has a repeated or invalid color")));
            }
            seen |= bit(c as usize);
        }
        let start = ring.iter().enumerate().min_by_key(|(_, &c)| c).map(|(i, _)| i).expect("nonempty");
        let mut ring = ring.to_vec();
        ring.rotate_left(start);
        Ok(CyclicPerm { ring })
    }

    /// Like [`CyclicPerm::new`], also requiring every color to lie in `1..=k`
    /// and `len <= k`.
    pub fn within(ring: &[Color], k: usize) -> Result<Self> {
        let sigma = CyclicPerm::new(ring)?;
        if sigma.ring.iter().any(|&c| c as usize > k) {
            return Err(Error::Precondition(format!("ring {ring:?} uses a color above {k}")));
        }
        Ok(sigma)
    }

    pub fn ring(&self) -> &[Color] {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }

    pub fn contains(&self, c: Color) -> bool {
        self.ring.contains(&c)
    }

    /// Bit `c` set for each color `c` on the ring.
    pub fn color_mask(&self) -> u64 {
        self.ring.iter().fold(0, |m, &c| m | bit(c as usize))
    }

    pub fn apply(&self, c: Color) -> Option<Color> {
        let j = self.ring.iter().position(|&x| x == c)?;
        Some(self.ring[(j + 1) % self.ring.len()])
    }

    pub fn apply_inverse(&self, c: Color) -> Option<Color> {
        let r = self.ring.len();
        let j = self.ring.iter().position(|&x| x == c)?;
        Some(self.ring[(j + r - 1) % r])
    }

    pub fn inverse(&self) -> CyclicPerm {
        let mut ring = self.ring.clone();
        ring[1..].reverse();
        CyclicPerm { ring }
    }

    /// Replaces color `from` on the ring by `to`.
    pub fn substitute(&self, from: Color, to: Color) -> Result<CyclicPerm> {
        let ring: Vec<Color> = self.ring.iter().map(|&c| if c == from { to } else { c }).collect();
        CyclicPerm::new(&ring)
    }
}

/// Cyclic permutations of `r` colors from `1..=k`, optionally restricted to
/// rings through `through`. With `one_per_inverse_pair`, only the ring whose
/// smallest color is followed by a smaller color than precedes it is kept
/// (for `r >= 3`), giving one of each `{σ, σ⁻¹}`.
pub fn cyclic_perms(k: usize, r: usize, through: Option<Color>, one_per_inverse_pair: bool) -> Vec<CyclicPerm> {
    let mut out = Vec::new();
    if r < 2 || r > k {
        return out;
    }
    let colors: Vec<Color> = (1..=k as Color).collect();
    let mut subset = Vec::with_capacity(r);
    choose(&colors, r, 0, &mut subset, &mut |set: &[Color]| {
        if through.is_some_and(|c| !set.contains(&c)) {
            return;
        }
        let (head, rest) = (set[0], &set[1..]);
        permute(&mut rest.to_vec(), 0, &mut |tail: &[Color]| {
            if one_per_inverse_pair && r >= 3 && tail[0] > tail[tail.len() - 1] {
                return;
            }
            let mut ring = vec![head];
            ring.extend_from_slice(tail);
            out.push(CyclicPerm { ring });
        });
    });
    out.sort();
    out
}

fn choose(items: &[Color], r: usize, from: usize, acc: &mut Vec<Color>, f: &mut impl FnMut(&[Color])) {
    if acc.len() == r {
        f(acc);
        return;
    }
    for i in from..items.len() {
        acc.push(items[i]);
        choose(items, r, i + 1, acc, f);
        acc.pop();
    }
}

fn permute(items: &mut Vec<Color>, at: usize, f: &mut impl FnMut(&[Color])) {
    if at == items.len() {
        f(items);
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, f);
        items.swap(at, i);
    }
}

/// The σ-subdigraph of a properly colored graph.
#[derive(Clone, Debug)]
pub struct SigmaDigraph {
    base: Graph,
    coloring: Coloring,
    sigma: CyclicPerm,
    out: Vec<VertexSet>,
    inn: Vec<VertexSet>,
}

pub fn build_sigma_subdigraph(g: &Graph, c: &Coloring, sigma: &CyclicPerm) -> Result<SigmaDigraph> {
    if c.len() != g.n() {
        return Err(Error::Precondition(format!("coloring covers {} of {} vertices", c.len(), g.n())));
    }
    if !is_proper(g, c) {
        return Err(Error::Precondition("coloring is not proper".into()));
    }
    let n = g.n();
    let classes: Vec<VertexSet> = (0..=c.k().max(sigma.ring.iter().copied().max().unwrap_or(0) as usize))
        .map(|col| c.class(col as Color))
        .collect();
    let mut out = vec![0; n];
    let mut inn = vec![0; n];
    for u in 0..n {
        if let Some(next) = sigma.apply(c.color(u)) {
            out[u] = g.neighbors(u) & classes.get(next as usize).copied().unwrap_or(0);
            for w in members(out[u]) {
                inn[w] |= bit(u);
            }
        }
    }
    Ok(SigmaDigraph { base: g.clone(), coloring: c.clone(), sigma: sigma.clone(), out, inn })
}

impl SigmaDigraph {
    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn sigma(&self) -> &CyclicPerm {
        &self.sigma
    }

    pub fn out_neighbors(&self, u: usize) -> VertexSet {
        self.out[u]
    }

    pub fn in_neighbors(&self, u: usize) -> VertexSet {
        self.inn[u]
    }

    pub fn has_arc(&self, u: usize, w: usize) -> bool {
        u < self.n() && w < self.n() && self.out[u] & bit(w) != 0
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|m| m.count_ones() as usize).sum()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| members(self.out[u]).map(move |w| (u, w)))
    }

    /// Lexicographically least among the shortest directed paths from
    /// `from` to any vertex of `targets`.
    pub fn shortest_path(&self, from: usize, targets: VertexSet) -> Option<Vec<usize>> {
        if targets & bit(from) != 0 {
            return Some(vec![from]);
        }
        // Distances to the target set, by backward BFS.
        let n = self.n();
        let mut dist = vec![usize::MAX; n];
        for t in members(targets) {
            dist[t] = 0;
        }
        let mut frontier = targets;
        let mut seen = targets;
        let mut d = 0;
        while frontier != 0 && dist[from] == usize::MAX {
            d += 1;
            let mut next = 0;
            for w in members(frontier) {
                next |= self.inn[w];
            }
            next &= !seen;
            for u in members(next) {
                dist[u] = d;
            }
            seen |= next;
            frontier = next;
        }
        if dist[from] == usize::MAX {
            return None;
        }
        let mut path = vec![from];
        let mut at = from;
        while dist[at] > 0 {
            at = members(self.out[at]).find(|&w| dist[w] == dist[at] - 1).expect("distance labels are consistent");
            path.push(at);
        }
        Some(path)
    }

    /// Whether consecutive vertices of `walk` are joined by arcs.
    pub fn is_walk(&self, walk: &[usize]) -> bool {
        !walk.is_empty() && walk.iter().all(|&v| v < self.n()) && walk.windows(2).all(|p| self.has_arc(p[0], p[1]))
    }
}

/// Vertices reachable from `v` (including `v`) along arcs of `d`.
pub fn accessible_set(d: &SigmaDigraph, v: usize) -> Result<VertexSet> {
    if v >= d.n() {
        return Err(Error::Precondition(format!("vertex {v} out of range")));
    }
    let mut seen = bit(v);
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        for u in members(frontier) {
            next |= d.out[u];
        }
        next &= !seen;
        seen |= next;
        frontier = next;
    }
    Ok(seen)
}

/// Advances the color of every vertex in `region` along σ.
pub fn kempe_shift(c: &Coloring, sigma: &CyclicPerm, region: VertexSet) -> Result<Coloring> {
    let mut colors = c.colors().to_vec();
    for v in members(region) {
        if v >= colors.len() {
            return Err(Error::Precondition(format!("region vertex {v} out of range")));
        }
        colors[v] = sigma
            .apply(colors[v])
            .ok_or_else(|| Error::Precondition(format!("vertex {v} has color {} outside σ", colors[v])))?;
    }
    Coloring::new(c.k().max(sigma.ring.iter().copied().max().unwrap_or(0) as usize), colors)
}

/// A sequence of vertices with an arc between each consecutive pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedWalk(pub Vec<usize>);

impl DirectedWalk {
    pub fn is_closed(&self) -> bool {
        self.0.len() >= 2 && self.0.first() == self.0.last()
    }
}

/// Splits a closed walk into directed cycles whose arcs, with multiplicity,
/// are exactly the walk's arcs. Each cycle is listed by its vertices in
/// order, without repeating the first.
///
/// The walk is scanned once with a stack; whenever the current vertex is
/// already on the stack, the stack segment from it onward is popped as a
/// cycle. Cycles come out in scan order.
pub fn decompose_closed_walk(d: &SigmaDigraph, walk: &DirectedWalk) -> Result<Vec<Vec<usize>>> {
    if !walk.is_closed() {
        return Err(Error::Precondition("walk is not closed".into()));
    }
    if !d.is_walk(&walk.0) {
        return Err(Error::Precondition("walk uses a non-arc step".into()));
    }
    let n = d.n();
    let mut pos = vec![usize::MAX; n];
    let mut stack: Vec<usize> = Vec::with_capacity(walk.0.len());
    let mut cycles = Vec::new();
    for &v in &walk.0 {
        if pos[v] != usize::MAX {
            let at = pos[v];
            let cycle: Vec<usize> = stack.drain(at..).collect();
            for &u in &cycle {
                pos[u] = usize::MAX;
            }
            cycles.push(cycle);
        }
        pos[v] = stack.len();
        stack.push(v);
    }
    debug_assert_eq!(stack.len(), 1);
    Ok(cycles)
}

fn zero_mod_bound(k: usize, r: usize) -> usize {
    (1..r).map(|i| k - i).product::<usize>() / 2
}

/// Cycles of length `0 mod r` in `g - e`, one for each pair `{σ, σ⁻¹}` of
/// cyclic `r`-permutations through the color of the first endpoint `x`.
///
/// A fixed `k`-coloring of `g - e` colors both ends alike. Each σ-subdigraph
/// holds directed paths `x -> y` and `y -> x`; their concatenation is a
/// closed walk, and the first cycle through `x` in its decomposition is
/// emitted. Requires `χ(g) = k + 1`, `χ(g - e) = k`, and `3 <= r <= k`.
pub fn extract_zero_mod_r(g: &Graph, e: Edge, r: usize, k: usize) -> Result<BTreeSet<CycleSeq>> {
    if !(3..=k).contains(&r) {
        return Err(Error::Precondition(format!("need 3 <= r <= k, got r = {r}, k = {k}")));
    }
    if e.v >= g.n() || !g.has_edge(e.u, e.v) {
        return Err(Error::Precondition(format!("{e} is not an edge")));
    }
    let ge = g.without_edge(e);
    if is_colorable(g, k) {
        return Err(Error::Precondition(format!("graph is {k}-colorable")));
    }
    let phi = find_coloring(&ge, k, &Prescription::none())?
        .ok_or_else(|| Error::Precondition(format!("graph minus {e} is not {k}-colorable")))?;
    extract_zero_mod_r_with(&ge, e, r, k, &phi)
}

/// [`extract_zero_mod_r`] on `g - e` with a given coloring `phi` of it.
pub fn extract_zero_mod_r_with(
    ge: &Graph,
    e: Edge,
    r: usize,
    k: usize,
    phi: &Coloring,
) -> Result<BTreeSet<CycleSeq>> {
    let (x, y) = (e.u, e.v);
    if phi.color(x) != phi.color(y) {
        return Err(Error::Invariant(format!("endpoints of {e} colored differently; the graph would be {k}-colorable")));
    }
    let mut found = BTreeSet::new();
    for sigma in cyclic_perms(k, r, Some(phi.color(x)), true) {
        let d = build_sigma_subdigraph(ge, phi, &sigma)?;
        let missing = || Error::Invariant(format!("no directed {x}-{y} connection under σ = {:?}", sigma.ring));
        let forth = d.shortest_path(x, bit(y)).ok_or_else(missing)?;
        let back = d.shortest_path(y, bit(x)).ok_or_else(missing)?;
        let mut walk = forth;
        walk.extend_from_slice(&back[1..]);
        let cycles = decompose_closed_walk(&d, &DirectedWalk(walk))?;
        let through_x = cycles.into_iter().find(|c| c.contains(&x)).expect("every walk vertex lies on a cycle");
        let cycle = CycleSeq::new(&through_x)?;
        if cycle.len() % r != 0 {
            return Err(Error::Invariant(format!("directed cycle {cycle} has length not divisible by {r}")));
        }
        found.insert(cycle);
    }
    let bound = zero_mod_bound(k, r);
    if found.len() < bound {
        return Err(Error::Invariant(format!("found {} cycles, fewer than the bound {bound}", found.len())));
    }
    Ok(found)
}

/// Hypotheses shared by [`lemma_paths`] and [`build_injection_f`]: `g` is
/// `(k+1)`-critical with minimum degree `k`, `v` has degree `k`, and `c`
/// properly colors `g - v` giving each neighbor of `v` its own color.
/// Returns the neighbor holding each color, indexed by color.
fn check_degree_k_setup(g: &Graph, v: usize, c: &Coloring, check_critical: bool) -> Result<Vec<usize>> {
    let k = c.k();
    if k < 3 {
        return Err(Error::Precondition(format!("need k >= 3, got {k}")));
    }
    if v >= g.n() || g.degree(v) != k {
        return Err(Error::Precondition(format!("vertex {v} does not have degree {k}")));
    }
    if (0..g.n()).any(|u| g.degree(u) < k) {
        return Err(Error::Precondition(format!("minimum degree is below {k}")));
    }
    if c.len() != g.n() || !is_proper(&g.isolate(v), c) {
        return Err(Error::Precondition("coloring is not a proper coloring of g - v".into()));
    }
    let mut holder = vec![usize::MAX; k + 1];
    for w in members(g.neighbors(v)) {
        let col = c.color(w) as usize;
        if holder[col] != usize::MAX {
            return Err(Error::Precondition(format!("two neighbors of {v} share color {col}")));
        }
        holder[col] = w;
    }
    if check_critical && !is_critical(g, k + 1) {
        return Err(Error::Precondition(format!("graph is not {}-critical", k + 1)));
    }
    Ok(holder)
}

/// For each color `i` on σ, a directed path from the neighbor of `v` colored
/// `i` to the neighbor colored `σ⁻¹(i)`, inside the σ-subdigraph of `g - v`.
///
/// Each path comes from a shortest directed path to `v` in the σ-subdigraph
/// of `g` minus the edge to the color-`i` neighbor, with `v` recolored `i`,
/// by dropping its final vertex.
pub fn lemma_paths(g: &Graph, v: usize, c: &Coloring, sigma: &CyclicPerm) -> Result<BTreeMap<Color, Vec<usize>>> {
    let holder = check_degree_k_setup(g, v, c, true)?;
    lemma_paths_with(g, v, c, sigma, &holder)
}

fn lemma_paths_with(
    g: &Graph,
    v: usize,
    c: &Coloring,
    sigma: &CyclicPerm,
    holder: &[usize],
) -> Result<BTreeMap<Color, Vec<usize>>> {
    let k = c.k();
    if sigma.len() < 3 || sigma.ring.iter().any(|&col| col as usize > k) {
        return Err(Error::Precondition(format!("σ = {:?} is not a cyclic r-permutation of 1..={k}, r >= 3", sigma.ring)));
    }
    let mut paths = BTreeMap::new();
    for &i in sigma.ring() {
        let vi = holder[i as usize];
        let target = holder[sigma.apply_inverse(i).expect("i is on σ") as usize];
        let mut h = g.clone();
        h.remove_edge(v, vi);
        let d = build_sigma_subdigraph(&h, &c.with_color(v, i), sigma)?;
        let q = d
            .shortest_path(vi, bit(v))
            .ok_or_else(|| Error::Invariant(format!("no directed path from {vi} to {v} for color {i}")))?;
        let pred = q[q.len() - 2];
        if pred != target {
            return Err(Error::Invariant(format!("path to {v} enters from {pred}, expected {target}")));
        }
        paths.insert(i, q[..q.len() - 1].to_vec());
    }
    Ok(paths)
}

/// The neighbor-color prescription `φ(v_i) = i`, with neighbors of `v`
/// taken in increasing order.
pub fn neighbor_prescription(g: &Graph, v: usize) -> Prescription {
    Prescription(members(g.neighbors(v)).enumerate().map(|(i, w)| (w, (i + 1) as Color)).collect())
}

/// A proper `k`-coloring of `g - v` with `φ(v_i) = i`, or an error if none
/// exists. `v` itself gets whatever color the search leaves it.
pub fn prescribed_coloring(g: &Graph, v: usize, k: usize) -> Result<Coloring> {
    find_coloring(&g.isolate(v), k, &neighbor_prescription(g, v))?
        .ok_or_else(|| Error::Precondition(format!("g - {v} has no {k}-coloring with distinct neighbor colors")))
}

/// Smallest vertex of degree `k`.
pub fn min_degree_vertex(g: &Graph, k: usize) -> Option<usize> {
    (0..g.n()).find(|&v| g.degree(v) == k)
}

/// The injection from cycles of length at most `k` in `K_{k+1}` (vertices
/// `1..=k+1`) to cycles of `g`, with `|f(C)|` divisible by `|C|` and `v`
/// on `f(C)` exactly when `k + 1` is on `C`.
///
/// Cycles avoiding `k + 1` are read as σ and mapped through the closed walk
/// concatenating the lemma paths in the order `i, σ⁻¹(i), …, σ(i)`. Cycles
/// through `k + 1` have that color replaced by the least color `i` off the
/// ring, giving σ′, and use the closed walk `v, R^{σ′(i)}, R^i, v` in the
/// σ′-subdigraph of `g - vv_i` with `v` colored `i`. In both cases the first
/// qualifying cycle of the walk's decomposition is taken.
pub fn build_injection_f(g: &Graph, v: usize, c: &Coloring, k: usize) -> Result<BTreeMap<CycleSeq, CycleSeq>> {
    if c.k() != k {
        return Err(Error::Precondition(format!("coloring uses {} colors, expected {k}", c.k())));
    }
    let holder = check_degree_k_setup(g, v, c, true)?;
    let domain: Vec<CycleSeq> = enumerate_cycles(&Graph::complete(k + 1), Some(k))
        .into_iter()
        .map(|cy| CycleSeq::new(&cy.vertices().iter().map(|&u| u + 1).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let top = (k + 1) as Color;
    let g_minus_v = g.isolate(v);
    let mut f = BTreeMap::new();
    let mut images: BTreeMap<CycleSeq, CycleSeq> = BTreeMap::new();
    for cyc in domain {
        let ring: Vec<Color> = cyc.vertices().iter().map(|&u| u as Color).collect();
        let sigma = CyclicPerm::new(&ring)?;
        let image = if !sigma.contains(top) {
            let paths = lemma_paths_with(g, v, c, &sigma, &holder)?;
            let start = sigma.ring()[0];
            let mut walk = vec![holder[start as usize]];
            let mut col = start;
            for _ in 0..sigma.len() {
                walk.extend_from_slice(&paths[&col][1..]);
                col = sigma.apply_inverse(col).expect("on ring");
            }
            let d = build_sigma_subdigraph(&g_minus_v, c, &sigma)?;
            let cycles = decompose_closed_walk(&d, &DirectedWalk(walk))?;
            let first = cycles.into_iter().next().expect("a closed walk has a cycle");
            CycleSeq::new(&first)?
        } else {
            let i = (1..=k as Color).find(|&x| !sigma.contains(x)).expect("r <= k leaves a color off σ");
            let shifted = sigma.substitute(top, i)?;
            let paths = lemma_paths_with(g, v, c, &shifted, &holder)?;
            let next = shifted.apply(i).expect("i is on σ′");
            let mut walk = vec![v];
            walk.extend_from_slice(&paths[&next]);
            walk.extend_from_slice(&paths[&i][1..]);
            walk.push(v);
            let mut h = g.clone();
            h.remove_edge(v, holder[i as usize]);
            let d = build_sigma_subdigraph(&h, &c.with_color(v, i), &shifted)?;
            let cycles = decompose_closed_walk(&d, &DirectedWalk(walk))?;
            let through_v = cycles
                .into_iter()
                .find(|cy| cy.contains(&v))
                .ok_or_else(|| Error::Invariant(format!("walk for {cyc} decomposes without a cycle through {v}")))?;
            CycleSeq::new(&through_v)?
        };
        if image.len() % cyc.len() != 0 {
            return Err(Error::Invariant(format!("f({cyc}) = {image} has length not divisible by {}", cyc.len())));
        }
        if image.contains(v) != cyc.contains(k + 1) {
            return Err(Error::Invariant(format!("f({cyc}) = {image} disagrees on containing {v}")));
        }
        if let Some(prev) = images.insert(image.clone(), cyc.clone()) {
            return Err(Error::Invariant(format!("f({prev}) = f({cyc}) = {image}: not injective")));
        }
        f.insert(cyc, image);
    }
    Ok(f)
}

/// Cycles of length `1 mod k` through `v` in a `(k+1)`-critical graph.
///
/// With a fixed `k`-coloring of `g - v` and `N_i` the neighbors of `v`
/// colored `i`: for each color `i` and each cyclic ordering σ of all `k`
/// colors, take the σ-subdigraph of `g` minus the edges from `v` to `N_i`,
/// with `v` colored `i`, and close a shortest directed path from `v` into
/// `N_i` with its last edge back to `v`. All `k!` pairs are tried; at least
/// `k!/2` distinct cycles result.
pub fn extract_one_mod_k(g: &Graph, v: usize, k: usize) -> Result<BTreeSet<CycleSeq>> {
    if k < 3 {
        return Err(Error::Precondition(format!("need k >= 3, got {k}")));
    }
    if v >= g.n() {
        return Err(Error::Precondition(format!("vertex {v} out of range")));
    }
    if !is_critical(g, k + 1) {
        return Err(Error::Precondition(format!("graph is not {}-critical", k + 1)));
    }
    let phi = find_coloring(&g.isolate(v), k, &Prescription::none())?
        .ok_or_else(|| Error::Invariant(format!("g - {v} is not {k}-colorable")))?;
    extract_one_mod_k_with(g, v, k, &phi)
}

/// [`extract_one_mod_k`] with a given coloring of `g - v`.
pub fn extract_one_mod_k_with(g: &Graph, v: usize, k: usize, phi: &Coloring) -> Result<BTreeSet<CycleSeq>> {
    let perms = cyclic_perms(k, k, None, false);
    let mut found = BTreeSet::new();
    for i in 1..=k as Color {
        let ni = g.neighbors(v) & phi.class(i);
        if ni == 0 {
            return Err(Error::Invariant(format!("no neighbor of {v} has color {i}; the graph would be {k}-colorable")));
        }
        let mut gi = g.clone();
        for w in members(ni) {
            gi.remove_edge(v, w);
        }
        let phi_i = phi.with_color(v, i);
        for sigma in &perms {
            let d = build_sigma_subdigraph(&gi, &phi_i, sigma)?;
            let path = d.shortest_path(v, ni).ok_or_else(|| {
                Error::Invariant(format!("no directed path from {v} into color {i} under σ = {:?}", sigma.ring))
            })?;
            let cycle = CycleSeq::new(&path)?;
            if cycle.len() % k != 1 {
                return Err(Error::Invariant(format!("cycle {cycle} has length not 1 mod {k}")));
            }
            found.insert(cycle);
        }
    }
    let bound: usize = (1..=k).product::<usize>() / 2;
    if found.len() < bound {
        return Err(Error::Invariant(format!("found {} cycles through {v}, fewer than {bound}", found.len())));
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(k: usize, cs: &[Color]) -> Coloring {
        Coloring::new(k, cs.to_vec()).unwrap()
    }

    #[test]
    fn cyclic_perm_basics() {
        let s = CyclicPerm::new(&[2, 3, 1]).unwrap();
        assert_eq!(s.ring(), &[1, 2, 3]);
        assert_eq!(s, CyclicPerm::new(&[3, 1, 2]).unwrap());
        assert_eq!(s.apply(3), Some(1));
        assert_eq!(s.apply_inverse(1), Some(3));
        assert_eq!(s.apply(4), None);
        assert_eq!(s.inverse().ring(), &[1, 3, 2]);
        assert_eq!(s.inverse().inverse(), s);
        assert!(CyclicPerm::new(&[1]).is_err());
        assert!(CyclicPerm::new(&[1, 2, 1]).is_err());
        assert!(CyclicPerm::within(&[1, 5], 4).is_err());
    }

    #[test]
    fn cyclic_perm_counts() {
        // (r-1)! rings per r-subset; half of them per inverse pair.
        assert_eq!(cyclic_perms(4, 3, None, false).len(), 8);
        assert_eq!(cyclic_perms(4, 3, None, true).len(), 4);
        assert_eq!(cyclic_perms(4, 4, None, false).len(), 6);
        assert_eq!(cyclic_perms(5, 4, Some(2), true).len(), zero_mod_bound(5, 4));
        assert_eq!(cyclic_perms(3, 2, None, true).len(), 3);
        for s in cyclic_perms(5, 3, None, true) {
            assert!(!cyclic_perms(5, 3, None, true).contains(&s.inverse()));
        }
    }

    #[test]
    fn sigma_digraph_examples() {
        let tri = Graph::complete(3);
        let s123 = CyclicPerm::new(&[1, 2, 3]).unwrap();
        let d = build_sigma_subdigraph(&tri, &col(3, &[1, 2, 3]), &s123).unwrap();
        let arcs: Vec<_> = d.arcs().collect();
        assert_eq!(arcs, vec![(0, 1), (1, 2), (2, 0)]);

        let path = Graph::path(3);
        let d = build_sigma_subdigraph(&path, &col(3, &[1, 2, 1]), &s123).unwrap();
        assert_eq!(d.arcs().collect::<Vec<_>>(), vec![(0, 1), (2, 1)]);

        let d = build_sigma_subdigraph(&path, &col(5, &[1, 2, 1]), &CyclicPerm::new(&[3, 4, 5]).unwrap()).unwrap();
        assert_eq!(d.arc_count(), 0);

        assert!(build_sigma_subdigraph(&tri, &col(3, &[1, 1, 2]), &s123).is_err());
    }

    #[test]
    fn accessible_set_examples() {
        let s123 = CyclicPerm::new(&[1, 2, 3]).unwrap();
        let tri = build_sigma_subdigraph(&Graph::complete(3), &col(3, &[1, 2, 3]), &s123).unwrap();
        assert_eq!(accessible_set(&tri, 1).unwrap(), 0b111);
        let path = build_sigma_subdigraph(&Graph::path(3), &col(3, &[1, 2, 1]), &s123).unwrap();
        assert_eq!(accessible_set(&path, 0).unwrap(), 0b011);
        let lone = build_sigma_subdigraph(&Graph::empty(2), &col(3, &[1, 2]), &s123).unwrap();
        assert_eq!(accessible_set(&lone, 1).unwrap(), 0b10);
        assert!(accessible_set(&lone, 2).is_err());
    }

    #[test]
    fn kempe_shift_examples() {
        let s123 = CyclicPerm::new(&[1, 2, 3]).unwrap();
        let path = Graph::path(3);
        let c = col(3, &[1, 2, 1]);
        let shifted = kempe_shift(&c, &s123, 0b011).unwrap();
        assert_eq!(shifted.colors(), &[2, 3, 1]);
        assert!(is_proper(&path, &shifted));
        assert_eq!(kempe_shift(&c, &s123, 0).unwrap(), c);

        let tri = Graph::complete(3);
        let rotated = kempe_shift(&col(3, &[1, 2, 3]), &s123, 0b111).unwrap();
        assert_eq!(rotated.colors(), &[2, 3, 1]);
        assert!(is_proper(&tri, &rotated));

        let s12 = CyclicPerm::new(&[1, 2]).unwrap();
        assert!(kempe_shift(&col(3, &[3, 1]), &s12, 0b01).is_err());
    }

    #[test]
    fn decompose_examples() {
        // a->b->a needs a 2-color ring.
        let edge = Graph::path(2);
        let d2 = build_sigma_subdigraph(&edge, &col(2, &[1, 2]), &CyclicPerm::new(&[1, 2]).unwrap()).unwrap();
        let cycles = decompose_closed_walk(&d2, &DirectedWalk(vec![0, 1, 0])).unwrap();
        assert_eq!(cycles, vec![vec![0, 1]]);

        let s123 = CyclicPerm::new(&[1, 2, 3]).unwrap();
        let tri = build_sigma_subdigraph(&Graph::complete(3), &col(3, &[1, 2, 3]), &s123).unwrap();
        let cycles = decompose_closed_walk(&tri, &DirectedWalk(vec![0, 1, 2, 0, 1, 2, 0])).unwrap();
        assert_eq!(cycles, vec![vec![0, 1, 2], vec![0, 1, 2]]);

        // Bowtie with centre 0 colored 1: a->b->c->a->d->e->a.
        let bowtie = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]);
        let d = build_sigma_subdigraph(&bowtie, &col(3, &[1, 2, 3, 2, 3]), &s123).unwrap();
        let cycles = decompose_closed_walk(&d, &DirectedWalk(vec![0, 1, 2, 0, 3, 4, 0])).unwrap();
        assert_eq!(cycles, vec![vec![0, 1, 2], vec![0, 3, 4]]);

        assert!(decompose_closed_walk(&tri, &DirectedWalk(vec![0, 1, 2])).is_err());
        assert!(decompose_closed_walk(&tri, &DirectedWalk(vec![0, 2, 1, 0])).is_err());
    }

    #[test]
    fn shortest_path_is_lexicographically_least() {
        // Two shortest routes 0->{1,2}->3 under colors 1,2,2,3.
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let s123 = CyclicPerm::new(&[1, 2, 3]).unwrap();
        let d = build_sigma_subdigraph(&g, &col(3, &[1, 2, 2, 3]), &s123).unwrap();
        assert_eq!(d.shortest_path(0, bit(3)), Some(vec![0, 1, 3]));
        assert_eq!(d.shortest_path(3, bit(0)), None);
    }

    #[test]
    fn zero_mod_r_examples() {
        let k4 = Graph::complete(4);
        for e in k4.edges() {
            let cycles = extract_zero_mod_r(&k4, e, 3, 3).unwrap();
            assert!(!cycles.is_empty());
            for c in &cycles {
                assert_eq!(c.len(), 3);
                assert!(c.contains(e.u));
                assert!(!c.uses_edge(e));
            }
        }
        let k5 = Graph::complete(5);
        let cycles = extract_zero_mod_r(&k5, Edge::new(0, 1), 4, 4).unwrap();
        assert!(cycles.len() >= 3);
        assert!(cycles.iter().all(|c| c.len() % 4 == 0 && !c.uses_edge(Edge::new(0, 1))));

        let w5 = Graph::wheel(5);
        for e in w5.edges() {
            let cycles = extract_zero_mod_r(&w5, e, 3, 3).unwrap();
            assert!(cycles.iter().all(|c| c.len() % 3 == 0 && c.is_cycle_of(&w5.without_edge(e))));
        }
    }

    #[test]
    fn zero_mod_r_preconditions() {
        let k4 = Graph::complete(4);
        assert!(matches!(extract_zero_mod_r(&k4, Edge::new(0, 1), 2, 3), Err(Error::Precondition(_))));
        assert!(matches!(extract_zero_mod_r(&k4, Edge::new(0, 1), 3, 4), Err(Error::Precondition(_))));
        let c5 = Graph::cycle(5);
        assert!(matches!(extract_zero_mod_r(&c5, Edge::new(0, 2), 3, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn k4_lemma_paths_follow_sigma() {
        let k4 = Graph::complete(4);
        let v = 3;
        let c = prescribed_coloring(&k4, v, 3).unwrap();
        assert_eq!(&c.colors()[..3], &[1, 2, 3]);
        let s = CyclicPerm::new(&[1, 2, 3]).unwrap();
        let paths = lemma_paths(&k4, v, &c, &s).unwrap();
        // v_i = vertex i - 1; each path runs v_i -> v_σ(i) -> v_σ⁻¹(i).
        assert_eq!(paths[&1], vec![0, 1, 2]);
        assert_eq!(paths[&2], vec![1, 2, 0]);
        assert_eq!(paths[&3], vec![2, 0, 1]);
        let rev = lemma_paths(&k4, v, &c, &s.inverse()).unwrap();
        assert_eq!(rev[&1], vec![0, 2, 1]);
        assert_eq!(rev[&2], vec![1, 0, 2]);
        assert_eq!(rev[&3], vec![2, 1, 0]);
    }

    #[test]
    fn lemma_paths_preconditions() {
        let k4 = Graph::complete(4);
        let c = prescribed_coloring(&k4, 3, 3).unwrap();
        let s = CyclicPerm::new(&[1, 2, 3]).unwrap();
        let w5 = Graph::wheel(5);
        // Hub of W5 has degree 5.
        assert!(lemma_paths(&w5, 5, &prescribed_coloring(&w5, 0, 3).unwrap(), &s).is_err());
        let bad = col(3, &[1, 1, 3, 2]);
        assert!(lemma_paths(&k4, 3, &bad, &s).is_err());
        assert!(lemma_paths(&k4, 3, &c, &CyclicPerm::new(&[1, 2]).unwrap()).is_err());
    }

    #[test]
    fn k4_injection() {
        let k4 = Graph::complete(4);
        let c = prescribed_coloring(&k4, 3, 3).unwrap();
        let f = build_injection_f(&k4, 3, &c, 3).unwrap();
        assert_eq!(f.len(), 4);
        let images: BTreeSet<_> = f.values().cloned().collect();
        assert_eq!(images.len(), 4);
        assert!(images.iter().all(|c| c.len() == 3));
        let plain = CycleSeq::new(&[1, 2, 3]).unwrap();
        assert!(!f[&plain].contains(3));
        let through_top = CycleSeq::new(&[2, 3, 4]).unwrap();
        assert!(f[&through_top].contains(3));
    }

    #[test]
    fn one_mod_k_on_complete_graphs() {
        let k4 = Graph::complete(4);
        for v in 0..4 {
            let cycles = extract_one_mod_k(&k4, v, 3).unwrap();
            assert_eq!(cycles.len(), 3);
            assert!(cycles.iter().all(|c| c.len() == 4 && c.contains(v)));
        }
        let k5 = Graph::complete(5);
        let cycles = extract_one_mod_k(&k5, 2, 4).unwrap();
        assert_eq!(cycles.len(), 12);
        assert!(cycles.iter().all(|c| c.len() == 5));
        assert!(extract_one_mod_k(&Graph::cycle(5), 0, 3).is_err());
    }
}
