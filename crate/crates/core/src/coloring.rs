//! Exact proper coloring by DSATUR-ordered backtracking, chromatic number,
//! and criticality testing.

use crate::error::{Error, Result};
use crate::graph::{bit, members, Graph};

/// A color in `1..=k`.
pub type Color = u8;

/// A total assignment of colors `1..=k` to the vertices of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    k: usize,
    colors: Vec<Color>,
}

impl Coloring {
    pub fn new(k: usize, colors: Vec<Color>) -> Result<Self> {
        if let Some(v) = colors.iter().position(|&c| c == 0 || c as usize > k) {
            return Err(Error::Precondition(format!("vertex {v} has color {} outside 1..={k}", colors[v])));
        }
        Ok(Coloring { k, colors })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    #[inline]
    pub fn color(&self, v: usize) -> Color {
        self.colors[v]
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Returns a copy with `v` recolored.
    pub fn with_color(&self, v: usize, c: Color) -> Coloring {
        assert!(c >= 1 && c as usize <= self.k);
        let mut out = self.clone();
        out.colors[v] = c;
        out
    }

    /// Vertices holding color `c`.
    pub fn class(&self, c: Color) -> u64 {
        self.colors.iter().enumerate().filter(|(_, &x)| x == c).fold(0, |m, (v, _)| m | bit(v))
    }
}

/// True iff no edge of `g` is monochromatic under `c`.
///
/// Panics if `c` does not color exactly the vertices of `g`.
pub fn is_proper(g: &Graph, c: &Coloring) -> bool {
    assert_eq!(c.len(), g.n(), "coloring length does not match vertex count");
    g.edges().all(|e| c.color(e.u) != c.color(e.v))
}

/// Vertex/color pairs a coloring search must respect.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Prescription(pub Vec<(usize, Color)>);

impl Prescription {
    pub fn none() -> Self {
        Prescription(Vec::new())
    }
}

/// Searches for a proper `k`-coloring of `g` that agrees with `p`.
///
/// The search is complete. `Ok(None)` means no such coloring exists, which
/// includes prescriptions that put one color on both ends of an edge.
/// Malformed prescriptions (repeated vertex, out-of-range vertex or color)
/// are precondition errors.
pub fn find_coloring(g: &Graph, k: usize, p: &Prescription) -> Result<Option<Coloring>> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if k > 63 {
        return Err(Error::UnsupportedSize(format!("k = {k} colors")));
    }
    let n = g.n();
    let mut colors = vec![0 as Color; n];
    let mut fixed = 0u64;
    for &(v, c) in &p.0 {
        if v >= n {
            return Err(Error::Precondition(format!("prescribed vertex {v} out of range")));
        }
        if c == 0 || c as usize > k {
            return Err(Error::Precondition(format!("prescribed color {c} outside 1..={k}")));
        }
        if colors[v] != 0 {
            return Err(Error::Precondition(format!("vertex {v} prescribed twice")));
        }
        colors[v] = c;
        fixed |= bit(c as usize);
    }
    let mut search = Dsatur::new(g, k, colors, fixed);
    if search.inconsistent() {
        return Ok(None);
    }
    Ok(search.run().then_some(Coloring { k, colors: search.colors }))
}

/// Whether `g` has a proper `k`-coloring.
pub fn is_colorable(g: &Graph, k: usize) -> bool {
    if g.n() == 0 {
        return true;
    }
    if k == 0 {
        return false;
    }
    find_coloring(g, k, &Prescription::none()).expect("empty prescription is valid").is_some()
}

/// Least `k` for which `g` is `k`-colorable. `g` must have a vertex.
pub fn chromatic_number(g: &Graph) -> Result<usize> {
    if g.n() == 0 {
        return Err(Error::Precondition("chromatic number of the null graph".into()));
    }
    if g.edge_count() == 0 {
        return Ok(1);
    }
    let upper = greedy_dsatur(g);
    for k in 2..upper {
        if is_colorable(g, k) {
            return Ok(k);
        }
    }
    Ok(upper)
}

/// Whether `g` is `q`-critical: chromatic number `q`, no isolated vertex,
/// and every edge deletion drops the chromatic number to `q - 1`.
pub fn is_critical(g: &Graph, q: usize) -> bool {
    if q < 2 || g.n() == 0 || (0..g.n()).any(|v| g.degree(v) == 0) {
        return false;
    }
    if is_colorable(g, q - 1) || !is_colorable(g, q) {
        return false;
    }
    g.edges().all(|e| is_colorable(&g.without_edge(e), q - 1))
}

/// Number of colors used by DSATUR without backtracking.
fn greedy_dsatur(g: &Graph) -> usize {
    let n = g.n();
    let mut colors = vec![0usize; n];
    let mut uncolored = g.all_vertices();
    let mut used = 0;
    while uncolored != 0 {
        let v = members(uncolored)
            .max_by_key(|&v| {
                let sat = members(g.neighbors(v) & !uncolored).fold(0u64, |m, w| m | bit(colors[w])).count_ones();
                (sat, (g.neighbors(v) & uncolored).count_ones(), std::cmp::Reverse(v))
            })
            .expect("nonempty");
        let blocked = members(g.neighbors(v) & !uncolored).fold(0u64, |m, w| m | bit(colors[w]));
        let c = (1..).find(|c| blocked & bit(*c) == 0).expect("a free color exists");
        colors[v] = c;
        used = used.max(c);
        uncolored &= !bit(v);
    }
    used
}

/// Backtracking state. Colors fixed by the prescription are distinguished;
/// the remaining ("free") colors are interchangeable, so they are only ever
/// opened in increasing order.
struct Dsatur<'a> {
    g: &'a Graph,
    k: usize,
    colors: Vec<Color>,
    /// `class[c]` holds the vertices colored `c`.
    class: Vec<u64>,
    uncolored: u64,
    fixed: u64,
    /// Free colors in increasing order.
    free: Vec<usize>,
    free_open: usize,
}

impl<'a> Dsatur<'a> {
    fn new(g: &'a Graph, k: usize, colors: Vec<Color>, fixed: u64) -> Self {
        let mut class = vec![0u64; k + 1];
        let mut uncolored = g.all_vertices();
        for (v, &c) in colors.iter().enumerate() {
            if c != 0 {
                class[c as usize] |= bit(v);
                uncolored &= !bit(v);
            }
        }
        let free = (1..=k).filter(|&c| fixed & bit(c) == 0).collect();
        Dsatur { g, k, colors, class, uncolored, fixed, free, free_open: 0 }
    }

    fn inconsistent(&self) -> bool {
        (1..=self.k).any(|c| members(self.class[c]).any(|v| self.g.neighbors(v) & self.class[c] != 0))
    }

    fn blocked(&self, v: usize) -> u64 {
        let nb = self.g.neighbors(v);
        (1..=self.k).filter(|&c| nb & self.class[c] != 0).fold(0, |m, c| m | bit(c))
    }

    fn run(&mut self) -> bool {
        if self.uncolored == 0 {
            return true;
        }
        // Most saturated, then most uncolored neighbors, then smallest id.
        let mut pick = usize::MAX;
        let mut pick_key = (0u32, 0u32);
        let mut pick_blocked = 0;
        for v in members(self.uncolored) {
            let blocked = self.blocked(v);
            let key = (blocked.count_ones(), (self.g.neighbors(v) & self.uncolored).count_ones());
            if pick == usize::MAX || key > pick_key {
                pick = v;
                pick_key = key;
                pick_blocked = blocked;
            }
        }
        if pick_key.0 as usize == self.k {
            return false;
        }
        let v = pick;
        self.uncolored &= !bit(v);
        let opened = self.free_open;
        let mut candidates: Vec<usize> = (1..=self.k).filter(|&c| self.fixed & bit(c) != 0).collect();
        candidates.extend(self.free.iter().take((opened + 1).min(self.free.len())).copied());
        candidates.sort_unstable();
        for c in candidates {
            if pick_blocked & bit(c) != 0 {
                continue;
            }
            let is_new = self.fixed & bit(c) == 0 && self.free.get(opened) == Some(&c);
            if is_new {
                self.free_open += 1;
            }
            self.colors[v] = c as Color;
            self.class[c] |= bit(v);
            if self.run() {
                return true;
            }
            self.class[c] &= !bit(v);
            self.colors[v] = 0;
            if is_new {
                self.free_open -= 1;
            }
        }
        self.uncolored |= bit(v);
        false
    }
}
