//! Undirected simple graphs on at most 62 vertices, stored as per-vertex
//! neighbor bit-sets, with graph6 serialization and the structural
//! predicates the verification sweeps rely on.

use std::fmt;

use crate::error::{Error, Result};

/// Largest vertex count representable with a single-byte graph6 header.
pub const MAX_VERTICES: usize = 62;

/// A vertex set over `0..n`, one bit per vertex.
pub type VertexSet = u64;

#[inline]
pub(crate) const fn bit(v: usize) -> u64 {
    1u64 << v
}

/// Iterates the set bits of `mask` in increasing order.
#[inline]
pub fn members(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

/// An edge with normalized endpoints `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// Normalizes the endpoint order. Panics on a loop.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "an edge needs two distinct endpoints");
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn other(&self, w: usize) -> usize {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

/// Undirected simple graph on vertices `0..n`.
///
/// `adj[u]` has bit `v` set iff `uv` is an edge. The adjacency is kept
/// symmetric and loop-free by every constructor and mutator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({})", self.to_graph6())
    }
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_VERTICES, "at most {MAX_VERTICES} vertices supported");
        Graph { n, adj: vec![0; n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        let all = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
        for u in 0..n {
            g.adj[u] = all & !bit(u);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut g = Graph::empty(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    /// The wheel: a cycle on `0..rim` plus hub `rim` adjacent to every rim vertex.
    pub fn wheel(rim: usize) -> Self {
        let mut g = Graph::empty(rim + 1);
        for i in 0..rim {
            g.add_edge(i, (i + 1) % rim);
            g.add_edge(i, rim);
        }
        g
    }

    pub fn petersen() -> Self {
        let mut g = Graph::empty(10);
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5);
            g.add_edge(i, i + 5);
            g.add_edge(5 + i, 5 + (i + 2) % 5);
        }
        g
    }

    /// The Grötzsch (Mycielski of C5) graph on 11 vertices.
    pub fn grotzsch() -> Self {
        let mut g = Graph::empty(11);
        for i in 0..5 {
            let j = (i + 1) % 5;
            let h = (i + 4) % 5;
            g.add_edge(i, j);
            g.add_edge(5 + i, j);
            g.add_edge(5 + i, h);
            g.add_edge(5 + i, 10);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Builds a graph from raw bit-set rows, validating symmetry and loops.
    pub fn from_adjacency(adj: Vec<u64>) -> Result<Self> {
        let n = adj.len();
        if n > MAX_VERTICES {
            return Err(Error::UnsupportedSize(format!("{n} vertices (max {MAX_VERTICES})")));
        }
        let range = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
        for (u, &row) in adj.iter().enumerate() {
            if row & !range != 0 || row & bit(u) != 0 {
                return Err(Error::Precondition(format!("row {u} has a loop or out-of-range bit")));
            }
            for v in members(row) {
                if adj[v] & bit(u) == 0 {
                    return Err(Error::Precondition(format!("adjacency not symmetric at {u},{v}")));
                }
            }
        }
        Ok(Graph { n, adj })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> VertexSet {
        self.adj[u]
    }

    pub fn rows(&self) -> &[u64] {
        &self.adj
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] & bit(v) != 0
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn all_vertices(&self) -> VertexSet {
        if self.n == 0 {
            0
        } else {
            u64::MAX >> (64 - self.n)
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "bad edge {u}-{v} for n={}", self.n);
        self.adj[u] |= bit(v);
        self.adj[v] |= bit(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !bit(v);
        self.adj[v] &= !bit(u);
    }

    pub fn without_edge(&self, e: Edge) -> Graph {
        let mut g = self.clone();
        g.remove_edge(e.u, e.v);
        g
    }

    /// `G - v` with labels kept: `v` stays as an isolated vertex.
    pub fn isolate(&self, v: usize) -> Graph {
        let mut g = self.clone();
        for w in members(self.adj[v]) {
            g.remove_edge(v, w);
        }
        g
    }

    /// Appends a new vertex adjacent to `nbrs`.
    pub fn with_vertex(&self, nbrs: VertexSet) -> Graph {
        assert!(self.n < MAX_VERTICES);
        let mut adj = self.adj.clone();
        let w = self.n;
        for u in members(nbrs) {
            adj[u] |= bit(w);
        }
        adj.push(nbrs);
        Graph { n: w + 1, adj }
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n).flat_map(move |u| {
            members(self.adj[u] & !((bit(u) << 1) - 1)).map(move |v| Edge { u, v })
        })
    }

    /// Relabels so that old vertex `u` becomes `perm[u]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut adj = vec![0u64; self.n];
        for u in 0..self.n {
            for v in members(self.adj[u]) {
                adj[perm[u]] |= bit(perm[v]);
            }
        }
        Graph { n: self.n, adj }
    }

    /// Induced subgraph on `set`, relabeled to `0..|set|` in increasing order.
    pub fn induced(&self, set: VertexSet) -> Graph {
        let verts: Vec<usize> = members(set).collect();
        let mut g = Graph::empty(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Vertices reachable from `start` inside `allowed`.
    pub fn component_of(&self, start: usize, allowed: VertexSet) -> VertexSet {
        let mut seen = bit(start) & allowed;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            for u in members(frontier) {
                next |= self.adj[u];
            }
            next &= allowed & !seen;
            seen |= next;
            frontier = next;
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        match self.n {
            0 => false,
            _ => self.component_of(0, self.all_vertices()) == self.all_vertices(),
        }
    }

    /// Whether the vertices in `set` induce a clique.
    pub fn is_clique(&self, set: VertexSet) -> bool {
        members(set).all(|u| self.adj[u] & set == set & !bit(u))
    }

    /// Whether the graph contains a clique on `size` vertices.
    pub fn has_clique(&self, size: usize) -> bool {
        fn extend(g: &Graph, cand: u64, need: usize) -> bool {
            if need == 0 {
                return true;
            }
            if (cand.count_ones() as usize) < need {
                return false;
            }
            let mut rest = cand;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if extend(g, rest & g.adj[v], need - 1) {
                    return true;
                }
            }
            false
        }
        extend(self, self.all_vertices(), size)
    }

    pub fn structural_predicates(&self) -> StructuralPredicates {
        let degrees = (0..self.n).map(|u| self.degree(u));
        let min_degree = degrees.clone().min().unwrap_or(0);
        let max_degree = degrees.max().unwrap_or(0);
        let connected = self.is_connected();
        let two_connected = connected && self.n >= 3 && self.cut_vertices() == 0;
        let is_complete = self.edge_count() == self.n * self.n.saturating_sub(1) / 2;
        StructuralPredicates { min_degree, max_degree, connected, two_connected, is_complete }
    }

    /// Articulation points of the graph, by the low-link method.
    pub fn cut_vertices(&self) -> VertexSet {
        let n = self.n;
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut cut = 0u64;
        let mut time = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // Iterative DFS: (vertex, parent, remaining neighbors).
            let mut stack: Vec<(usize, usize, u64)> = vec![(root, usize::MAX, self.adj[root])];
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut root_children = 0;
            while let Some(top) = stack.last_mut() {
                let (u, parent, rest) = *top;
                if rest != 0 {
                    let w = rest.trailing_zeros() as usize;
                    top.2 &= rest - 1;
                    if disc[w] == usize::MAX {
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        if u == root {
                            root_children += 1;
                        }
                        stack.push((w, u, self.adj[w]));
                    } else if w != parent {
                        low[u] = low[u].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[u]);
                        if parent != root && low[u] >= disc[parent] {
                            cut |= bit(parent);
                        }
                    }
                }
            }
            if root_children > 1 {
                cut |= bit(root);
            }
        }
        cut
    }

    /// Encodes the graph as a graph6 line (without the trailing newline).
    pub fn to_graph6(&self) -> String {
        let n = self.n;
        let mut out = String::with_capacity(1 + (n * n.saturating_sub(1) / 2).div_ceil(6));
        out.push((n as u8 + 63) as char);
        let mut chunk = 0u8;
        let mut filled = 0;
        for j in 1..n {
            for i in 0..j {
                chunk = (chunk << 1) | self.has_edge(i, j) as u8;
                filled += 1;
                if filled == 6 {
                    out.push((chunk + 63) as char);
                    chunk = 0;
                    filled = 0;
                }
            }
        }
        if filled > 0 {
            out.push(((chunk << (6 - filled)) + 63) as char);
        }
        out
    }

    /// Same as [`Graph::to_graph6`], but rejects graphs that cannot be encoded
    /// with a one-byte header.
    pub fn write_graph6(&self) -> Result<String> {
        if self.n > MAX_VERTICES {
            return Err(Error::UnsupportedSize(format!("{} vertices (max {MAX_VERTICES})", self.n)));
        }
        Ok(self.to_graph6())
    }

    /// Parses one graph6 record. An optional `>>graph6<<` header and a
    /// trailing line terminator are accepted.
    pub fn parse_graph6(line: &str) -> Result<Graph> {
        let line = line.strip_suffix('\n').unwrap_or(line);
        let line = line.strip_suffix('\r').unwrap_or(line);
        let (skip, body) = match line.strip_prefix(">>graph6<<") {
            Some(rest) => (10, rest.as_bytes()),
            None => (0, line.as_bytes()),
        };
        let err = |offset: usize, reason: &str| Error::Graph6 { offset: offset + skip, reason: reason.to_string() };
        let Some(&header) = body.first() else {
            return Err(err(0, "empty record"));
        };
        if header == 126 {
            return Err(err(0, "multi-byte size header: more than 62 vertices is unsupported"));
        }
        if !(63..=125).contains(&header) {
            return Err(err(0, "header byte outside 63..=125"));
        }
        let n = (header - 63) as usize;
        let bits = n * n.saturating_sub(1) / 2;
        let want = bits.div_ceil(6);
        let data = &body[1..];
        if data.len() < want {
            return Err(err(1 + data.len(), "truncated bit field"));
        }
        if data.len() > want {
            return Err(err(1 + want, "trailing bytes after bit field"));
        }
        for (i, &b) in data.iter().enumerate() {
            if !(63..=126).contains(&b) {
                return Err(err(1 + i, "byte outside 63..=126"));
            }
        }
        let mut g = Graph::empty(n);
        let mut k = 0;
        for j in 1..n {
            for i in 0..j {
                let byte = data[k / 6] - 63;
                if byte & (0x20 >> (k % 6)) != 0 {
                    g.add_edge(i, j);
                }
                k += 1;
            }
        }
        if !bits.is_multiple_of(6) {
            let pad = 6 - bits % 6;
            if (data[want - 1] - 63) & ((1 << pad) - 1) != 0 {
                return Err(err(want, "nonzero padding bits"));
            }
        }
        Ok(g)
    }
}

/// Degree extremes and connectivity summary of a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructuralPredicates {
    pub min_degree: usize,
    pub max_degree: usize,
    pub connected: bool,
    pub two_connected: bool,
    pub is_complete: bool,
}
