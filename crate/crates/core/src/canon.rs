//! Exact canonical labeling by partition refinement and individualization.
//!
//! The search tree is the usual one: refine an ordered vertex partition to an
//! equitable one, individualize each vertex of the first non-singleton cell,
//! recurse. Leaves are discrete partitions, i.e. vertex orderings, and the
//! canonical graph is the leaf whose relabeled adjacency rows are
//! lexicographically greatest. Leaves with equal rows yield automorphisms,
//! which drive two prunings: backjumping to the branch point of an
//! equivalent leaf, and orbit pruning along the first path.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{bit, members, Graph};

/// Certificate of a graph's isomorphism class: the graph6 line of its
/// canonical relabeling. Equal iff the graphs are isomorphic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    /// The canonical representative itself.
    pub fn graph(&self) -> Graph {
        Graph::parse_graph6(&self.0).expect("certificates are valid graph6")
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cert({})", self.0)
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn canonical_form(g: &Graph) -> CanonicalForm {
    CanonicalForm(canonical_graph(g).to_graph6())
}

/// The canonically relabeled copy of `g`.
pub fn canonical_graph(g: &Graph) -> Graph {
    g.relabel(&canonical_labeling(g))
}

/// A permutation `perm` (old vertex `v` goes to `perm[v]`) taking `g` to its
/// canonical representative.
pub fn canonical_labeling(g: &Graph) -> Vec<usize> {
    let n = g.n();
    if n <= 1 {
        return (0..n).collect();
    }
    let mut search = Search {
        g,
        first: None,
        best: None,
        autos: Vec::new(),
        path: Vec::new(),
    };
    let root = refine(g, vec![0; n]);
    search.descend(root);
    search.best.expect("search visits at least one leaf").perm
}

const MAX_STORED_AUTOS: usize = 128;

struct Leaf {
    rows: Vec<u64>,
    perm: Vec<usize>,
    path: Vec<usize>,
}

struct Search<'a> {
    g: &'a Graph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    autos: Vec<Vec<usize>>,
    path: Vec<usize>,
}

impl Search<'_> {
    /// Returns `Some(d)` to unwind to the node at depth `d`.
    fn descend(&mut self, colors: Vec<usize>) -> Option<usize> {
        let n = self.g.n();
        let depth = self.path.len();
        let cells = cell_count(&colors);
        if cells == n {
            return self.leaf(colors);
        }
        let target = first_nonsingleton(&colors, cells);
        let on_first_path = self.first.as_ref().is_some_and(|f| f.path[..depth] == self.path[..]);
        for w in (0..n).filter(|&v| colors[v] == target) {
            if on_first_path && !self.is_orbit_min(w) {
                continue;
            }
            let child = refine(self.g, individualize(&colors, w));
            self.path.push(w);
            let jump = self.descend(child);
            self.path.pop();
            if let Some(d) = jump {
                if d < depth {
                    return Some(d);
                }
            }
        }
        None
    }

    fn leaf(&mut self, perm: Vec<usize>) -> Option<usize> {
        let rows = relabeled_rows(self.g, &perm);
        let path = self.path.clone();
        let Some(first) = &self.first else {
            let leaf = Leaf { rows, perm, path };
            self.best = Some(Leaf { rows: leaf.rows.clone(), perm: leaf.perm.clone(), path: leaf.path.clone() });
            self.first = Some(leaf);
            return None;
        };
        if rows == first.rows {
            let auto = automorphism(&first.perm, &perm);
            let d = common_prefix(&first.path, &path);
            self.record(auto);
            return Some(d);
        }
        let best = self.best.as_ref().expect("best is set with first");
        match rows.cmp(&best.rows) {
            std::cmp::Ordering::Greater => {
                self.best = Some(Leaf { rows, perm, path });
                None
            }
            std::cmp::Ordering::Equal => {
                let auto = automorphism(&best.perm, &perm);
                let d = common_prefix(&best.path, &path);
                self.record(auto);
                Some(d)
            }
            std::cmp::Ordering::Less => None,
        }
    }

    fn record(&mut self, auto: Vec<usize>) {
        if self.autos.len() < MAX_STORED_AUTOS {
            self.autos.push(auto);
        }
    }

    /// Whether `w` is the least vertex of its orbit under the stored
    /// automorphisms that fix the current path pointwise.
    fn is_orbit_min(&self, w: usize) -> bool {
        let n = self.g.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for a in &self.autos {
            if self.path.iter().any(|&v| a[v] != v) {
                continue;
            }
            any = true;
            for v in 0..n {
                let (x, y) = (find(&mut parent, v), find(&mut parent, a[v]));
                if x != y {
                    // keep the smaller vertex as root
                    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                    parent[hi] = lo;
                }
            }
        }
        !any || find(&mut parent, w) == w
    }
}

/// `first⁻¹ ∘ other`: both relabel the graph to the same rows.
fn automorphism(first: &[usize], other: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; first.len()];
    for (v, &p) in first.iter().enumerate() {
        inv[p] = v;
    }
    other.iter().map(|&p| inv[p]).collect()
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn relabeled_rows(g: &Graph, perm: &[usize]) -> Vec<u64> {
    let mut rows = vec![0u64; g.n()];
    for (v, &p) in perm.iter().enumerate() {
        let mut r = 0;
        for w in members(g.neighbors(v)) {
            r |= bit(perm[w]);
        }
        rows[p] = r;
    }
    rows
}

fn cell_count(colors: &[usize]) -> usize {
    colors.iter().copied().max().map_or(0, |c| c + 1)
}

fn first_nonsingleton(colors: &[usize], cells: usize) -> usize {
    let mut sizes = vec![0usize; cells];
    for &c in colors {
        sizes[c] += 1;
    }
    sizes.iter().position(|&s| s > 1).expect("partition is not discrete")
}

/// Splits `w` off the front of its cell.
fn individualize(colors: &[usize], w: usize) -> Vec<usize> {
    let x = colors[w];
    colors
        .iter()
        .enumerate()
        .map(|(v, &c)| if c < x || v == w { c } else { c + 1 })
        .collect()
}

/// Refines an ordered partition (given as dense cell indices) until every
/// vertex in a cell has the same number of neighbors in each cell. Cells are
/// split in order of neighbor-count signatures, so the result depends only
/// on the isomorphism type of (graph, partition).
pub(crate) fn refine(g: &Graph, mut colors: Vec<usize>) -> Vec<usize> {
    let n = g.n();
    let mut cells = cell_count(&colors);
    loop {
        let mut masks = vec![0u64; cells];
        for (v, &c) in colors.iter().enumerate() {
            masks[c] |= bit(v);
        }
        let keys: Vec<Vec<u32>> = (0..n)
            .map(|v| {
                let mut key = Vec::with_capacity(cells + 1);
                key.push(colors[v] as u32);
                key.extend(masks.iter().map(|&m| (g.neighbors(v) & m).count_ones()));
                key
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut next = vec![0usize; n];
        let mut rank = 0;
        for i in 0..n {
            if i > 0 && keys[order[i]] != keys[order[i - 1]] {
                rank += 1;
            }
            next[order[i]] = rank;
        }
        let new_cells = rank + 1;
        colors = next;
        if new_cells == cells {
            return colors;
        }
        cells = new_cells;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_perm(n: usize, seed: &mut u64) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (*seed >> 33) as usize % (i + 1);
            p.swap(i, j);
        }
        p
    }

    #[test]
    fn relabeled_k4_same_cert() {
        let k4 = Graph::complete(4);
        assert_eq!(canonical_form(&k4), canonical_form(&k4.relabel(&[0, 2, 1, 3])));
    }

    #[test]
    fn distinguishes_small_graphs() {
        assert_ne!(canonical_form(&Graph::cycle(4)), canonical_form(&Graph::path(4)));
        let p3 = Graph::path(3);
        let k2k1 = Graph::from_edges(3, &[(0, 1)]);
        assert_ne!(canonical_form(&p3), canonical_form(&k2k1));
        // Same degree sequence, not isomorphic: C6 versus two triangles.
        let two_tri = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert_ne!(canonical_form(&Graph::cycle(6)), canonical_form(&two_tri));
    }

    #[test]
    fn symmetric_graphs_are_fast_and_invariant() {
        let mut seed = 7;
        for g in [Graph::complete(12), Graph::empty(12), Graph::petersen(), Graph::grotzsch(), Graph::cycle(12)] {
            let c = canonical_form(&g);
            for _ in 0..20 {
                let p = random_perm(g.n(), &mut seed);
                assert_eq!(canonical_form(&g.relabel(&p)), c);
            }
        }
    }

    #[test]
    fn labeling_is_a_permutation_onto_canonical_graph() {
        let g = Graph::petersen();
        let perm = canonical_labeling(&g);
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..10).collect::<Vec<_>>());
        assert_eq!(g.relabel(&perm).to_graph6(), canonical_form(&g).as_str());
        assert_eq!(canonical_form(&g).graph(), canonical_graph(&g));
    }
}
