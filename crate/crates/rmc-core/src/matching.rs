//! Maximum matching and minimum edge covers on general graphs.
//!
//! The q = 2 solver expands demands into a non-bipartite unit graph, so the
//! matcher has to handle odd cycles; this is the classic blossom
//! (odd-cycle contraction) algorithm. A minimum edge cover then follows by
//! augmenting a maximum matching with one edge per exposed vertex, giving
//! the size identity `|cover| = n - |matching|`.

use crate::error::{Error, Result};

/// A simple undirected graph over vertices `0..n`.
#[derive(Debug, Clone)]
pub struct GeneralGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl GeneralGraph {
    pub fn new(n: usize) -> Self {
        GeneralGraph {
            n,
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    /// Adds an undirected edge. Panics on self-loops, parallel edges or
    /// out-of-range endpoints.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "vertex index out of range");
        assert_ne!(u, v, "self-loops are not allowed");
        assert!(!self.adj[u].contains(&v), "parallel edge ({u}, {v})");
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.edges.push((u.min(v), u.max(v)));
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }
}

/// A matching given by the mate of every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    mate: Vec<Option<usize>>,
}

impl Matching {
    pub fn mate(&self, v: usize) -> Option<usize> {
        self.mate[v]
    }

    pub fn len(&self) -> usize {
        self.mate.iter().flatten().count() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Matched pairs as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .mate
            .iter()
            .enumerate()
            .filter_map(|(u, m)| m.filter(|&v| u < v).map(|v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }
}

/// An edge subset touching every vertex of the graph it was computed on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCover {
    edges: Vec<(usize, usize)>,
}

impl EdgeCover {
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    g: &'a GeneralGraph,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    in_tree: Vec<bool>,
}

impl<'a> Blossom<'a> {
    fn new(g: &'a GeneralGraph) -> Self {
        let n = g.num_vertices();
        Blossom {
            g,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            in_tree: vec![false; n],
        }
    }

    fn lowest_common_base(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.g.num_vertices()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize, in_blossom: &mut [bool]) {
        while self.base[v] != b {
            in_blossom[self.base[v]] = true;
            in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn try_augment(&mut self, root: usize) -> bool {
        let n = self.g.num_vertices();
        self.in_tree.fill(false);
        self.parent.fill(NONE);
        for (v, b) in self.base.iter_mut().enumerate() {
            *b = v;
        }
        self.in_tree[root] = true;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(root);

        while let Some(v) = queue.pop_front() {
            for idx in 0..self.g.neighbors(v).len() {
                let to = self.g.neighbors(v)[idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    // odd cycle: contract the blossom around its base
                    let cur_base = self.lowest_common_base(v, to);
                    let mut in_blossom = vec![false; n];
                    self.mark_path(v, cur_base, to, &mut in_blossom);
                    self.mark_path(to, cur_base, v, &mut in_blossom);
                    for u in 0..n {
                        if in_blossom[self.base[u]] {
                            self.base[u] = cur_base;
                            if !self.in_tree[u] {
                                self.in_tree[u] = true;
                                queue.push_back(u);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        // augment along the alternating path back to the root
                        let mut u = to;
                        while u != NONE {
                            let pv = self.parent[u];
                            let next = self.mate[pv];
                            self.mate[u] = pv;
                            self.mate[pv] = u;
                            u = next;
                        }
                        return true;
                    }
                    let m = self.mate[to];
                    if !self.in_tree[m] {
                        self.in_tree[m] = true;
                        queue.push_back(m);
                    }
                }
            }
        }
        false
    }
}

/// Maximum-cardinality matching in a general graph.
pub fn max_matching(g: &GeneralGraph) -> Matching {
    let n = g.num_vertices();
    let mut solver = Blossom::new(g);
    // greedy seed, then one augmenting search per remaining exposed vertex
    for v in 0..n {
        if solver.mate[v] == NONE {
            for &to in g.neighbors(v) {
                if solver.mate[to] == NONE {
                    solver.mate[v] = to;
                    solver.mate[to] = v;
                    break;
                }
            }
        }
    }
    for v in 0..n {
        if solver.mate[v] == NONE {
            solver.try_augment(v);
        }
    }
    let mate = solver
        .mate
        .iter()
        .map(|&m| if m == NONE { None } else { Some(m) })
        .collect();
    Matching { mate }
}

/// Minimum edge cover: a maximum matching augmented with one incident edge
/// per exposed vertex (smallest-index neighbor, for determinism).
///
/// Errors with [`Error::IsolatedVertex`] when some vertex has no incident
/// edge at all.
pub fn min_edge_cover(g: &GeneralGraph) -> Result<EdgeCover> {
    for v in 0..g.num_vertices() {
        if g.degree(v) == 0 {
            return Err(Error::IsolatedVertex { vertex: v });
        }
    }
    let matching = max_matching(g);
    let mut edges = matching.edges();
    for v in 0..g.num_vertices() {
        if matching.mate(v).is_none() {
            let u = *g.neighbors(v).iter().min().unwrap();
            edges.push((v.min(u), v.max(u)));
        }
    }
    edges.sort_unstable();
    Ok(EdgeCover { edges })
}
