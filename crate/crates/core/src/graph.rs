//! Simple undirected labelled graphs.
//!
//! Vertices are stored 0-based; vertex `i` carries the label `i + 1`.
//! Constructors taking labels (such as [`make_graph`]) translate at the
//! boundary, everything else speaks in vertex indices.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Graphs with at most this many vertices also keep a bitset adjacency.
pub const BITSET_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelledGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    bits: Option<Vec<u64>>,
    m: usize,
}

/// Build a graph on labels `1..=n` from label pairs; duplicate pairs collapse.
pub fn make_graph(n: usize, edges: &[(usize, usize)]) -> Result<LabelledGraph> {
    for &(a, b) in edges {
        for x in [a, b] {
            if x == 0 || x > n {
                return Err(Error::EndpointOutOfRange { label: x, n });
            }
        }
        if a == b {
            return Err(Error::LoopEdge(a));
        }
    }
    LabelledGraph::from_edges(n, edges.iter().map(|&(a, b)| (a - 1, b - 1)))
}

impl LabelledGraph {
    pub fn empty(n: usize) -> Self {
        LabelledGraph {
            n,
            adj: vec![Vec::new(); n],
            bits: (n <= BITSET_LIMIT).then(|| vec![0; n]),
            m: 0,
        }
    }

    /// Build from 0-based vertex pairs.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (a, b) in edges {
            if a >= n {
                return Err(Error::EndpointOutOfRange { label: a + 1, n });
            }
            if b >= n {
                return Err(Error::EndpointOutOfRange { label: b + 1, n });
            }
            if a == b {
                return Err(Error::LoopEdge(a + 1));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    /// Build from bitset rows (n <= 64). Rows must be symmetric and loop free.
    pub fn from_rows(rows: &[u64]) -> Self {
        let n = rows.len();
        let mut g = Self::empty(n);
        for (a, &row) in rows.iter().enumerate() {
            let mut r = row & !((1u64 << a) | ((1u64 << a) - 1));
            if a == 63 {
                r = 0;
            }
            while r != 0 {
                let b = r.trailing_zeros() as usize;
                r &= r - 1;
                g.add_edge(a, b);
            }
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Bitset row of `v`; only for graphs with at most 64 vertices.
    #[inline]
    pub fn row(&self, v: usize) -> u64 {
        self.bits.as_ref().expect("bitset adjacency needs n <= 64")[v]
    }

    pub fn rows(&self) -> Option<&[u64]> {
        self.bits.as_deref()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        if a >= self.n || b >= self.n {
            return false;
        }
        match &self.bits {
            Some(bits) => bits[a] >> b & 1 == 1,
            None => self.adj[a].binary_search(&b).is_ok(),
        }
    }

    /// Returns false when the edge was already present.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        debug_assert!(a != b && a < self.n && b < self.n);
        match self.adj[a].binary_search(&b) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[a].insert(pos, b);
                let pos = self.adj[b].binary_search(&a).unwrap_err();
                self.adj[b].insert(pos, a);
                if let Some(bits) = &mut self.bits {
                    bits[a] |= 1 << b;
                    bits[b] |= 1 << a;
                }
                self.m += 1;
                true
            }
        }
    }

    /// Returns false when the edge was absent.
    pub fn remove_edge(&mut self, a: usize, b: usize) -> bool {
        match self.adj[a].binary_search(&b) {
            Err(_) => false,
            Ok(pos) => {
                self.adj[a].remove(pos);
                let pos = self.adj[b].binary_search(&a).unwrap();
                self.adj[b].remove(pos);
                if let Some(bits) = &mut self.bits {
                    bits[a] &= !(1 << b);
                    bits[b] &= !(1 << a);
                }
                self.m -= 1;
                true
            }
        }
    }

    pub fn with_edge(&self, a: usize, b: usize) -> Self {
        let mut g = self.clone();
        g.add_edge(a, b);
        g
    }

    pub fn without_edge(&self, a: usize, b: usize) -> Self {
        let mut g = self.clone();
        g.remove_edge(a, b);
        g
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for a in 0..self.n {
            for &b in &self.adj[a] {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Edges as 1-based label pairs.
    pub fn label_edges(&self) -> Vec<(usize, usize)> {
        self.edges().into_iter().map(|(a, b)| (a + 1, b + 1)).collect()
    }

    /// Graph whose vertex `perm[v]` corresponds to vertex `v` of `self`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut g = Self::empty(self.n);
        for (a, b) in self.edges() {
            g.add_edge(perm[a], perm[b]);
        }
        g
    }

    /// Induced subgraph on `vertices` (in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Self::empty(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Graph with vertex `v` deleted; later vertices shift down by one.
    pub fn remove_vertex(&self, v: usize) -> Self {
        let keep: Vec<usize> = (0..self.n).filter(|&x| x != v).collect();
        self.induced(&keep)
    }

    /// Contract edge `ab` into `min(a, b)`; the other endpoint is removed.
    pub fn contract(&self, a: usize, b: usize) -> Self {
        let (keep, gone) = if a < b { (a, b) } else { (b, a) };
        let map = |x: usize| {
            let x = if x == gone { keep } else { x };
            if x > gone {
                x - 1
            } else {
                x
            }
        };
        let mut g = Self::empty(self.n - 1);
        for (x, y) in self.edges() {
            let (p, q) = (map(x), map(y));
            if p != q {
                g.add_edge(p, q);
            }
        }
        g
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let shift = self.n;
        let mut g = Self::empty(self.n + other.n);
        for (a, b) in self.edges() {
            g.add_edge(a, b);
        }
        for (a, b) in other.edges() {
            g.add_edge(a + shift, b + shift);
        }
        g
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn sorted_degrees(&self) -> Vec<usize> {
        let mut d = self.degrees();
        d.sort_unstable();
        d
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(x) = queue.pop_front() {
                comp.push(x);
                for &y in &self.adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// 2-connected in the block sense: connected, at least 3 vertices, no cut vertex.
    pub fn is_two_connected(&self) -> bool {
        if self.n < 3 || !self.is_connected() {
            return false;
        }
        crate::blocks::cut_vertices(self).is_empty()
    }

    /// Vertices at distance at most one from `v`, including `v`.
    pub fn closed_neighborhood(&self, v: usize) -> Vec<usize> {
        let mut out = self.adj[v].clone();
        let pos = out.binary_search(&v).unwrap_err();
        out.insert(pos, v);
        out
    }
}

/// Maximum degree and every vertex attaining it.
pub fn max_degree(g: &LabelledGraph) -> Result<(usize, Vec<usize>)> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let best = (0..g.n()).map(|v| g.degree(v)).max().unwrap();
    let argmax = (0..g.n()).filter(|&v| g.degree(v) == best).collect();
    Ok((best, argmax))
}

/// Degree-one vertices in ascending order.
pub fn pendant_vertices(g: &LabelledGraph) -> Vec<usize> {
    (0..g.n()).filter(|&v| g.degree(v) == 1).collect()
}

/// Largest number of pendant neighbours over all vertices.
pub fn max_pendants_per_vertex(g: &LabelledGraph) -> usize {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().filter(|&&w| g.degree(w) == 1).count())
        .max()
        .unwrap_or(0)
}

/// Edge list with 1-based labels, as used by JSON exchange.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl From<&LabelledGraph> for GraphRecord {
    fn from(g: &LabelledGraph) -> Self {
        GraphRecord {
            n: g.n(),
            edges: g.label_edges(),
        }
    }
}

impl TryFrom<&GraphRecord> for LabelledGraph {
    type Error = Error;

    fn try_from(r: &GraphRecord) -> Result<Self> {
        make_graph(r.n, &r.edges)
    }
}

/// Common named graphs, 0-based.
pub mod named {
    use super::LabelledGraph;

    pub fn path(n: usize) -> LabelledGraph {
        LabelledGraph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn cycle(n: usize) -> LabelledGraph {
        assert!(n >= 3);
        LabelledGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn complete(n: usize) -> LabelledGraph {
        LabelledGraph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).unwrap()
    }

    pub fn star(leaves: usize) -> LabelledGraph {
        LabelledGraph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    pub fn complete_bipartite(a: usize, b: usize) -> LabelledGraph {
        LabelledGraph::from_edges(a + b, (0..a).flat_map(|x| (0..b).map(move |y| (x, a + y))))
            .unwrap()
    }

    /// Hub 0 joined to every vertex of the path 1..n-1.
    pub fn fan(n: usize) -> LabelledGraph {
        let mut f = LabelledGraph::empty(n);
        for v in 1..n {
            f.add_edge(0, v);
            if v + 1 < n {
                f.add_edge(v, v + 1);
            }
        }
        f
    }
}
