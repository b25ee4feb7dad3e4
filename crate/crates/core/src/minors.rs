//! Longest cycles, minor containment and class membership.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::blocks::block_decomposition;
use crate::error::{Error, Result};
use crate::graph::LabelledGraph;
use crate::iso::{canonical_code_bounded, ENGINE_LIMIT};

/// Largest pattern accepted by [`has_minor`].
pub const MINOR_PATTERN_LIMIT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum GraphClass {
    /// Graphs without a `C_k` minor, i.e. circumference below `k`.
    ExCycle(usize),
    Outerplanar,
    /// Same members as `ExCycle(3)`.
    Forest,
    Tree,
}

impl GraphClass {
    /// Cycle length bound for the cycle-minor classes.
    pub fn forbidden_cycle(self) -> Option<usize> {
        match self {
            GraphClass::ExCycle(k) => Some(k),
            GraphClass::Forest | GraphClass::Tree => Some(3),
            GraphClass::Outerplanar => None,
        }
    }

    pub fn id(self) -> String {
        match self {
            GraphClass::ExCycle(k) => format!("exc{k}"),
            GraphClass::Outerplanar => "outerplanar".into(),
            GraphClass::Forest => "forest".into(),
            GraphClass::Tree => "tree".into(),
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for GraphClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.to_ascii_lowercase();
        match t.as_str() {
            "outerplanar" => Ok(GraphClass::Outerplanar),
            "forest" => Ok(GraphClass::Forest),
            "tree" => Ok(GraphClass::Tree),
            _ => {
                let k = t
                    .strip_prefix("exc")
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown class '{s}'")))?;
                if k < 3 {
                    return Err(Error::InvalidCycleLength(k));
                }
                Ok(GraphClass::ExCycle(k))
            }
        }
    }
}

impl From<GraphClass> for String {
    fn from(c: GraphClass) -> String {
        c.id()
    }
}

impl TryFrom<String> for GraphClass {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Longest-cycle search inside one 2-connected piece, vertices relabelled by
/// descending degree so that hubs become the early DFS roots.
struct CycleSearch {
    adj: Vec<Vec<usize>>,
    visited: Vec<bool>,
    best: usize,
    /// Stop as soon as a cycle of at least this length is seen.
    target: usize,
}

impl CycleSearch {
    fn new(g: &LabelledGraph, target: usize) -> Self {
        let n = g.n();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut adj = vec![Vec::new(); n];
        for (i, &v) in order.iter().enumerate() {
            adj[i] = g.neighbors(v).iter().map(|&w| pos[w]).collect();
            adj[i].sort_unstable();
        }
        CycleSearch {
            adj,
            visited: vec![false; n],
            best: 0,
            target,
        }
    }

    fn done(&self) -> bool {
        self.best >= self.target
    }

    fn run(&mut self) -> usize {
        let n = self.adj.len();
        for s in 0..n {
            // only vertices >= s remain, so at most n - s vertices on a cycle
            if n - s <= self.best.max(2) || self.done() {
                break;
            }
            self.visited[s] = true;
            self.extend(s, s, 1, n - s - 1);
            self.visited[s] = false;
        }
        self.best
    }

    fn extend(&mut self, start: usize, v: usize, len: usize, remaining: usize) {
        if len + remaining <= self.best {
            return;
        }
        for i in 0..self.adj[v].len() {
            let w = self.adj[v][i];
            if w == start && len >= 3 {
                self.best = self.best.max(len);
                if self.done() {
                    return;
                }
            } else if w > start && !self.visited[w] {
                self.visited[w] = true;
                self.extend(start, w, len + 1, remaining - 1);
                self.visited[w] = false;
                if self.done() {
                    return;
                }
            }
        }
    }
}

fn block_graphs(g: &LabelledGraph) -> Vec<LabelledGraph> {
    block_decomposition(g)
        .blocks
        .iter()
        .filter(|b| b.vertices.len() >= 3)
        .map(|b| b.graph())
        .collect()
}

/// Length of a longest cycle in a 2-connected graph (0 if it has < 3 vertices).
pub fn block_circumference(b: &LabelledGraph) -> usize {
    if b.n() < 3 {
        return 0;
    }
    CycleSearch::new(b, usize::MAX).run()
}

/// Length of a longest cycle; 0 for forests. Computed block by block.
pub fn circumference(g: &LabelledGraph) -> usize {
    block_graphs(g)
        .iter()
        .map(block_circumference)
        .max()
        .unwrap_or(0)
}

/// Whether the 2-connected graph `b` has a cycle of length at least `k`.
pub fn block_has_long_cycle(b: &LabelledGraph, k: usize) -> bool {
    if b.n() < k.max(3) {
        return false;
    }
    CycleSearch::new(b, k).run() >= k
}

/// Whether `g` has a cycle of length at least `k`.
pub fn has_long_cycle(g: &LabelledGraph, k: usize) -> bool {
    if k <= 3 {
        return g.edge_count() + g.components().len() > g.n();
    }
    block_decomposition(g)
        .blocks
        .iter()
        .filter(|b| b.vertices.len() >= k)
        .any(|b| block_has_long_cycle(&b.graph(), k))
}

/// Whether `g` has a path of length at least `len` from `a` to `b`, so that
/// adding the edge `ab` closes a cycle of length at least `len + 1`.
///
/// Every such path starts with a path of exactly `len` edges from `a` that
/// avoids `b` before its end; the rest of it joins the endpoint to `b`
/// outside the prefix. So only prefixes of length `len` are enumerated, each
/// followed by one search for the rest.
pub fn has_long_path_between(g: &LabelledGraph, a: usize, b: usize, len: usize) -> bool {
    if a == b {
        return false;
    }
    let n = g.n();
    let mut on_path = vec![false; n];
    let mut mark = vec![0u32; n];
    let mut stamp = 0u32;
    on_path[a] = true;

    // can `x` reach `b` through vertices off the prefix?
    let mut reaches = |x: usize, on_path: &[bool]| -> bool {
        stamp += 1;
        mark[x] = stamp;
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            for &z in g.neighbors(y) {
                if z == b {
                    return true;
                }
                if !on_path[z] && mark[z] != stamp {
                    mark[z] = stamp;
                    stack.push(z);
                }
            }
        }
        false
    };

    // explicit stack of (vertex, next neighbour index)
    let mut path: Vec<(usize, usize)> = vec![(a, 0)];
    while let Some(&(v, i)) = path.last() {
        let depth = path.len() - 1;
        if depth == len {
            let found = v == b || reaches(v, &on_path);
            if found {
                return true;
            }
            on_path[v] = false;
            path.pop();
            continue;
        }
        if let Some(&w) = g.neighbors(v).get(i) {
            path.last_mut().expect("non-empty").1 += 1;
            if on_path[w] || (w == b && depth + 1 < len) {
                continue;
            }
            on_path[w] = true;
            path.push((w, 0));
        } else {
            if v != a {
                on_path[v] = false;
            }
            path.pop();
        }
    }
    false
}

/// A `C_k` minor exists iff some cycle has length at least `k`.
pub fn has_cycle_minor(g: &LabelledGraph, k: usize) -> Result<bool> {
    if k < 3 {
        return Err(Error::InvalidCycleLength(k));
    }
    Ok(has_long_cycle(g, k))
}

/// Outerplanarity of a 2-connected graph by repeatedly removing degree-2
/// vertices: each removal turns the path `a - v - b` into an outer edge `ab`.
/// An edge that is already outer cannot be claimed again unless the graph
/// has shrunk to a triangle.
pub fn block_is_outerplanar(b: &LabelledGraph) -> bool {
    let n = b.n();
    if n <= 3 {
        return true;
    }
    if b.edge_count() > 2 * n - 3 {
        return false;
    }
    let mut adj: Vec<HashSet<usize>> = (0..n).map(|v| b.neighbors(v).iter().copied().collect()).collect();
    let mut outer: HashSet<(usize, usize)> = HashSet::new();
    let key = |a: usize, c: usize| (a.min(c), a.max(c));
    let mut alive = n;
    let mut removed = vec![false; n];
    let mut queue: Vec<usize> = (0..n).filter(|&v| adj[v].len() == 2).collect();
    while alive > 3 {
        let Some(v) = queue.pop() else {
            return false;
        };
        if removed[v] || adj[v].len() != 2 {
            continue;
        }
        let mut it = adj[v].iter().copied();
        let (a, c) = (it.next().unwrap(), it.next().unwrap());
        let e = key(a, c);
        if adj[a].contains(&c) {
            if outer.contains(&e) {
                return false;
            }
        } else {
            adj[a].insert(c);
            adj[c].insert(a);
        }
        outer.insert(e);
        adj[a].remove(&v);
        adj[c].remove(&v);
        adj[v].clear();
        removed[v] = true;
        alive -= 1;
        for x in [a, c] {
            if adj[x].len() == 2 {
                queue.push(x);
            }
        }
    }
    true
}

pub fn is_outerplanar(g: &LabelledGraph) -> bool {
    if g.n() >= 2 && g.edge_count() > 2 * g.n() - 3 {
        return false;
    }
    block_graphs(g).iter().all(block_is_outerplanar)
}

pub fn is_forest(g: &LabelledGraph) -> bool {
    g.edge_count() + g.components().len() == g.n()
}

pub fn in_class(g: &LabelledGraph, c: GraphClass) -> bool {
    match c {
        GraphClass::ExCycle(k) => !has_long_cycle(g, k),
        GraphClass::Forest => is_forest(g),
        GraphClass::Tree => g.n() >= 1 && g.is_connected() && g.edge_count() + 1 == g.n(),
        GraphClass::Outerplanar => is_outerplanar(g),
    }
}

/// Backtracking search for an injective edge-preserving map `h -> g`.
fn has_subgraph(h: &LabelledGraph, g: &LabelledGraph) -> bool {
    if h.n() > g.n() || h.edge_count() > g.edge_count() {
        return false;
    }
    if h.n() == 0 {
        return true;
    }
    // pattern order: breadth first from a maximum-degree vertex, ties by label
    let mut order = Vec::with_capacity(h.n());
    let mut placed = vec![false; h.n()];
    while order.len() < h.n() {
        let root = (0..h.n())
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (h.degree(v), std::cmp::Reverse(v)))
            .unwrap();
        placed[root] = true;
        let mut head = order.len();
        order.push(root);
        while head < order.len() {
            let x = order[head];
            head += 1;
            let mut next: Vec<usize> = h.neighbors(x).iter().copied().filter(|&y| !placed[y]).collect();
            next.sort_by_key(|&y| (std::cmp::Reverse(h.degree(y)), y));
            for y in next {
                placed[y] = true;
                order.push(y);
            }
        }
    }
    let mut image = vec![usize::MAX; h.n()];
    let mut used = vec![false; g.n()];
    fn go(
        i: usize,
        order: &[usize],
        h: &LabelledGraph,
        g: &LabelledGraph,
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let x = order[i];
        let mapped: Vec<usize> = h.neighbors(x).iter().map(|&y| image[y]).filter(|&t| t != usize::MAX).collect();
        let candidates: Vec<usize> = match mapped.first() {
            Some(&t) => g.neighbors(t).to_vec(),
            None => (0..g.n()).collect(),
        };
        for c in candidates {
            if used[c] || g.degree(c) < h.degree(x) || !mapped.iter().all(|&t| g.has_edge(c, t)) {
                continue;
            }
            used[c] = true;
            image[x] = c;
            if go(i + 1, order, h, g, image, used) {
                return true;
            }
            image[x] = usize::MAX;
            used[c] = false;
        }
        false
    }
    go(0, &order, h, g, &mut image, &mut used)
}

struct MinorSearch<'a> {
    pattern: &'a LabelledGraph,
    blockwise: bool,
    seen: HashSet<Vec<u8>>,
}

impl MinorSearch<'_> {
    /// `g` is connected (2-connected in blockwise mode).
    fn search(&mut self, g: &LabelledGraph) -> bool {
        let h = self.pattern;
        if g.n() < h.n() || g.edge_count() < h.edge_count() {
            return false;
        }
        if g.n() <= ENGINE_LIMIT {
            let code = canonical_code_bounded(g, ENGINE_LIMIT).expect("within engine limit");
            if !self.seen.insert(code) {
                return false;
            }
        }
        if has_subgraph(h, g) {
            return true;
        }
        if g.n() == h.n() {
            return false;
        }
        for (a, b) in g.edges() {
            let c = g.contract(a, b);
            if self.blockwise {
                for piece in block_graphs(&c) {
                    if self.search(&piece) {
                        return true;
                    }
                }
            } else if self.search(&c) {
                return true;
            }
        }
        false
    }
}

/// Exact minor test for a connected pattern with at most ten vertices.
///
/// Within a connected host every minor model can be grown until its branch
/// sets cover all vertices, so it suffices to search the contractions of
/// each component (each block, when the pattern is 2-connected) for a copy
/// of the pattern as a subgraph. Contractions are memoized by canonical code.
pub fn has_minor(g: &LabelledGraph, h: &LabelledGraph) -> Result<bool> {
    if h.n() > MINOR_PATTERN_LIMIT {
        return Err(Error::PatternTooLarge(h.n()));
    }
    if !h.is_connected() {
        return Err(Error::PatternDisconnected);
    }
    if h.n() <= 1 {
        return Ok(g.n() >= h.n());
    }
    let blockwise = h.is_two_connected();
    let pieces: Vec<LabelledGraph> = if blockwise {
        block_graphs(g)
    } else {
        g.components()
            .into_iter()
            .filter(|c| c.len() >= h.n())
            .map(|c| g.induced(&c))
            .collect()
    };
    let mut search = MinorSearch {
        pattern: h,
        blockwise,
        seen: HashSet::new(),
    };
    Ok(pieces.iter().any(|p| search.search(p)))
}

/// Whether the 2-connected graph `h` is a minor of some fan: a vertex `v`
/// exists with `h - v` a path whose two ends are both adjacent to `v`.
pub fn is_fan_minor(h: &LabelledGraph) -> Result<bool> {
    if !h.is_two_connected() {
        return Err(Error::NotTwoConnected);
    }
    let n = h.n();
    Ok((0..n).any(|v| {
        let rest = h.remove_vertex(v);
        let ends: Vec<usize> = (0..n - 1).filter(|&x| rest.degree(x) <= 1).collect();
        let is_path = rest.is_connected()
            && rest.edge_count() + 1 == rest.n()
            && (0..rest.n()).all(|x| rest.degree(x) <= 2);
        if !is_path || ends.len() != 2 {
            return false;
        }
        let lift = |x: usize| if x >= v { x + 1 } else { x };
        ends.iter().all(|&x| h.has_edge(v, lift(x)))
    }))
}
