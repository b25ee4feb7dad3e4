//! Block (biconnected component) decomposition.

use crate::error::{Error, Result};
use crate::graph::LabelledGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Sorted vertex set.
    pub vertices: Vec<usize>,
    /// Edges `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl Block {
    /// The block as a standalone graph; vertex `i` is `self.vertices[i]`.
    pub fn graph(&self) -> LabelledGraph {
        let index = |x: usize| self.vertices.binary_search(&x).unwrap();
        LabelledGraph::from_edges(
            self.vertices.len(),
            self.edges.iter().map(|&(a, b)| (index(a), index(b))),
        )
        .unwrap()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Number of block edges incident to `v`.
    pub fn degree_of(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockTree {
    pub blocks: Vec<Block>,
    pub cut_vertices: Vec<usize>,
    /// `incidence[v]` lists the blocks containing `v`.
    pub incidence: Vec<Vec<usize>>,
}

impl BlockTree {
    pub fn is_cut_vertex(&self, v: usize) -> bool {
        self.incidence[v].len() >= 2
    }

    /// Index of the block holding edge `ab`.
    pub fn block_of_edge(&self, a: usize, b: usize) -> Option<usize> {
        let e = (a.min(b), a.max(b));
        self.incidence[a]
            .iter()
            .copied()
            .find(|&i| self.blocks[i].edges.binary_search(&e).is_ok())
    }
}

/// Hopcroft–Tarjan with an explicit stack; isolated vertices yield no block.
pub fn block_decomposition(g: &LabelledGraph) -> BlockTree {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut blocks = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX || g.degree(root) == 0 {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // (vertex, parent, next neighbour index)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (v, parent, ref mut idx)) = stack.last_mut() {
            if *idx < g.degree(v) {
                let w = g.neighbors(v)[*idx];
                *idx += 1;
                if w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, v, 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        let mut edges = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            edges.push((e.0.min(e.1), e.0.max(e.1)));
                            if e == (p, v) {
                                break;
                            }
                        }
                        edges.sort_unstable();
                        let mut vertices: Vec<usize> =
                            edges.iter().flat_map(|&(a, b)| [a, b]).collect();
                        vertices.sort_unstable();
                        vertices.dedup();
                        blocks.push(Block { vertices, edges });
                    }
                }
            }
        }
    }

    blocks.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    let mut incidence = vec![Vec::new(); n];
    for (i, b) in blocks.iter().enumerate() {
        for &v in &b.vertices {
            incidence[v].push(i);
        }
    }
    let cut_vertices = (0..n).filter(|&v| incidence[v].len() >= 2).collect();
    BlockTree {
        blocks,
        cut_vertices,
        incidence,
    }
}

pub fn cut_vertices(g: &LabelledGraph) -> Vec<usize> {
    block_decomposition(g).cut_vertices
}

/// Per-block contribution to `deg(v)` for the blocks containing `v`.
pub fn root_degrees(g: &LabelledGraph, v: usize) -> Result<Vec<(usize, usize)>> {
    if v >= g.n() {
        return Err(Error::VertexOutOfRange(v + 1));
    }
    let bt = block_decomposition(g);
    Ok(root_degrees_in(&bt, v))
}

pub fn root_degrees_in(bt: &BlockTree, v: usize) -> Vec<(usize, usize)> {
    bt.incidence[v]
        .iter()
        .map(|&i| (i, bt.blocks[i].degree_of(v)))
        .collect()
}

/// Vertices (sorted) of the block containing edge `ab` after adding it to
/// `g`. One DFS from `a` over its component; it stops at the first finished
/// block holding both ends, since two blocks share at most one vertex.
pub fn merged_block_vertices(g: &LabelledGraph, a: usize, b: usize) -> Vec<usize> {
    const NONE: usize = usize::MAX;
    let n = g.n();
    let neighbour = |v: usize, i: usize| -> Option<usize> {
        let base = g.neighbors(v);
        match i.cmp(&base.len()) {
            std::cmp::Ordering::Less => Some(base[i]),
            std::cmp::Ordering::Equal if v == a => Some(b),
            std::cmp::Ordering::Equal if v == b => Some(a),
            _ => None,
        }
    };
    let mut disc = vec![NONE; n];
    let mut low = vec![NONE; n];
    disc[a] = 0;
    low[a] = 0;
    let mut time = 1;
    let mut stack = vec![a];
    let mut frames = vec![(a, NONE, 0usize)];
    while let Some(&(v, parent, i)) = frames.last() {
        if let Some(w) = neighbour(v, i) {
            frames.last_mut().expect("non-empty").2 += 1;
            if w == parent {
                continue;
            }
            if disc[w] == NONE {
                disc[w] = time;
                low[w] = time;
                time += 1;
                stack.push(w);
                frames.push((w, v, 0));
            } else {
                low[v] = low[v].min(disc[w]);
            }
            continue;
        }
        frames.pop();
        let Some(&(u, _, _)) = frames.last() else {
            break;
        };
        low[u] = low[u].min(low[v]);
        if low[v] >= disc[u] {
            let mut block = vec![u];
            loop {
                let x = stack.pop().expect("block vertices on the stack");
                block.push(x);
                if x == v {
                    break;
                }
            }
            if block.contains(&a) && block.contains(&b) {
                block.sort_unstable();
                return block;
            }
        }
    }
    unreachable!("a and b are joined by the added edge")
}
