//! Canonical labelling and automorphism groups by individualization and
//! refinement with automorphism pruning.
//!
//! The search tree is the usual one: a node is an ordered partition refined
//! to equitability, children individualize each vertex of the first smallest
//! non-singleton cell. Leaves are ranked by (refinement trace, permuted
//! adjacency rows); the smallest leaf gives the canonical form. Two leaves
//! with equal keys yield an automorphism, which is stored as a generator and
//! used to skip children lying in an already explored orbit.

use num_bigint::BigUint;
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::LabelledGraph;
use crate::io::to_graph6;

pub const DEFAULT_CANON_BOUND: usize = 16;
pub const DEFAULT_AUT_BOUND: usize = 64;
/// Hard limit of the bitset engine.
pub const ENGINE_LIMIT: usize = 64;

/// Outcome of a full search.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// `labelling[v]` is the canonical position of vertex `v`.
    pub labelling: Vec<usize>,
    pub graph: LabelledGraph,
    pub aut_order: BigUint,
    pub generators: Vec<Vec<usize>>,
}

#[derive(Clone)]
struct Leaf {
    seq: Vec<usize>,
    trace: Vec<u64>,
    code: Vec<u64>,
    perm: Vec<usize>,
}

impl Leaf {
    fn key_cmp(&self, trace: &[u64], code: &[u64]) -> Ordering {
        self.trace
            .as_slice()
            .cmp(trace)
            .then_with(|| self.code.as_slice().cmp(code))
    }
}

struct Search<'a> {
    rows: &'a [u64],
    n: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<usize>>,
}

#[inline]
fn mix(h: u64, x: u64) -> u64 {
    (h ^ x).wrapping_mul(0x0000_0100_0000_01b3).rotate_left(29)
}

/// Refine `cells` to the coarsest equitable refinement; returns a trace hash.
fn refine(rows: &[u64], cells: &mut Vec<Vec<usize>>) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    loop {
        let mut split = false;
        for s in 0..cells.len() {
            let mask = cells[s].iter().fold(0u64, |m, &v| m | 1 << v);
            let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len() + 1);
            let mut grew = false;
            for cell in cells.iter() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(u32, usize)> = cell
                    .iter()
                    .map(|&v| ((rows[v] & mask).count_ones(), v))
                    .collect();
                keyed.sort_unstable();
                let mut start = 0;
                let pieces_before = next.len();
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        next.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
                        h = mix(h, ((keyed[start].0 as u64) << 32) | (i - start) as u64);
                        start = i;
                    }
                }
                if next.len() - pieces_before > 1 {
                    grew = true;
                }
            }
            if grew {
                h = mix(h, s as u64);
                *cells = next;
                split = true;
                break;
            }
        }
        if !split {
            break;
        }
    }
    mix(h, cells.len() as u64)
}

fn orbit_roots(n: usize, gens: &[&Vec<usize>]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for g in gens {
        for v in 0..n {
            let (a, b) = (find(&mut parent, v), find(&mut parent, g[v]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

/// Swapping two vertices with the same neighbours (apart from each other)
/// is an automorphism; seeding the search with these saves exploring them.
fn twin_transpositions(rows: &[u64]) -> Vec<Vec<usize>> {
    let n = rows.len();
    let mut seen = vec![false; n];
    let mut gens = Vec::new();
    for u in 0..n {
        if seen[u] {
            continue;
        }
        let mut prev = u;
        for v in u + 1..n {
            if !seen[v] && rows[u] & !(1 << v) == rows[v] & !(1 << u) {
                seen[v] = true;
                let mut g: Vec<usize> = (0..n).collect();
                g.swap(prev, v);
                gens.push(g);
                prev = v;
            }
        }
    }
    gens
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl Search<'_> {
    fn leaf_code(&self, cells: &[Vec<usize>]) -> (Vec<usize>, Vec<u64>) {
        let mut perm = vec![0; self.n];
        for (p, c) in cells.iter().enumerate() {
            perm[c[0]] = p;
        }
        let mut code = vec![0u64; self.n];
        for v in 0..self.n {
            let mut r = self.rows[v];
            let mut out = 0u64;
            while r != 0 {
                let u = r.trailing_zeros() as usize;
                r &= r - 1;
                out |= 1 << perm[u];
            }
            code[perm[v]] = out;
        }
        (perm, code)
    }

    fn automorphism(&self, from: &Leaf, perm: &[usize]) -> Vec<usize> {
        let mut inv = vec![0; self.n];
        for (v, &p) in perm.iter().enumerate() {
            inv[p] = v;
        }
        (0..self.n).map(|v| inv[from.perm[v]]).collect()
    }

    /// Returns `Some(d)` to unwind to the ancestor at depth `d`.
    fn visit(&mut self, mut cells: Vec<Vec<usize>>, seq: &mut Vec<usize>, trace: &mut Vec<u64>) -> Option<usize> {
        let inv = refine(self.rows, &mut cells);
        trace.push(inv);
        let result = self.visit_refined(cells, seq, trace);
        trace.pop();
        result
    }

    fn visit_refined(&mut self, cells: Vec<Vec<usize>>, seq: &mut Vec<usize>, trace: &[u64]) -> Option<usize> {
        let depth = seq.len();
        if let (Some(first), Some(best)) = (&self.first, &self.best) {
            let k = trace.len().min(first.trace.len());
            let eq_first = trace.len() <= first.trace.len() && first.trace[..k] == trace[..k];
            let kb = trace.len().min(best.trace.len());
            let vs_best = trace.cmp(&best.trace[..kb]);
            let vs_best = if vs_best == Ordering::Equal && trace.len() > best.trace.len() {
                Ordering::Greater
            } else {
                vs_best
            };
            if !eq_first && vs_best == Ordering::Greater {
                return None;
            }
        }

        let target = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .min_by_key(|(i, c)| (c.len(), *i))
            .map(|(i, _)| i);

        let Some(ti) = target else {
            let (perm, code) = self.leaf_code(&cells);
            let leaf = Leaf {
                seq: seq.clone(),
                trace: trace.to_vec(),
                code,
                perm,
            };
            let Some(first) = &self.first else {
                self.first = Some(leaf.clone());
                self.best = Some(leaf);
                return None;
            };
            if first.key_cmp(&leaf.trace, &leaf.code) == Ordering::Equal {
                let gamma = self.automorphism(first, &leaf.perm);
                let d = common_prefix(&first.seq, &leaf.seq);
                self.generators.push(gamma);
                return Some(d);
            }
            let best = self.best.as_ref().unwrap();
            match best.key_cmp(&leaf.trace, &leaf.code) {
                Ordering::Equal => {
                    let gamma = self.automorphism(best, &leaf.perm);
                    let d = common_prefix(&best.seq, &leaf.seq);
                    self.generators.push(gamma);
                    return Some(d);
                }
                Ordering::Greater => self.best = Some(leaf),
                Ordering::Less => {}
            }
            return None;
        };

        let mut candidates = cells[ti].clone();
        candidates.sort_unstable();
        let mut explored: Vec<usize> = Vec::new();
        for &w in &candidates {
            if !explored.is_empty() {
                let fixing: Vec<&Vec<usize>> = self
                    .generators
                    .iter()
                    .filter(|g| seq.iter().all(|&x| g[x] == x))
                    .collect();
                if !fixing.is_empty() {
                    let roots = orbit_roots(self.n, &fixing);
                    if explored.iter().any(|&e| roots[e] == roots[w]) {
                        continue;
                    }
                }
            }
            explored.push(w);
            let mut child = Vec::with_capacity(cells.len() + 1);
            for (i, c) in cells.iter().enumerate() {
                if i == ti {
                    child.push(vec![w]);
                    child.push(c.iter().copied().filter(|&x| x != w).collect());
                } else {
                    child.push(c.clone());
                }
            }
            seq.push(w);
            let mut tr = trace.to_vec();
            let jump = self.visit(child, seq, &mut tr);
            seq.pop();
            if let Some(d) = jump {
                if d < depth {
                    return Some(d);
                }
            }
        }
        None
    }
}

fn run_search(g: &LabelledGraph) -> CanonicalForm {
    let n = g.n();
    if n == 0 {
        return CanonicalForm {
            labelling: vec![],
            graph: g.clone(),
            aut_order: BigUint::from(1u32),
            generators: vec![],
        };
    }
    let rows = g.rows().expect("engine needs n <= 64").to_vec();
    let mut search = Search {
        rows: &rows,
        n,
        first: None,
        best: None,
        generators: twin_transpositions(&rows),
    };
    let mut seq = Vec::new();
    let mut trace = Vec::new();
    search.visit(vec![(0..n).collect()], &mut seq, &mut trace);

    let first = search.first.as_ref().unwrap();
    let mut order = BigUint::from(1u32);
    for d in 0..first.seq.len() {
        let prefix = &first.seq[..d];
        let fixing: Vec<&Vec<usize>> = search
            .generators
            .iter()
            .filter(|gen| prefix.iter().all(|&x| gen[x] == x))
            .collect();
        let roots = orbit_roots(n, &fixing);
        let v = first.seq[d];
        let size = roots.iter().filter(|&&r| r == roots[v]).count();
        order *= BigUint::from(size);
    }
    let best = search.best.take().unwrap();
    let graph = g.relabel(&best.perm);
    CanonicalForm {
        labelling: best.perm,
        graph,
        aut_order: order,
        generators: search.generators,
    }
}

/// Full canonical form; works for any graph with at most 64 vertices.
pub fn canonical_form(g: &LabelledGraph) -> Result<CanonicalForm> {
    if g.n() > ENGINE_LIMIT {
        return Err(Error::SizeBoundExceeded {
            n: g.n(),
            bound: ENGINE_LIMIT,
        });
    }
    Ok(run_search(g))
}

/// Isomorphism-invariant byte code (graph6 of the canonical relabelling).
pub fn canonical_code(g: &LabelledGraph) -> Result<Vec<u8>> {
    canonical_code_bounded(g, DEFAULT_CANON_BOUND)
}

pub fn canonical_code_bounded(g: &LabelledGraph, bound: usize) -> Result<Vec<u8>> {
    let bound = bound.min(ENGINE_LIMIT);
    if g.n() > bound {
        return Err(Error::SizeBoundExceeded { n: g.n(), bound });
    }
    Ok(to_graph6(&run_search(g).graph).into_bytes())
}

pub fn automorphism_count(g: &LabelledGraph) -> Result<BigUint> {
    automorphism_count_bounded(g, DEFAULT_AUT_BOUND)
}

pub fn automorphism_count_bounded(g: &LabelledGraph, bound: usize) -> Result<BigUint> {
    let bound = bound.min(ENGINE_LIMIT);
    if g.n() > bound {
        return Err(Error::SizeBoundExceeded { n: g.n(), bound });
    }
    Ok(run_search(g).aut_order)
}

pub fn are_isomorphic(a: &LabelledGraph, b: &LabelledGraph) -> Result<bool> {
    if a.n() != b.n() || a.edge_count() != b.edge_count() || a.sorted_degrees() != b.sorted_degrees() {
        return Ok(false);
    }
    Ok(canonical_code_bounded(a, ENGINE_LIMIT)? == canonical_code_bounded(b, ENGINE_LIMIT)?)
}
