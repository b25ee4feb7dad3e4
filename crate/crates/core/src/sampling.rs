//! Uniform random class members.
//!
//! The exact sampler walks the counting recurrence top down: components by
//! the exponential formula, then at each root the set of root-block
//! structures, then for each structure the block size (or, for Ex(C5), the
//! position of the root in a `K_{2,m}`), label sets by uniform subsets, and
//! finally a uniform labelled block of the chosen size. All choices are
//! integer draws below exact counts, so results depend only on the seed.
//!
//! Trees use Prüfer sequences. The Metropolis chain is kept as an
//! independent cross-check.

use std::collections::HashMap;

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blocks::merged_block_vertices;
use crate::counting::{binomial_row, block_types, count_limit, BlockType, CountTable, Recurrence};
use crate::error::{Error, Result};
use crate::graph::LabelledGraph;
use crate::minors::{block_is_outerplanar, has_long_path_between, GraphClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Exact,
    Mcmc { steps: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub class: GraphClass,
    pub n: usize,
    pub seed: u64,
    pub method: Method,
}

/// The generator for stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform labelled tree on `n >= 1` vertices.
pub fn sample_tree<R: Rng>(n: usize, rng: &mut R) -> LabelledGraph {
    if n <= 2 {
        return LabelledGraph::from_edges(n, (n == 2).then_some((0, 1))).expect("valid");
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &code {
        degree[x] += 1;
    }
    // linear-time decoding
    let mut edges = Vec::with_capacity(n - 1);
    let mut ptr = degree.iter().position(|&d| d == 1).expect("a leaf exists");
    let mut leaf = ptr;
    for &x in &code {
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 && x < ptr {
            leaf = x;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf, n - 1));
    LabelledGraph::from_edges(n, edges).expect("valid")
}

/// Index of the option hit by a uniform draw below the sum of `weights`.
fn pick<R: Rng>(rng: &mut R, weights: &[BigUint]) -> usize {
    let total: BigUint = weights.iter().sum();
    let mut u = rng.gen_biguint_below(&total);
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    unreachable!("draw below the total")
}

/// Split off the part holding `labels[0]`, of size `a`, with the rest of the
/// part a uniform subset. Returns (part, remainder).
fn split_min<R: Rng>(rng: &mut R, labels: &[usize], a: usize) -> (Vec<usize>, Vec<usize>) {
    let (part, rest) = split_any(rng, &labels[1..], a - 1);
    let mut with_min = vec![labels[0]];
    with_min.extend(part);
    (with_min, rest)
}

/// A uniform `a`-subset of `labels` and its complement.
fn split_any<R: Rng>(rng: &mut R, labels: &[usize], a: usize) -> (Vec<usize>, Vec<usize>) {
    let mut chosen = vec![false; labels.len()];
    for i in index::sample(rng, labels.len(), a) {
        chosen[i] = true;
    }
    let mut part = Vec::with_capacity(a);
    let mut rest = Vec::with_capacity(labels.len() - a);
    for (i, &l) in labels.iter().enumerate() {
        if chosen[i] {
            part.push(l);
        } else {
            rest.push(l);
        }
    }
    (part, rest)
}

enum Task {
    /// Rooted member on `root` plus `rest`.
    Rooted(usize, Vec<usize>),
    /// One root-block structure at `root` over the labels.
    Structure(usize, Vec<usize>),
}

/// Exact uniform sampler over the members of one class on up to `n_max`
/// vertices.
#[derive(Clone, Debug)]
pub struct ExactSampler {
    class: GraphClass,
    rec: Recurrence,
    /// Block types by size, for sizes handled through `b`.
    library: Vec<Vec<BlockType>>,
}

impl ExactSampler {
    /// Prepare a sampler from a count table, rejecting tables that do not
    /// reproduce under the recurrence for their class.
    pub fn new(table: &CountTable) -> Result<Self> {
        let rec = Recurrence::from_blocks(table.class, table.b.clone());
        if rec.c_rooted != table.c_rooted || rec.g != table.g || rec.c != table.c {
            return Err(Error::ClassMismatch(format!(
                "count table does not follow the recurrence for {}",
                table.class
            )));
        }
        let mut library = vec![Vec::new(); rec.generic_max + 1];
        for (k, slot) in library.iter_mut().enumerate().skip(2) {
            if k >= rec.b.len() || rec.b[k].is_zero() {
                continue;
            }
            let types = block_types(table.class, k)?;
            let total: BigUint = types.iter().map(|t| &t.weight).sum();
            if total != rec.b[k] {
                return Err(Error::ClassMismatch(format!(
                    "b_{k} = {} in the table, {} from the block types of {}",
                    rec.b[k], total, table.class
                )));
            }
            *slot = types;
        }
        Ok(ExactSampler {
            class: table.class,
            rec,
            library,
        })
    }

    pub fn class(&self) -> GraphClass {
        self.class
    }

    pub fn n_max(&self) -> usize {
        self.rec.n_max
    }

    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Result<LabelledGraph> {
        if n == 0 {
            return Err(Error::InvalidParameters("n must be at least 1".into()));
        }
        if n > self.rec.n_max {
            return Err(Error::TableTooSmall {
                n,
                max: self.rec.n_max,
            });
        }
        if self.class == GraphClass::Tree {
            return Ok(sample_tree(n, rng));
        }
        let r = &self.rec;
        let mut edges = Vec::new();
        let mut tasks = Vec::new();
        let mut labels: Vec<usize> = (0..n).collect();
        while !labels.is_empty() {
            let m = labels.len();
            let row = binomial_row(m - 1);
            let weights: Vec<BigUint> = (1..=m).map(|a| &row[a - 1] * &r.c[a] * &r.g[m - a]).collect();
            let a = pick(rng, &weights) + 1;
            let (part, rest) = split_min(rng, &labels, a);
            tasks.push(Task::Rooted(part[0], part[1..].to_vec()));
            labels = rest;
        }
        while let Some(task) = tasks.pop() {
            match task {
                Task::Rooted(root, mut rest) => {
                    while !rest.is_empty() {
                        let m = rest.len();
                        let row = binomial_row(m - 1);
                        let weights: Vec<BigUint> =
                            (1..=m).map(|j| &row[j - 1] * &r.f[j] * &r.e[m - j]).collect();
                        let j = pick(rng, &weights) + 1;
                        let (part, remainder) = split_min(rng, &rest, j);
                        tasks.push(Task::Structure(root, part));
                        rest = remainder;
                    }
                }
                Task::Structure(root, part) => self.structure(root, part, rng, &mut edges, &mut tasks),
            }
        }
        Ok(LabelledGraph::from_edges(n, edges).expect("labels in range"))
    }

    fn structure<R: Rng>(
        &self,
        root: usize,
        labels: Vec<usize>,
        rng: &mut R,
        edges: &mut Vec<(usize, usize)>,
        tasks: &mut Vec<Task>,
    ) {
        let r = &self.rec;
        let m = labels.len();
        // options: generic block sizes, then the two K_{2,j} positions per split
        let sizes: Vec<usize> = (2..=r.generic_max.min(m + 1)).collect();
        let mut weights: Vec<BigUint> = sizes.iter().map(|&k| &r.b[k] * &r.s[k - 1][m]).collect();
        let row = if r.k2m_tail { binomial_row(m) } else { Vec::new() };
        if r.k2m_tail {
            for a in 0..=m {
                weights.push(&row[a] * &r.c_rooted[a] * &r.x_at_least[3][m - a] * 2u32);
            }
            for a in 0..=m {
                weights.push(&row[a] * &r.s[2][a] * &r.x_at_least[2][m - a] * 2u32);
            }
        }
        let choice = pick(rng, &weights);
        if choice < sizes.len() {
            let k = sizes[choice];
            let roots = self.rooted_set(&labels, k - 1, None, rng, tasks);
            let types = &self.library[k];
            let t = &types[pick(rng, &types.iter().map(|t| t.weight.clone()).collect::<Vec<_>>())];
            let mut targets = vec![root];
            targets.extend(roots);
            let perm = index::sample(rng, k, k).into_vec();
            for (x, y) in t.graph.edges() {
                edges.push((targets[perm[x]], targets[perm[y]]));
            }
            return;
        }
        let choice = choice - sizes.len();
        let (root_is_hub, a) = (choice <= m, choice % (m + 1));
        let (first, rest) = split_any(rng, &labels, a);
        let hubs = if root_is_hub {
            vec![root, self.rooted_set(&first, 1, None, rng, tasks)[0]]
        } else {
            self.rooted_set(&first, 2, None, rng, tasks)
        };
        let mut middles = self.rooted_set(&rest, 0, Some(if root_is_hub { 3 } else { 2 }), rng, tasks);
        if !root_is_hub {
            middles.push(root);
        }
        for &x in &middles {
            edges.push((x, hubs[0]));
            edges.push((x, hubs[1]));
        }
        if rng.gen::<bool>() {
            edges.push((hubs[0], hubs[1]));
        }
    }

    /// Split `labels` into a uniform set of rooted members: exactly `j` of
    /// them, or at least `at_least` when given. Returns the roots and queues
    /// the members.
    fn rooted_set<R: Rng>(
        &self,
        labels: &[usize],
        j: usize,
        at_least: Option<usize>,
        rng: &mut R,
        tasks: &mut Vec<Task>,
    ) -> Vec<usize> {
        let r = &self.rec;
        let mut roots = Vec::new();
        let mut labels = labels.to_vec();
        let mut need = at_least.unwrap_or(j);
        while !labels.is_empty() {
            let m = labels.len();
            let below: &[BigUint] = match at_least {
                Some(_) => &r.x_at_least[need.saturating_sub(1)],
                None => &r.s[need - 1],
            };
            let row = binomial_row(m - 1);
            let weights: Vec<BigUint> = (1..=m).map(|a| &row[a - 1] * &r.c_rooted[a] * &below[m - a]).collect();
            let a = pick(rng, &weights) + 1;
            let (part, rest) = split_min(rng, &labels, a);
            let pos = rng.gen_range(0..part.len());
            let root = part[pos];
            let others: Vec<usize> = part.iter().copied().filter(|&x| x != root).collect();
            tasks.push(Task::Rooted(root, others));
            roots.push(root);
            labels = rest;
            need = need.saturating_sub(1);
        }
        debug_assert!(at_least.is_some() || roots.len() == j);
        roots
    }
}

/// A sampler for a class and sizes up to `n_max`: Prüfer sequences for
/// trees, otherwise the exact sampler on a freshly built table.
pub fn sampler_for(class: GraphClass, n_max: usize) -> Result<Sampler> {
    if class == GraphClass::Tree {
        return Ok(Sampler::Tree);
    }
    let limit = count_limit(class)?;
    if n_max > limit {
        return Err(Error::SamplerUnavailable(format!(
            "exact counts for {class} stop at n = {limit}, requested {n_max}"
        )));
    }
    let table = crate::counting::class_count_table(class, n_max.max(2))?;
    Ok(Sampler::Exact(Box::new(ExactSampler::new(&table)?)))
}

#[derive(Clone, Debug)]
pub enum Sampler {
    Tree,
    Exact(Box<ExactSampler>),
}

impl Sampler {
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Result<LabelledGraph> {
        match self {
            Sampler::Tree if n == 0 => Err(Error::InvalidParameters("n must be at least 1".into())),
            Sampler::Tree => Ok(sample_tree(n, rng)),
            Sampler::Exact(s) => s.sample(n, rng),
        }
    }
}

/// Exact uniform sample per `cfg`, driven by `table`.
pub fn sample_uniform(cfg: &SamplerConfig, table: &CountTable) -> Result<LabelledGraph> {
    if cfg.class != table.class {
        return Err(Error::ClassMismatch(format!(
            "config asks for {}, table is for {}",
            cfg.class, table.class
        )));
    }
    if cfg.n > table.n_max {
        return Err(Error::TableTooSmall {
            n: cfg.n,
            max: table.n_max,
        });
    }
    let mut rng = rng_for(cfg.seed, 0);
    ExactSampler::new(table)?.sample(cfg.n, &mut rng)
}

/// Whether adding edge `ab` to the member `g` keeps it in the class. Only the
/// block the new edge creates needs checking.
pub fn addition_stays_in_class(g: &LabelledGraph, a: usize, b: usize, class: GraphClass) -> bool {
    match class {
        // a new cycle of length >= k runs through ab
        GraphClass::ExCycle(k) => !has_long_path_between(g, a, b, k - 1),
        GraphClass::Forest | GraphClass::Tree => merged_block_vertices(g, a, b).len() == 2,
        GraphClass::Outerplanar => {
            let verts = merged_block_vertices(g, a, b);
            if verts.len() == 2 {
                return true;
            }
            let mut block = g.induced(&verts);
            let at = |x: usize| verts.binary_search(&x).expect("ends lie in the block");
            block.add_edge(at(a), at(b));
            block_is_outerplanar(&block)
        }
    }
}

/// Metropolis chain from the empty graph (a path for trees). Pairs are
/// proposed uniformly and toggled when the result stays in the class; trees
/// instead swap a uniform edge for a uniform non-edge.
pub fn sample_mcmc(cfg: &SamplerConfig) -> Result<LabelledGraph> {
    let Method::Mcmc { steps } = cfg.method else {
        return Err(Error::InvalidParameters("sample_mcmc needs the MCMC method".into()));
    };
    let mut rng = rng_for(cfg.seed, 0);
    Ok(mcmc_chain(cfg.class, cfg.n, steps, &mut rng))
}

pub fn mcmc_chain<R: Rng>(class: GraphClass, n: usize, steps: u64, rng: &mut R) -> LabelledGraph {
    McmcRunner::new(class, n).run(steps, rng)
}

/// Largest `n` whose edge sets fit a 64-bit mask.
const MASK_LIMIT: usize = 11;

/// Runs Metropolis chains for one class and size. On small vertex sets the
/// state is an edge mask and class checks are remembered across chains.
pub struct McmcRunner {
    class: GraphClass,
    n: usize,
    pairs: Vec<(usize, usize)>,
    memo: HashMap<u64, bool>,
}

impl McmcRunner {
    pub fn new(class: GraphClass, n: usize) -> Self {
        let pairs = (0..n).flat_map(|b| (0..b).map(move |a| (a, b))).collect();
        McmcRunner {
            class,
            n,
            pairs,
            memo: HashMap::new(),
        }
    }

    fn pair_bit(&self, a: usize, b: usize) -> u64 {
        1 << (b * (b - 1) / 2 + a)
    }

    fn graph_of(&self, mask: u64) -> LabelledGraph {
        let edges = self.pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p);
        LabelledGraph::from_edges(self.n, edges).expect("pairs in range")
    }

    pub fn run<R: Rng>(&mut self, steps: u64, rng: &mut R) -> LabelledGraph {
        let n = self.n;
        if n < 2 {
            return LabelledGraph::empty(n);
        }
        if self.class == GraphClass::Tree {
            return tree_chain(n, steps, rng);
        }
        if n > MASK_LIMIT {
            let mut g = LabelledGraph::empty(n);
            for _ in 0..steps {
                let (a, b) = uniform_pair(n, rng);
                if g.has_edge(a, b) {
                    g.remove_edge(a, b);
                } else if addition_stays_in_class(&g, a, b, self.class) {
                    g.add_edge(a, b);
                }
            }
            return g;
        }
        let mut mask = 0u64;
        for _ in 0..steps {
            let (a, b) = uniform_pair(n, rng);
            let bit = self.pair_bit(a, b);
            if mask & bit != 0 {
                mask ^= bit;
                continue;
            }
            let next = mask | bit;
            let ok = match self.memo.get(&next) {
                Some(&ok) => ok,
                None => {
                    let ok = addition_stays_in_class(&self.graph_of(mask), a, b, self.class);
                    self.memo.insert(next, ok);
                    ok
                }
            };
            if ok {
                mask = next;
            }
        }
        self.graph_of(mask)
    }
}

fn uniform_pair<R: Rng>(n: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a.min(b), a.max(b))
}

fn tree_chain<R: Rng>(n: usize, steps: u64, rng: &mut R) -> LabelledGraph {
    let mut g = crate::graph::named::path(n);
    if n == 2 {
        return g;
    }
    for _ in 0..steps {
        let edges = g.edges();
        let (x, y) = edges[rng.gen_range(0..edges.len())];
        // uniform non-edge by rejection
        let (a, b) = loop {
            let p = uniform_pair(n, rng);
            if !g.has_edge(p.0, p.1) {
                break p;
            }
        };
        g.remove_edge(x, y);
        if g.is_connected() || !g.with_edge(a, b).is_connected() {
            g.add_edge(x, y);
            continue;
        }
        g.add_edge(a, b);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::class_count_table;
    use crate::minors::in_class;

    #[test]
    fn single_vertex() {
        let t = class_count_table(GraphClass::ExCycle(5), 4).unwrap();
        let cfg = SamplerConfig {
            class: GraphClass::ExCycle(5),
            n: 1,
            seed: 3,
            method: Method::Exact,
        };
        let g = sample_uniform(&cfg, &t).unwrap();
        assert_eq!((g.n(), g.edge_count()), (1, 0));
    }

    #[test]
    fn errors() {
        let t = class_count_table(GraphClass::ExCycle(5), 6).unwrap();
        let mut cfg = SamplerConfig {
            class: GraphClass::ExCycle(4),
            n: 4,
            seed: 1,
            method: Method::Exact,
        };
        assert!(matches!(sample_uniform(&cfg, &t), Err(Error::ClassMismatch(_))));
        cfg.class = GraphClass::ExCycle(5);
        cfg.n = 7;
        assert!(matches!(sample_uniform(&cfg, &t), Err(Error::TableTooSmall { n: 7, max: 6 })));
        let mut bad = t.clone();
        bad.g[3] += 1u32;
        cfg.n = 3;
        assert!(matches!(sample_uniform(&cfg, &bad), Err(Error::ClassMismatch(_))));
        assert!(matches!(sampler_for(GraphClass::ExCycle(7), 20), Err(Error::SamplerUnavailable(_))));
    }

    #[test]
    fn prufer_trees() {
        let mut rng = rng_for(5, 0);
        for n in 1..60 {
            let t = sample_tree(n, &mut rng);
            assert!(in_class(&t, GraphClass::Tree), "n={n}");
        }
    }

    #[test]
    fn samples_stay_in_class() {
        for class in [
            GraphClass::Forest,
            GraphClass::ExCycle(4),
            GraphClass::ExCycle(5),
            GraphClass::ExCycle(6),
            GraphClass::ExCycle(7),
            GraphClass::Outerplanar,
        ] {
            let n = if matches!(class, GraphClass::ExCycle(7) | GraphClass::Outerplanar) { 8 } else { 30 };
            let s = sampler_for(class, n).unwrap();
            let mut rng = rng_for(11, 0);
            for size in 1..=n {
                let g = s.sample(size, &mut rng).unwrap();
                assert_eq!(g.n(), size);
                assert!(in_class(&g, class), "{class} n={size}");
            }
        }
    }

    #[test]
    fn deterministic() {
        let s = sampler_for(GraphClass::ExCycle(5), 40).unwrap();
        let a = s.sample(40, &mut rng_for(9, 2)).unwrap();
        let b = s.sample(40, &mut rng_for(9, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mcmc_stays_in_class() {
        let mut rng = rng_for(4, 0);
        for class in [GraphClass::ExCycle(5), GraphClass::Tree, GraphClass::Outerplanar] {
            let g = mcmc_chain(class, 15, 3000, &mut rng);
            assert!(in_class(&g, class));
        }
    }
}
