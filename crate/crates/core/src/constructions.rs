//! The pendant-vertex constructions behind the double-counting bounds on
//! the maximum degree.
//!
//! Lower-bound transforms turn a graph of small maximum degree into one
//! with a planted gadget whose root `v1` is the unique vertex of maximum
//! degree, joined to the rest of the graph by one edge `v1 u`. Upper-bound
//! transforms take a vertex `v` of large degree and spread what hangs at
//! `v` over fresh pendant vertices in a tree-like way. Every transform
//! records enough to undo itself, and [`reconstruct`] does so through the
//! identification steps of the proofs.
//!
//! Vertex numbers in records are 0-based indices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use libm::lgamma;
use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::blocks::{block_decomposition, cut_vertices};
use crate::catalog::{build_gadget, GadgetSpec};
use crate::error::{Error, Result};
use crate::graph::{max_degree, pendant_vertices, LabelledGraph};
use crate::minors::{in_class, GraphClass};
use crate::sampling::rng_for;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TransformVariant {
    /// Star on `s + 1` pendants.
    LowerTree,
    /// Fan `F_h` on `h` pendants.
    LowerFan,
    /// Star whose leaves are paired by a matching.
    LowerC4,
    /// `F_{r, s/r}`.
    LowerC5,
    /// Hierarchical gadget for Ex(C_{2l+1}), `l >= 3`.
    LowerC2l1(usize),
    UpperTree,
    UpperExC4,
    UpperExC5,
}

impl TransformVariant {
    pub const ALL_BASIC: [TransformVariant; 7] = [
        TransformVariant::LowerTree,
        TransformVariant::LowerFan,
        TransformVariant::LowerC4,
        TransformVariant::LowerC5,
        TransformVariant::UpperTree,
        TransformVariant::UpperExC4,
        TransformVariant::UpperExC5,
    ];

    pub fn name(self) -> String {
        match self {
            TransformVariant::LowerTree => "lower-tree".into(),
            TransformVariant::LowerFan => "lower-fan".into(),
            TransformVariant::LowerC4 => "lower-c4".into(),
            TransformVariant::LowerC5 => "lower-c5".into(),
            TransformVariant::LowerC2l1(l) => format!("lower-c2l1-{l}"),
            TransformVariant::UpperTree => "upper-tree".into(),
            TransformVariant::UpperExC4 => "upper-exc4".into(),
            TransformVariant::UpperExC5 => "upper-exc5".into(),
        }
    }

    /// The class the variant works in.
    pub fn class(self) -> GraphClass {
        match self {
            TransformVariant::LowerTree | TransformVariant::UpperTree => GraphClass::Forest,
            // fans are outerplanar, and K4, K_{2,3} are no fan minors
            TransformVariant::LowerFan => GraphClass::Outerplanar,
            TransformVariant::LowerC4 | TransformVariant::UpperExC4 => GraphClass::ExCycle(4),
            TransformVariant::LowerC5 | TransformVariant::UpperExC5 => GraphClass::ExCycle(5),
            TransformVariant::LowerC2l1(l) => GraphClass::ExCycle(2 * l + 1),
        }
    }

    pub fn is_lower(self) -> bool {
        !matches!(
            self,
            TransformVariant::UpperTree | TransformVariant::UpperExC4 | TransformVariant::UpperExC5
        )
    }
}

impl fmt::Display for TransformVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for TransformVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.to_ascii_lowercase();
        Ok(match t.as_str() {
            "lower-tree" => TransformVariant::LowerTree,
            "lower-fan" => TransformVariant::LowerFan,
            "lower-c4" => TransformVariant::LowerC4,
            "lower-c5" => TransformVariant::LowerC5,
            "upper-tree" => TransformVariant::UpperTree,
            "upper-exc4" => TransformVariant::UpperExC4,
            "upper-exc5" => TransformVariant::UpperExC5,
            _ => {
                let l = t
                    .strip_prefix("lower-c2l1-")
                    .and_then(|x| x.parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown transform variant {s}")))?;
                if l < 3 {
                    return Err(Error::InvalidParameters(format!("lower-c2l1 needs l >= 3, got {l}")));
                }
                TransformVariant::LowerC2l1(l)
            }
        })
    }
}

impl From<TransformVariant> for String {
    fn from(v: TransformVariant) -> String {
        v.name()
    }
}

impl TryFrom<String> for TransformVariant {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Inputs of a transform. Unset sizes follow the formulas of the proofs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    /// `s` (or `h` for the fan).
    pub size: Option<usize>,
    pub eps: f64,
    /// Fraction `c` of the upper transforms; constant of the fan and
    /// hierarchical sizes.
    pub c: Option<f64>,
    pub alpha: f64,
    /// Group size of `F_{r, s/r}`.
    pub r: Option<usize>,
}

impl Default for TransformParams {
    fn default() -> Self {
        TransformParams {
            size: None,
            eps: 0.5,
            c: None,
            alpha: 0.3,
            r: None,
        }
    }
}

/// The parameter values a transform actually used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub variant: TransformVariant,
    /// Gadget size `s` (`h` for the fan) or number of fresh vertices.
    pub size: usize,
    /// Degree of `v` for the upper transforms.
    pub k: Option<usize>,
    pub c: Option<f64>,
    pub eps: f64,
    pub r: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Witness {
    /// Each moved pendant and its neighbour before the transform.
    pub attachments: BTreeMap<usize, usize>,
    /// Further edges of the input removed by the transform.
    pub removed: Vec<(usize, usize)>,
}

mod graph6_field {
    use crate::graph::LabelledGraph;
    use crate::io::{from_graph6, to_graph6};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(g: &LabelledGraph, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_graph6(g))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<LabelledGraph, D::Error> {
        from_graph6(&String::deserialize(d)?).map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    #[serde(with = "graph6_field")]
    pub result: LabelledGraph,
    /// Gadget root for lower transforms, the high-degree vertex otherwise.
    pub v1: usize,
    pub u: Option<usize>,
    /// The moved pendant vertices.
    pub pendants: Vec<usize>,
    pub params: ResolvedParams,
    pub witness: Witness,
}

fn iterated_ln(x: f64, times: usize) -> f64 {
    (0..times).fold(x, |acc, _| acc.ln())
}

fn ceil_size(x: f64) -> Result<usize> {
    if !x.is_finite() || x < 1.0 {
        return Err(Error::InvalidParameters(format!(
            "size formula gives {x:.4}; pass an explicit size"
        )));
    }
    Ok((x - 1e-9).ceil() as usize)
}

fn eps_ok(eps: f64, max: f64) -> Result<()> {
    if !(eps > 0.0 && eps < max) {
        return Err(Error::InvalidParameters(format!("eps must lie in (0, {max}), got {eps}")));
    }
    Ok(())
}

/// `s` (or `h`) of a lower variant at `n` when none is given.
pub fn default_size(variant: TransformVariant, n: f64, p: &TransformParams) -> Result<usize> {
    let ln = n.ln();
    match variant {
        TransformVariant::LowerTree => {
            eps_ok(p.eps, 1.0)?;
            ceil_size((1.0 - p.eps) * ln / iterated_ln(n, 2))
        }
        TransformVariant::LowerFan => ceil_size(p.c.unwrap_or(1.0) * ln),
        TransformVariant::LowerC4 => {
            eps_ok(p.eps, 2.0)?;
            ceil_size((2.0 - p.eps) * ln / iterated_ln(n, 2))
        }
        TransformVariant::LowerC5 => {
            eps_ok(p.eps, 1.0)?;
            ceil_size((1.0 - p.eps) * ln / iterated_ln(n, 3))
        }
        TransformVariant::LowerC2l1(l) => {
            let c = p.c.unwrap_or(0.5 / l as f64);
            ceil_size(c * ln / iterated_ln(n, l + 1))
        }
        _ => Err(Error::InvalidParameters(format!("{variant} has no gadget size"))),
    }
}

/// Group size `r = 2 log s / (eps log log s)` of `F_{r, s/r}`, at least 2.
pub fn default_group_size(s: usize, eps: f64) -> usize {
    let s = s as f64;
    let r = 2.0 * s.ln() / (eps * iterated_ln(s, 2));
    if r.is_finite() && r >= 2.0 {
        (r + 0.5).floor() as usize
    } else {
        2
    }
}

fn choose<R: Rng>(rng: &mut R, items: &[usize], amount: usize) -> Vec<usize> {
    index::sample(rng, items.len(), amount).into_iter().map(|i| items[i]).collect()
}

/// Unplug each pendant in `chosen`, remembering where it hung.
fn detach(g: &mut LabelledGraph, chosen: &[usize], witness: &mut Witness) {
    for &p in chosen {
        if let Some(&w) = g.neighbors(p).first() {
            witness.attachments.insert(p, w);
            g.remove_edge(p, w);
        }
    }
}

/// Plant a gadget on pendants of `g` and hang it from a vertex `u`.
pub fn lower_bound_transform(
    g: &LabelledGraph,
    variant: TransformVariant,
    params: &TransformParams,
    seed: u64,
) -> Result<TransformRecord> {
    if !variant.is_lower() {
        return Err(Error::InvalidParameters(format!("{variant} is an upper-bound variant")));
    }
    let class = variant.class();
    if !in_class(g, class) {
        return Err(Error::NotInClass(class.id()));
    }
    let size = match params.size {
        Some(s) => s,
        None => default_size(variant, g.n() as f64, params)?,
    };
    let mut r_used = None;
    let (spec, size) = match variant {
        TransformVariant::LowerTree => (GadgetSpec::Star { s: size }, size),
        TransformVariant::LowerFan => (GadgetSpec::Fan { n: size }, size),
        TransformVariant::LowerC4 => (GadgetSpec::StarMatching { s: size }, size),
        TransformVariant::LowerC5 => {
            let r = params.r.unwrap_or_else(|| default_group_size(size, params.eps));
            r_used = Some(r);
            let m = size.div_ceil(r).max(1);
            (GadgetSpec::Fnm { r, m }, m * r)
        }
        TransformVariant::LowerC2l1(l) => {
            if size < 2 {
                return Err(Error::InvalidParameters("the hierarchical gadget needs s >= 2".into()));
            }
            (GadgetSpec::Hierarchical { s: size, l, sizes: None }, size)
        }
        _ => unreachable!("lower variants only"),
    };
    let gadget = build_gadget(&spec)?;
    let root_degree = gadget.degree(0);
    let (delta, _) = max_degree(g)?;
    if delta >= root_degree || (1..gadget.n()).any(|x| gadget.degree(x) > root_degree) {
        return Err(Error::DegreeTooHigh {
            degree: delta,
            threshold: root_degree,
        });
    }
    let pendants = pendant_vertices(g);
    // one pendant beyond the gadget, so that a vertex is left for u
    let needed = gadget.n() + 1;
    if pendants.len() < needed {
        return Err(Error::InsufficientPendants {
            needed,
            available: pendants.len(),
        });
    }
    let mut rng = rng_for(seed, 0);
    let mut chosen = choose(&mut rng, &pendants, gadget.n());
    chosen.shuffle(&mut rng);
    let mut h = g.clone();
    let mut witness = Witness::default();
    detach(&mut h, &chosen, &mut witness);
    let taken: BTreeSet<usize> = chosen.iter().copied().collect();
    // u must keep a neighbour of its own, or it could not be told apart
    let eligible: Vec<usize> = (0..g.n())
        .filter(|x| !taken.contains(x) && h.degree(*x) >= 1)
        .filter(|&x| variant != TransformVariant::LowerC4 || g.degree(x) == 1)
        .collect();
    if eligible.is_empty() {
        return Err(Error::InsufficientPendants {
            needed,
            available: pendants.len(),
        });
    }
    let u = eligible[rng.gen_range(0..eligible.len())];
    for (a, b) in gadget.edges() {
        h.add_edge(chosen[a], chosen[b]);
    }
    let v1 = chosen[0];
    h.add_edge(v1, u);
    if identify_lower(&h, variant)? != (v1, u) {
        return Err(Error::InvalidParameters(format!(
            "{variant} with size {size} does not leave a unique reconstruction here"
        )));
    }
    chosen.sort_unstable();
    Ok(TransformRecord {
        result: h,
        v1,
        u: Some(u),
        pendants: chosen,
        params: ResolvedParams {
            variant,
            size,
            k: None,
            c: params.c,
            eps: params.eps,
            r: r_used,
        },
        witness,
    })
}

fn exactly_one(found: Vec<usize>, what: &str) -> Result<usize> {
    match found.as_slice() {
        [x] => Ok(*x),
        _ => Err(Error::IdentificationFailed(format!("{} candidates for {what}", found.len()))),
    }
}

/// `v1` as the unique vertex of maximum degree, then `u` by the variant's rule.
pub fn identify_lower(g: &LabelledGraph, variant: TransformVariant) -> Result<(usize, usize)> {
    let (_, argmax) = max_degree(g)?;
    let v1 = exactly_one(argmax, "the maximum-degree vertex")?;
    let nb = g.neighbors(v1);
    let found: Vec<usize> = match variant {
        // the only non-pendant neighbour
        TransformVariant::LowerTree => nb.iter().copied().filter(|&x| g.degree(x) != 1).collect(),
        // the only cut vertex among the neighbours
        TransformVariant::LowerFan => {
            let cuts: BTreeSet<usize> = cut_vertices(g).into_iter().collect();
            nb.iter().copied().filter(|x| cuts.contains(x)).collect()
        }
        // the only neighbour adjacent to a vertex that is no neighbour of v1
        TransformVariant::LowerC4 => nb
            .iter()
            .copied()
            .filter(|&x| g.neighbors(x).iter().any(|&y| y != v1 && !g.has_edge(v1, y)))
            .collect(),
        // the only neighbour across a bridge
        TransformVariant::LowerC5 | TransformVariant::LowerC2l1(_) => {
            let bt = block_decomposition(g);
            nb.iter()
                .copied()
                .filter(|&x| {
                    let i = bt.block_of_edge(v1, x).expect("edge lies in a block");
                    bt.blocks[i].vertices.len() == 2
                })
                .collect()
        }
        _ => return Err(Error::InvalidParameters(format!("{variant} is an upper-bound variant"))),
    };
    Ok((v1, exactly_one(found, "u")?))
}

/// Vertices reachable from `start` without using the edge `start`-`cut`.
fn side_of(g: &LabelledGraph, start: usize, cut: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in g.neighbors(x) {
            if (x == start && y == cut) || (x == cut && y == start) {
                continue;
            }
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// Undo a transform from its record.
pub fn reconstruct(rec: &TransformRecord) -> Result<LabelledGraph> {
    let mut g = rec.result.clone();
    let moved: BTreeSet<usize> = rec.pendants.iter().copied().collect();
    if rec.params.variant.is_lower() {
        let (v1, u) = identify_lower(&g, rec.params.variant)?;
        if v1 != rec.v1 || Some(u) != rec.u {
            return Err(Error::IdentificationFailed(format!(
                "found v1 = {v1}, u = {u}; the record says v1 = {}, u = {:?}",
                rec.v1, rec.u
            )));
        }
        if side_of(&g, v1, u) != moved {
            return Err(Error::IdentificationFailed(
                "the gadget hanging from u is not the recorded vertex set".into(),
            ));
        }
        g.remove_edge(v1, u);
        for &x in &moved {
            for y in g.neighbors(x).to_vec() {
                g.remove_edge(x, y);
            }
        }
    } else {
        let v = rec.v1;
        if v >= g.n() || g.neighbors(v).iter().any(|x| !moved.contains(x)) {
            return Err(Error::IdentificationFailed(format!(
                "vertex {v} has neighbours outside the added vertices"
            )));
        }
        for &x in &moved {
            for y in g.neighbors(x).to_vec() {
                g.remove_edge(x, y);
            }
        }
        for &(a, b) in &rec.witness.removed {
            g.add_edge(a, b);
        }
    }
    for (&p, &w) in &rec.witness.attachments {
        g.add_edge(p, w);
    }
    Ok(g)
}

/// Degree bound above which a vertex is too large for the variant.
pub fn upper_threshold(variant: TransformVariant, n: usize, eps: f64) -> Result<f64> {
    let n = n as f64;
    let t = match variant {
        TransformVariant::UpperTree => (1.0 + eps) * n.ln() / iterated_ln(n, 2),
        TransformVariant::UpperExC4 => (2.0 + eps) * n.ln() / iterated_ln(n, 2),
        TransformVariant::UpperExC5 => (1.0 + eps) * n.ln() / iterated_ln(n, 3),
        _ => return Err(Error::InvalidParameters(format!("{variant} is a lower-bound variant"))),
    };
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameters(format!("degree threshold undefined at n = {n}")));
    }
    Ok(t)
}

/// Default `c` of the upper transforms.
pub fn default_fraction(variant: TransformVariant, eps: f64, alpha: f64) -> f64 {
    let e = eps / 2.0;
    match variant {
        TransformVariant::UpperExC4 => (e / (1.0 + e)).min(alpha / 3.0),
        _ => (e / (1.0 + eps)).min(alpha / 3.0),
    }
}

fn fraction_of(c: f64, x: usize) -> usize {
    ((c * x as f64) - 1e-9).ceil().max(0.0) as usize
}

/// `K_{2,t}` or `K+_{2,t}` with `v` as a hub: (other hub, middles, plus edge).
fn k2_hub(vertices: &[usize], g: &LabelledGraph, v: usize) -> Option<(usize, Vec<usize>, bool)> {
    let inside: BTreeSet<usize> = vertices.iter().copied().collect();
    let nb: Vec<usize> = g.neighbors(v).iter().copied().filter(|x| inside.contains(x)).collect();
    let others: Vec<usize> = vertices.iter().copied().filter(|&x| x != v).collect();
    let t = others.len() - 1;
    if t < 2 {
        return None;
    }
    let z0 = *others.iter().find(|&&z| {
        g.neighbors(z).iter().filter(|x| inside.contains(x) && **x != v).count() == t
    })?;
    let middles: Vec<usize> = others.iter().copied().filter(|&x| x != z0).collect();
    let plus = g.has_edge(v, z0);
    let shaped = middles.iter().all(|&m| {
        g.has_edge(m, v) && g.has_edge(m, z0) && g.neighbors(m).iter().filter(|x| inside.contains(x)).count() == 2
    });
    (shaped && nb.len() == t + usize::from(plus)).then_some((z0, middles, plus))
}

/// Spread what hangs at a high-degree vertex over fresh pendant vertices.
pub fn upper_bound_transform(
    g: &LabelledGraph,
    variant: TransformVariant,
    params: &TransformParams,
    seed: u64,
) -> Result<TransformRecord> {
    if variant.is_lower() {
        return Err(Error::InvalidParameters(format!("{variant} is a lower-bound variant")));
    }
    // below the size where the threshold is defined no vertex counts as large
    let threshold = upper_threshold(variant, g.n(), params.eps).unwrap_or(f64::INFINITY);
    let (k, argmax) = max_degree(g)?;
    if (k as f64) <= threshold {
        return Err(Error::NoHighDegreeVertex(threshold));
    }
    let class = variant.class();
    if !in_class(g, class) {
        return Err(Error::NotInClass(class.id()));
    }
    let v = argmax[0];
    let c = params.c.unwrap_or_else(|| default_fraction(variant, params.eps, params.alpha));
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidParameters(format!("c must lie in (0, 1], got {c}")));
    }
    let bt = block_decomposition(g);
    let blocks: Vec<&Vec<usize>> = bt.incidence[v].iter().map(|&i| &bt.blocks[i].vertices).collect();

    // blocks at v left whole (class 1), and K_{2,t} / K+_{2,t} with large t
    let mut whole = Vec::new();
    let mut split: [Vec<(usize, Vec<usize>, bool)>; 2] = [Vec::new(), Vec::new()];
    let tau = (k as f64).ln() / iterated_ln(k as f64, 2);
    for b in &blocks {
        if variant == TransformVariant::UpperExC5 {
            let t = g.neighbors(v).iter().filter(|x| b.binary_search(x).is_ok()).count();
            if t as f64 > tau.floor() {
                if let Some((z0, middles, plus)) = k2_hub(b, g, v) {
                    split[usize::from(plus)].push((z0, middles, plus));
                    continue;
                }
            }
        }
        whole.push(*b);
    }
    let spread = match variant {
        TransformVariant::UpperTree => fraction_of(c, k),
        _ => fraction_of(c, whole.len()),
    };
    let groups: Vec<usize> = split
        .iter()
        .flatten()
        .map(|(_, middles, _)| 1 + fraction_of(c, middles.len()).max(1))
        .collect();
    let markers = if variant == TransformVariant::UpperExC5 { 3 } else { 0 };
    let needed = markers + spread + split[0].len() + split[1].len() + groups.iter().sum::<usize>();
    let pool: Vec<usize> = pendant_vertices(g)
        .into_iter()
        .filter(|&p| p != v && !g.has_edge(p, v))
        .collect();
    if pool.len() < needed {
        return Err(Error::InsufficientPendants {
            needed,
            available: pool.len(),
        });
    }
    let mut rng = rng_for(seed, 0);
    let fresh = choose(&mut rng, &pool, needed);
    let mut h = g.clone();
    let mut witness = Witness::default();
    detach(&mut h, &fresh, &mut witness);
    let mut removed = BTreeSet::new();
    for y in h.neighbors(v).to_vec() {
        removed.insert((v.min(y), v.max(y)));
        h.remove_edge(v, y);
    }
    let mut next = fresh.iter().copied();
    let mut take = |count: usize| -> Vec<usize> { next.by_ref().take(count).collect() };

    let mut mark: Vec<usize> = take(markers);
    mark.sort_unstable();
    for &x in &mark {
        h.add_edge(v, x);
    }
    // the whole blocks move to fresh vertices below v (or below v1)
    let spread_vertices = take(spread);
    let spread_root = mark.first().copied().unwrap_or(v);
    for &w in &spread_vertices {
        h.add_edge(spread_root, w);
    }
    for b in &whole {
        let w = spread_vertices[rng.gen_range(0..spread_vertices.len())];
        for &a in b.iter() {
            if a != v && g.has_edge(v, a) {
                h.add_edge(w, a);
            }
        }
    }
    // each large K_{2,t} becomes a representative with a star of fresh vertices
    let mut group_sizes = groups.into_iter();
    for (class_index, list) in split.iter().enumerate() {
        for (z0, middles, _) in list {
            for &m in middles {
                for y in [v, *z0] {
                    if h.has_edge(m, y) {
                        h.remove_edge(m, y);
                    }
                    removed.insert((m.min(y), m.max(y)));
                }
            }
            let rep = take(1)[0];
            h.add_edge(mark[1 + class_index], rep);
            let mut group = take(group_sizes.next().expect("one size per block"));
            group.sort_unstable();
            for &x in &group {
                h.add_edge(rep, x);
            }
            h.add_edge(*z0, group[0]);
            for &m in middles {
                h.add_edge(m, group[rng.gen_range(1..group.len())]);
            }
        }
    }
    let mut pendants = fresh;
    pendants.sort_unstable();
    witness.removed = removed.into_iter().collect();
    Ok(TransformRecord {
        result: h,
        v1: v,
        u: None,
        pendants,
        params: ResolvedParams {
            variant,
            size: needed,
            k: Some(k),
            c: Some(c),
            eps: params.eps,
            r: None,
        },
        witness,
    })
}

/// Apply either kind of transform.
pub fn transform(
    g: &LabelledGraph,
    variant: TransformVariant,
    params: &TransformParams,
    seed: u64,
) -> Result<TransformRecord> {
    if variant.is_lower() {
        lower_bound_transform(g, variant, params, seed)
    } else {
        upper_bound_transform(g, variant, params, seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioParams {
    pub eps: f64,
    pub c: Option<f64>,
    pub alpha: f64,
}

impl Default for RatioParams {
    fn default() -> Self {
        RatioParams {
            eps: 0.5,
            c: None,
            alpha: 0.3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub n: f64,
    /// `s`, `h` or the number of fresh vertices used by the display.
    pub size: usize,
    pub log_c: f64,
    pub log_r: f64,
    pub log_ratio: f64,
}

/// `ln (a)_k`, summed term by term: the log-gamma difference loses all
/// precision once `a` is large against `k`.
fn ln_falling(a: f64, k: usize) -> f64 {
    (0..k).map(|i| (a - i as f64).ln()).sum()
}

fn ln_binom(a: f64, b: usize) -> f64 {
    ln_falling(a, b) - ln_fact(b as f64)
}

fn ln_fact(x: f64) -> f64 {
    lgamma(x + 1.0)
}

fn pool_check(needed: usize, pool: f64) -> Result<()> {
    if needed as f64 > pool {
        return Err(Error::InsufficientPendants {
            needed,
            available: pool.max(0.0).floor() as usize,
        });
    }
    Ok(())
}

/// Log of the constructions count `C(n)` and of the preimage bound `R(n)`
/// in the variant's displayed inequality, evaluated exactly with log-gamma.
pub fn double_count_ratio(n: f64, variant: TransformVariant, p: &RatioParams) -> Result<RatioReport> {
    if !(n >= 3.0) {
        return Err(Error::InvalidParameters(format!("n must be at least 3, got {n}")));
    }
    if !(p.alpha > 0.0 && p.alpha <= 1.0) {
        return Err(Error::InvalidParameters(format!("alpha must lie in (0, 1], got {}", p.alpha)));
    }
    let ln = n.ln();
    let an = p.alpha * n;
    let tp = TransformParams {
        size: None,
        eps: p.eps,
        c: p.c,
        alpha: p.alpha,
        r: None,
    };
    let report = |size: usize, log_c: f64, log_r: f64| RatioReport {
        n,
        size,
        log_c,
        log_r,
        log_ratio: log_c - log_r,
    };
    match variant {
        TransformVariant::LowerTree => {
            let s = default_size(variant, n, &tp)?;
            pool_check(s + 2, an)?;
            let s1 = (s + 1) as f64;
            Ok(report(s, ln_binom(an, s + 1) + s1.ln() + (n / 2.0).ln(), s1 * ln))
        }
        TransformVariant::LowerFan => {
            let h = default_size(variant, n, &tp)?;
            pool_check(h + 1, an)?;
            let hf = h as f64;
            let falling = ln_falling(an, h);
            Ok(report(h, falling + (n - hf).ln(), hf * ln))
        }
        TransformVariant::LowerC4 => {
            let s = default_size(variant, n, &tp)?;
            pool_check(s + 2, an)?;
            let (s1, half) = ((s + 1) as f64, (s / 2) as f64);
            // ways to pair up s vertices, one left over when s is odd
            let pairings = ln_fact(s as f64) - half * 2f64.ln() - ln_fact(half);
            Ok(report(s, ln_binom(an, s + 1) + s1.ln() + pairings + (an / 2.0).ln(), s1 * ln))
        }
        TransformVariant::LowerC5 => {
            let s = default_size(variant, n, &tp)?;
            let r = default_group_size(s, p.eps);
            let m = s.div_ceil(r).max(1);
            let s = m * r;
            pool_check(s + 2, an)?;
            let (sf, rf, mf) = (s as f64, r as f64, m as f64);
            let log_c = ln_binom(an, s + 1) + (sf + 1.0).ln() + ln_fact(sf) - mf * ln_fact(rf) + mf * rf.ln()
                + (n / 2.0).ln()
                - ln_fact(mf);
            Ok(report(s, log_c, (sf + 1.0) * ln))
        }
        TransformVariant::LowerC2l1(l) => {
            let s = default_size(variant, n, &tp)?;
            pool_check(s + 2, an)?;
            let sf = s as f64;
            let base = iterated_ln(sf, l);
            if !(base.is_finite() && base > 0.0) {
                return Err(Error::InvalidParameters(format!(
                    "log^({l}) s is not positive for s = {s}"
                )));
            }
            let r: Vec<f64> = (1..l).map(|i| iterated_ln(sf, i) / base).collect();
            if r.iter().any(|&x| !(x > 1.0)) {
                return Err(Error::InvalidParameters("level sizes must exceed 1".into()));
            }
            let mut log_c = (n / 2.0).ln() + ln_binom(an, s + 1) + (sf + 1.0).ln() + ln_fact(sf)
                - (sf / r[0]) * ln_fact(r[0])
                - ln_fact(sf / r[0]);
            for i in 0..l.saturating_sub(2) {
                let q = (r[i] - 1.0) / r[i + 1];
                let per = ln_fact(r[i] - 1.0) - q * ln_fact(r[i + 1]) + (r[i] - 1.0).ln() - ln_fact(q);
                log_c += sf / r[i] * per;
            }
            Ok(report(s, log_c, (sf + 1.0) * ln))
        }
        TransformVariant::UpperTree | TransformVariant::UpperExC4 => {
            let threshold = upper_threshold(variant, n as usize, p.eps)?;
            let k = threshold.floor() as usize + 1;
            let c = p.c.unwrap_or_else(|| default_fraction(variant, p.eps, p.alpha));
            // blocks at v: k edges for trees, at least k/2 edges or triangles otherwise
            let r = if variant == TransformVariant::UpperTree { k } else { k.div_ceil(2) };
            let q = fraction_of(c, r).max(1);
            pool_check(q, 2.0 * an / 3.0)?;
            let qf = q as f64;
            Ok(report(q, ln_binom(2.0 * an / 3.0, q) + r as f64 * qf.ln(), (qf + 1.0) * ln))
        }
        TransformVariant::UpperExC5 => Err(Error::InvalidParameters(
            "the upper-exc5 display depends on the block profile at v".into(),
        )),
    }
}
