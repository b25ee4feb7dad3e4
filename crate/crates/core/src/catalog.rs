//! Named block families of Ex(C5), Ex(C6), Ex(C7) and the gadgets used by
//! the lower-bound constructions.
//!
//! Builders use a fixed labelling: special vertices first (the 6-cycle in
//! cyclic order for S and V, `v, u, w` for H), then the groups in field
//! order. All vertex indices here are 0-based.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::graph::{named, LabelledGraph};
use crate::iso::{canonical_code_bounded, ENGINE_LIMIT};
use crate::minors::has_long_cycle;

/// Optional edges of the starred families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OptEdge {
    #[serde(rename = "vu")]
    Vu,
    #[serde(rename = "vw")]
    Vw,
    /// For `s = 1`: the lone common neighbour of `u` and `v` joined to `w`.
    #[serde(rename = "s1")]
    ExtraS1,
    /// For `t = 1`: the lone common neighbour of `w` and `v` joined to `u`.
    #[serde(rename = "t1")]
    ExtraT1,
    #[serde(rename = "vv2")]
    Vv2,
    #[serde(rename = "vv4")]
    Vv4,
    #[serde(rename = "v2v4")]
    V2v4,
    #[serde(rename = "v1v4")]
    V1v4,
    #[serde(rename = "v2v5")]
    V2v5,
    #[serde(rename = "vv3")]
    Vv3,
}

impl OptEdge {
    pub fn name(self) -> &'static str {
        match self {
            OptEdge::Vu => "vu",
            OptEdge::Vw => "vw",
            OptEdge::ExtraS1 => "s1",
            OptEdge::ExtraT1 => "t1",
            OptEdge::Vv2 => "vv2",
            OptEdge::Vv4 => "vv4",
            OptEdge::V2v4 => "v2v4",
            OptEdge::V1v4 => "v1v4",
            OptEdge::V2v5 => "v2v5",
            OptEdge::Vv3 => "vv3",
        }
    }

    /// Endpoints on the 6-cycle `v, v1, .., v5` (S and V families).
    fn cycle_edge(self) -> Option<(usize, usize)> {
        match self {
            OptEdge::Vv2 => Some((0, 2)),
            OptEdge::Vv4 => Some((0, 4)),
            OptEdge::V2v4 => Some((2, 4)),
            OptEdge::V1v4 => Some((1, 4)),
            OptEdge::V2v5 => Some((2, 5)),
            OptEdge::Vv3 => Some((0, 3)),
            _ => None,
        }
    }
}

pub const H_OPTS: [OptEdge; 4] = [OptEdge::Vu, OptEdge::Vw, OptEdge::ExtraS1, OptEdge::ExtraT1];
pub const S_OPTS: [OptEdge; 5] = [
    OptEdge::Vv2,
    OptEdge::Vv4,
    OptEdge::V2v4,
    OptEdge::V1v4,
    OptEdge::V2v5,
];
pub const V_OPTS: [OptEdge; 6] = [
    OptEdge::Vv2,
    OptEdge::Vv4,
    OptEdge::V2v4,
    OptEdge::V1v4,
    OptEdge::V2v5,
    OptEdge::Vv3,
];

pub type Opts = BTreeSet<OptEdge>;

/// A member of the block catalogs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CatalogSpec {
    K3,
    K2m {
        m: usize,
        #[serde(default)]
        plus: bool,
    },
    H2st {
        s: usize,
        t: usize,
        #[serde(default)]
        opts: Opts,
    },
    S {
        s: usize,
        t: usize,
        u: usize,
        w: usize,
        #[serde(default)]
        opts: Opts,
    },
    /// `q3..q6` list the degrees of the double stars in groups e3..e6.
    V {
        s: usize,
        t: usize,
        e1: usize,
        e2: usize,
        #[serde(default)]
        q3: Vec<usize>,
        #[serde(default)]
        q4: Vec<usize>,
        #[serde(default)]
        q5: Vec<usize>,
        #[serde(default)]
        q6: Vec<usize>,
        #[serde(default)]
        opts: Opts,
    },
}

impl CatalogSpec {
    pub fn family(&self) -> &'static str {
        match self {
            CatalogSpec::K3 => "K3",
            CatalogSpec::K2m { plus: false, .. } => "K2m",
            CatalogSpec::K2m { plus: true, .. } => "K2m+",
            CatalogSpec::H2st { .. } => "H2st",
            CatalogSpec::S { .. } => "S",
            CatalogSpec::V { .. } => "V",
        }
    }

    /// Smallest `k` such that the family belongs to the catalog of Ex(C_k).
    pub fn catalog_k(&self) -> usize {
        match self {
            CatalogSpec::K3 | CatalogSpec::K2m { .. } => 5,
            CatalogSpec::H2st { .. } => 6,
            CatalogSpec::S { .. } | CatalogSpec::V { .. } => 7,
        }
    }

    pub fn opts(&self) -> Option<&Opts> {
        match self {
            CatalogSpec::H2st { opts, .. }
            | CatalogSpec::S { opts, .. }
            | CatalogSpec::V { opts, .. } => Some(opts),
            _ => None,
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            CatalogSpec::K3 => 3,
            CatalogSpec::K2m { m, .. } => m + 2,
            CatalogSpec::H2st { s, t, .. } => s + t + 3,
            CatalogSpec::S { s, t, u, w, .. } => 6 + s + t + u + w,
            CatalogSpec::V {
                s,
                t,
                e1,
                e2,
                q3,
                q4,
                q5,
                q6,
                ..
            } => {
                let stars: usize = [q3, q4, q5, q6]
                    .iter()
                    .flat_map(|q| q.iter())
                    .map(|q| q + 1)
                    .sum();
                6 + s + t + e1 + 2 * e2 + stars
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        let admitted: &[OptEdge] = match self {
            CatalogSpec::K3 => &[],
            CatalogSpec::K2m { m, .. } => {
                if *m < 2 {
                    return bad(format!("K2m needs m >= 2, got {m}"));
                }
                &[]
            }
            CatalogSpec::H2st { s, t, .. } => {
                if *s < 1 || *t < 1 {
                    return bad(format!("H2st needs s, t >= 1, got s = {s}, t = {t}"));
                }
                &H_OPTS
            }
            CatalogSpec::S { .. } => &S_OPTS,
            CatalogSpec::V { q3, q5, .. } => {
                if q3.contains(&0) {
                    return bad("e3 double stars need q >= 1".into());
                }
                if q5.iter().any(|&q| q < 2) {
                    return bad("e5 double stars need q >= 2".into());
                }
                &V_OPTS
            }
        };
        if let Some(opts) = self.opts() {
            for o in opts {
                if !admitted.contains(o) {
                    return Err(Error::InvalidOption {
                        flag: o.name().into(),
                        reason: format!("not an optional edge of {}", self.family()),
                    });
                }
            }
            if let CatalogSpec::H2st { s, t, .. } = self {
                if opts.contains(&OptEdge::ExtraS1) && *s != 1 {
                    return Err(Error::InvalidOption {
                        flag: "s1".into(),
                        reason: format!("requires s = 1, got {s}"),
                    });
                }
                if opts.contains(&OptEdge::ExtraT1) && *t != 1 {
                    return Err(Error::InvalidOption {
                        flag: "t1".into(),
                        reason: format!("requires t = 1, got {t}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Canonical parameter order (`s <= t`, and the mirrored flags).
    pub fn normalized(&self) -> CatalogSpec {
        let swap = |opts: &Opts, pairs: &[(OptEdge, OptEdge)]| -> Opts {
            opts.iter()
                .map(|&o| {
                    pairs
                        .iter()
                        .find_map(|&(a, b)| {
                            if o == a {
                                Some(b)
                            } else if o == b {
                                Some(a)
                            } else {
                                None
                            }
                        })
                        .unwrap_or(o)
                })
                .collect()
        };
        let mirror = [
            (OptEdge::Vv2, OptEdge::Vv4),
            (OptEdge::V1v4, OptEdge::V2v5),
        ];
        match self {
            CatalogSpec::H2st { s, t, opts } if s > t => CatalogSpec::H2st {
                s: *t,
                t: *s,
                opts: swap(
                    opts,
                    &[(OptEdge::Vu, OptEdge::Vw), (OptEdge::ExtraS1, OptEdge::ExtraT1)],
                ),
            },
            CatalogSpec::S { s, t, u, w, opts } if s > t => CatalogSpec::S {
                s: *t,
                t: *s,
                u: *u,
                w: *w,
                opts: swap(opts, &mirror),
            },
            CatalogSpec::V {
                s,
                t,
                e1,
                e2,
                q3,
                q4,
                q5,
                q6,
                opts,
            } => {
                let sort = |q: &Vec<usize>| {
                    let mut q = q.clone();
                    q.sort_unstable_by(|a, b| b.cmp(a));
                    q
                };
                let (s2, t2, o) = if s > t {
                    (*t, *s, swap(opts, &mirror))
                } else {
                    (*s, *t, opts.clone())
                };
                CatalogSpec::V {
                    s: s2,
                    t: t2,
                    e1: *e1,
                    e2: *e2,
                    q3: sort(q3),
                    q4: sort(q4),
                    q5: sort(q5),
                    q6: sort(q6),
                    opts: o,
                }
            }
            other => other.clone(),
        }
    }
}

struct Builder {
    edges: Vec<(usize, usize)>,
    n: usize,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder { edges: Vec::new(), n }
    }

    fn vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    fn edge(&mut self, a: usize, b: usize) {
        self.edges.push((a, b));
    }

    /// A new vertex joined to all of `to`.
    fn connector(&mut self, to: &[usize]) -> usize {
        let x = self.vertex();
        for &y in to {
            self.edge(x, y);
        }
        x
    }

    fn finish(self) -> LabelledGraph {
        LabelledGraph::from_edges(self.n, self.edges).expect("builder edges are valid")
    }
}

fn build_unchecked(spec: &CatalogSpec) -> LabelledGraph {
    match spec {
        CatalogSpec::K3 => named::complete(3),
        CatalogSpec::K2m { m, plus } => {
            let mut g = named::complete_bipartite(2, *m);
            if *plus {
                g.add_edge(0, 1);
            }
            g
        }
        CatalogSpec::H2st { s, t, opts } => {
            let (v, u, w) = (0, 1, 2);
            let mut b = Builder::new(3);
            b.edge(u, w);
            let a: Vec<usize> = (0..*s).map(|_| b.connector(&[v, u])).collect();
            let bb: Vec<usize> = (0..*t).map(|_| b.connector(&[v, w])).collect();
            for o in opts {
                match o {
                    OptEdge::Vu => b.edge(v, u),
                    OptEdge::Vw => b.edge(v, w),
                    OptEdge::ExtraS1 => b.edge(a[0], w),
                    OptEdge::ExtraT1 => b.edge(bb[0], u),
                    _ => unreachable!("validated"),
                }
            }
            b.finish()
        }
        CatalogSpec::S { s, t, u, w, opts } => {
            let mut b = six_cycle();
            for _ in 0..*s {
                b.connector(&[0, 2]);
            }
            for _ in 0..*t {
                b.connector(&[0, 4]);
            }
            for _ in 0..*u {
                b.connector(&[0, 2, 4]);
            }
            for _ in 0..*w {
                b.connector(&[2, 4]);
            }
            add_cycle_opts(&mut b, opts);
            b.finish()
        }
        CatalogSpec::V {
            s,
            t,
            e1,
            e2,
            q3,
            q4,
            q5,
            q6,
            opts,
        } => {
            let (v, v3) = (0, 3);
            let mut b = six_cycle();
            for _ in 0..*s {
                b.connector(&[v, 2]);
            }
            for _ in 0..*t {
                b.connector(&[v, 4]);
            }
            for _ in 0..*e1 {
                b.connector(&[v, v3]);
            }
            for _ in 0..*e2 {
                let x = b.connector(&[v, v3]);
                b.connector(&[v, v3, x]);
            }
            // (hub side, middle side, hub also joined to the middle side)
            let groups = [(v, v3, q3, false), (v, v3, q4, true), (v3, v, q5, false), (v3, v, q6, true)];
            for (hub_side, mid_side, qs, closed) in groups {
                for &q in qs.iter() {
                    let x = b.connector(&[hub_side]);
                    if closed {
                        b.edge(x, mid_side);
                    }
                    for _ in 0..q {
                        b.connector(&[mid_side, x]);
                    }
                }
            }
            add_cycle_opts(&mut b, opts);
            b.finish()
        }
    }
}

fn six_cycle() -> Builder {
    let mut b = Builder::new(6);
    for i in 0..6 {
        b.edge(i, (i + 1) % 6);
    }
    b
}

fn add_cycle_opts(b: &mut Builder, opts: &Opts) {
    for o in opts {
        let (x, y) = o.cycle_edge().expect("validated");
        b.edge(x, y);
    }
}

/// Build a catalog block. Option combinations that leave the class of the
/// family (Ex(C_k) for the family's `k`) are rejected.
pub fn build_catalog_block(spec: &CatalogSpec) -> Result<LabelledGraph> {
    spec.validate()?;
    let g = build_unchecked(spec);
    if has_long_cycle(&g, spec.catalog_k()) {
        let flags: Vec<&str> = spec
            .opts()
            .map(|o| o.iter().map(|e| e.name()).collect())
            .unwrap_or_default();
        return Err(Error::InvalidOption {
            flag: flags.join(","),
            reason: format!("creates a cycle of length at least {}", spec.catalog_k()),
        });
    }
    Ok(g)
}

/// Gadgets of the lower-bound constructions. Vertex 0 is always the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GadgetSpec {
    Fan {
        n: usize,
    },
    /// `m` copies of `K+_{2,r-1}` glued at a vertex of degree `r - 1`.
    Fnm {
        r: usize,
        m: usize,
    },
    /// Root joined to `s` vertices carrying a level forest of depth `l - 1`.
    Hierarchical {
        s: usize,
        l: usize,
        #[serde(default)]
        sizes: Option<Vec<usize>>,
    },
    /// Root joined to `s` vertices that are paired up by a matching.
    StarMatching {
        s: usize,
    },
    Star {
        s: usize,
    },
}

fn iterated_ln(x: f64, times: usize) -> f64 {
    (0..times).fold(x, |acc, _| acc.ln())
}

fn round_size(x: f64) -> usize {
    if x.is_finite() && x >= 2.0 {
        (x + 0.5).floor() as usize
    } else {
        2
    }
}

/// Default level sizes `r_1..r_{l-1}` of the hierarchical gadget.
pub fn hierarchical_sizes(s: usize, l: usize) -> Vec<usize> {
    let s = s as f64;
    if l == 2 {
        return vec![round_size(2.0 * s.ln() / iterated_ln(s, 2))];
    }
    let denom = iterated_ln(s, l);
    (1..l)
        .map(|i| round_size(iterated_ln(s, i) / denom))
        .collect()
}

/// Consecutive chunks of size `r`; the last chunk absorbs the remainder.
fn chunks(items: &[usize], r: usize) -> Vec<&[usize]> {
    if items.is_empty() {
        return Vec::new();
    }
    let count = (items.len() / r).max(1);
    (0..count)
        .map(|i| {
            let end = if i + 1 == count { items.len() } else { (i + 1) * r };
            &items[i * r..end]
        })
        .collect()
}

fn attach_levels(b: &mut Builder, center: usize, rest: &[usize], level: usize, sizes: &[usize]) {
    if level == sizes.len() {
        for &x in rest {
            b.edge(center, x);
        }
        return;
    }
    for chunk in chunks(rest, sizes[level]) {
        b.edge(center, chunk[0]);
        attach_levels(b, chunk[0], &chunk[1..], level + 1, sizes);
    }
}

pub fn build_gadget(spec: &GadgetSpec) -> Result<LabelledGraph> {
    let bad = |msg: &str| Err(Error::InvalidParameters(msg.into()));
    match spec {
        GadgetSpec::Fan { n } => {
            if *n < 2 {
                return bad("Fan needs n >= 2");
            }
            Ok(named::fan(*n))
        }
        GadgetSpec::Fnm { r, m } => {
            if *r < 2 || *m < 1 {
                return bad("Fnm needs r >= 2 and m >= 1");
            }
            let mut b = Builder::new(1);
            for _ in 0..*m {
                let c = b.connector(&[0]);
                for _ in 1..*r {
                    b.connector(&[0, c]);
                }
            }
            Ok(b.finish())
        }
        GadgetSpec::Hierarchical { s, l, sizes } => {
            if *l < 2 || *s < 1 {
                return bad("Hierarchical needs l >= 2 and s >= 1");
            }
            let sizes = match sizes {
                Some(v) if v.len() != l - 1 => return bad("Hierarchical needs l - 1 level sizes"),
                Some(v) if v.iter().any(|&r| r < 2) => return bad("level sizes must be >= 2"),
                Some(v) => v.clone(),
                None => hierarchical_sizes(*s, *l),
            };
            let mut b = Builder::new(*s + 1);
            let members: Vec<usize> = (1..=*s).collect();
            for &x in &members {
                b.edge(0, x);
            }
            for chunk in chunks(&members, sizes[0]) {
                attach_levels(&mut b, chunk[0], &chunk[1..], 1, &sizes);
            }
            Ok(b.finish())
        }
        GadgetSpec::StarMatching { s } => {
            if *s < 1 {
                return bad("StarMatching needs s >= 1");
            }
            let mut g = named::star(*s);
            for i in (1..*s).step_by(2) {
                g.add_edge(i, i + 1);
            }
            Ok(g)
        }
        GadgetSpec::Star { s } => {
            if *s < 1 {
                return bad("Star needs s >= 1");
            }
            Ok(named::star(*s))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Match(CatalogSpec),
    Exceptional,
}

/// Blocks up to this size also get an exhaustive catalog search when the
/// structural recognizers find nothing.
pub const FALLBACK_LIMIT: usize = 10;

fn family_rank(spec: &CatalogSpec) -> usize {
    match spec {
        CatalogSpec::K3 => 0,
        CatalogSpec::K2m { .. } => 1,
        CatalogSpec::H2st { .. } => 2,
        CatalogSpec::S { .. } => 3,
        CatalogSpec::V { .. } => 4,
    }
}

fn opts_of(flags: &[(bool, OptEdge)]) -> Opts {
    flags.iter().filter(|f| f.0).map(|f| f.1).collect()
}

fn k2m_candidates(b: &LabelledGraph, out: &mut Vec<CatalogSpec>) {
    let n = b.n();
    if n < 4 {
        return;
    }
    let hubs: Vec<usize> = (0..n).filter(|&x| b.degree(x) >= n - 2).collect();
    for (i, &x) in hubs.iter().enumerate() {
        for &y in &hubs[i + 1..] {
            let ok = (0..n)
                .filter(|&z| z != x && z != y)
                .all(|z| b.degree(z) == 2 && b.has_edge(z, x) && b.has_edge(z, y));
            if ok {
                out.push(CatalogSpec::K2m {
                    m: n - 2,
                    plus: b.has_edge(x, y),
                });
                return;
            }
        }
    }
}

/// Connector counts of a graph whose vertices outside three hubs are
/// independent and joined to at least two hubs.
struct HubProfile {
    /// `pair[i]` counts connectors joined to exactly the two hubs other than `i`.
    pair: [usize; 3],
    triple: usize,
    /// `edge[i]`: the two hubs other than `i` are adjacent.
    edge: [bool; 3],
}

fn hub_profile(b: &LabelledGraph, hubs: [usize; 3]) -> Option<HubProfile> {
    let mut p = HubProfile {
        pair: [0; 3],
        triple: 0,
        edge: [false; 3],
    };
    for z in 0..b.n() {
        if hubs.contains(&z) {
            continue;
        }
        if b.neighbors(z).iter().any(|y| !hubs.contains(y)) {
            return None;
        }
        let hit: Vec<bool> = hubs.iter().map(|&h| b.has_edge(z, h)).collect();
        match hit.iter().filter(|&&x| x).count() {
            3 => p.triple += 1,
            2 => p.pair[hit.iter().position(|&x| !x).unwrap()] += 1,
            _ => return None,
        }
    }
    for i in 0..3 {
        p.edge[i] = b.has_edge(hubs[(i + 1) % 3], hubs[(i + 2) % 3]);
    }
    Some(p)
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn three_hub_candidates(b: &LabelledGraph, k: usize, out: &mut Vec<CatalogSpec>) {
    let n = b.n();
    let forced: Vec<usize> = (0..n).filter(|&x| b.degree(x) >= 4).collect();
    if n < 5 || forced.len() > 3 {
        return;
    }
    let mut seen = HashSet::new();
    for a in 0..n {
        for c1 in a + 1..n {
            for c2 in c1 + 1..n {
                let hubs = [a, c1, c2];
                if forced.iter().any(|f| !hubs.contains(f)) {
                    continue;
                }
                let Some(p) = hub_profile(b, hubs) else {
                    continue;
                };
                for perm in PERMS {
                    // hub roles (v, u, w) = hubs[perm[0]], hubs[perm[1]], hubs[perm[2]]
                    let pair = |x: usize, y: usize| p.pair[3 - perm[x] - perm[y]];
                    let edge = |x: usize, y: usize| p.edge[3 - perm[x] - perm[y]];
                    let mut found = Vec::new();
                    if k >= 6 && edge(1, 2) && pair(1, 2) == 0 {
                        let (pu, pw) = (pair(0, 1), pair(0, 2));
                        let vu = (edge(0, 1), OptEdge::Vu);
                        let vw = (edge(0, 2), OptEdge::Vw);
                        for (xs, xt) in [(false, false), (true, false), (false, true), (true, true)] {
                            let s = if xs { 1 } else { pu };
                            let t = if xt { 1 } else { pw };
                            let fits = p.triple == xs as usize + xt as usize
                                && (!xs || pu == 0)
                                && (!xt || pw == 0)
                                && s >= 1
                                && t >= 1;
                            if fits {
                                found.push(CatalogSpec::H2st {
                                    s,
                                    t,
                                    opts: opts_of(&[
                                        vu,
                                        vw,
                                        (xs, OptEdge::ExtraS1),
                                        (xt, OptEdge::ExtraT1),
                                    ]),
                                });
                            }
                        }
                    }
                    if k >= 7 {
                        for (f1, f2) in [(false, false), (true, false), (false, true), (true, true)] {
                            let s = (pair(0, 1) + f1 as usize).checked_sub(1);
                            let t = (pair(0, 2) + f2 as usize).checked_sub(1);
                            let w = pair(1, 2).checked_sub(1);
                            let u = p.triple.checked_sub(f1 as usize + f2 as usize);
                            if let (Some(s), Some(t), Some(u), Some(w)) = (s, t, u, w) {
                                found.push(CatalogSpec::S {
                                    s,
                                    t,
                                    u,
                                    w,
                                    opts: opts_of(&[
                                        (edge(0, 1), OptEdge::Vv2),
                                        (edge(0, 2), OptEdge::Vv4),
                                        (edge(1, 2), OptEdge::V2v4),
                                        (f1, OptEdge::V1v4),
                                        (f2, OptEdge::V2v5),
                                    ]),
                                });
                            }
                        }
                    }
                    for spec in found {
                        if seen.insert(spec.clone()) {
                            out.push(spec);
                        }
                    }
                }
            }
        }
    }
}

/// One component of `B - {P, Q}` in the V-family reading with hubs `P = v`
/// and `Q = v3`.
enum Piece {
    E1,
    E2,
    /// Double star whose centre sits on `P` and whose leaves sit on `Q`.
    Inner { q: usize, closed: bool },
    /// Double star whose centre sits on `Q` and whose leaves sit on `P`.
    Outer { q: usize, closed: bool },
    /// A path `P - a - b - Q`: either an inner star with `q = 1` or the
    /// shortest possible special star.
    OpenPath,
    /// Both special stars, joined by some of the edges `v2v4, v1v4, v2v5`.
    Merged(Vec<(usize, usize, Opts)>),
}

fn v_piece(b: &LabelledGraph, comp: &[usize], p: usize, q: usize) -> Option<Piece> {
    let att = |x: usize| (b.has_edge(x, p), b.has_edge(x, q));
    let inside = |x: usize, y: usize| comp.contains(&y) && y != x;
    let inner_deg = |x: usize| b.neighbors(x).iter().filter(|&&y| inside(x, y)).count();
    match comp.len() {
        1 => (att(comp[0]) == (true, true)).then_some(Piece::E1),
        2 => {
            let (a, c) = (att(comp[0]), att(comp[1]));
            match (a, c) {
                ((true, true), (true, true)) => Some(Piece::E2),
                ((true, false), (false, true)) | ((false, true), (true, false)) => Some(Piece::OpenPath),
                ((true, true), (false, true)) | ((false, true), (true, true)) => {
                    Some(Piece::Inner { q: 1, closed: true })
                }
                ((true, true), (true, false)) | ((true, false), (true, true)) => {
                    Some(Piece::Outer { q: 1, closed: true })
                }
                _ => None,
            }
        }
        len => {
            let centers: Vec<usize> = comp.iter().copied().filter(|&x| inner_deg(x) == len - 1).collect();
            let is_star = centers.len() == 1 && comp.iter().all(|&x| centers[0] == x || inner_deg(x) == 1);
            if is_star {
                let c = centers[0];
                let leaves: Vec<(bool, bool)> = comp.iter().filter(|&&x| x != c).map(|&x| att(x)).collect();
                let la = leaves[0];
                if leaves.iter().any(|&l| l != la) {
                    return None;
                }
                let qn = len - 1;
                return match (att(c), la) {
                    ((true, false), (false, true)) => Some(Piece::Inner { q: qn, closed: false }),
                    ((true, true), (false, true)) => Some(Piece::Inner { q: qn, closed: true }),
                    ((false, true), (true, false)) => Some(Piece::Outer { q: qn, closed: false }),
                    ((true, true), (true, false)) => Some(Piece::Outer { q: qn, closed: true }),
                    _ => None,
                };
            }
            merged_special(b, comp, p, q)
        }
    }
}

fn merged_special(b: &LabelledGraph, comp: &[usize], p: usize, q: usize) -> Option<Piece> {
    let centers: Vec<usize> = comp.iter().copied().filter(|&x| b.has_edge(x, q)).collect();
    if centers.len() != 2 {
        return None;
    }
    let (c2, c4) = (centers[0], centers[1]);
    let (mut l2, mut l4, mut both) = (0usize, 0usize, 0usize);
    for &x in comp {
        if x == c2 || x == c4 {
            continue;
        }
        if !b.has_edge(x, p) {
            return None;
        }
        let inner: Vec<usize> = b.neighbors(x).iter().copied().filter(|y| comp.contains(y)).collect();
        match (inner.contains(&c2), inner.contains(&c4), inner.len()) {
            (true, false, 1) => l2 += 1,
            (false, true, 1) => l4 += 1,
            (true, true, 2) => both += 1,
            _ => return None,
        }
    }
    let base = [
        (b.has_edge(p, c2), OptEdge::Vv2),
        (b.has_edge(p, c4), OptEdge::Vv4),
        (b.has_edge(c2, c4), OptEdge::V2v4),
    ];
    let mut readings = Vec::new();
    for (f1, f2) in [(false, false), (true, false), (false, true), (true, true)] {
        if both != f1 as usize + f2 as usize {
            continue;
        }
        // v1 counts among the leaves of v2 unless it moved to both centres
        let s = (l2 + f1 as usize).checked_sub(1);
        let t = (l4 + f2 as usize).checked_sub(1);
        if let (Some(s), Some(t)) = (s, t) {
            let mut flags = base.to_vec();
            flags.push((f1, OptEdge::V1v4));
            flags.push((f2, OptEdge::V2v5));
            readings.push((s, t, opts_of(&flags)));
        }
    }
    (!readings.is_empty()).then_some(Piece::Merged(readings))
}

fn v_candidates_at(b: &LabelledGraph, p: usize, q: usize, out: &mut Vec<CatalogSpec>) {
    let rest: Vec<usize> = (0..b.n()).filter(|&x| x != p && x != q).collect();
    let sub = b.induced(&rest);
    let (mut e1, mut e2, mut paths) = (0, 0, 0);
    let (mut q3, mut q4) = (Vec::new(), Vec::new());
    let mut outer: Vec<(usize, bool)> = Vec::new();
    let mut merged = None;
    for comp in sub.components() {
        let comp: Vec<usize> = comp.iter().map(|&i| rest[i]).collect();
        match v_piece(b, &comp, p, q) {
            None => return,
            Some(Piece::E1) => e1 += 1,
            Some(Piece::E2) => e2 += 1,
            Some(Piece::OpenPath) => paths += 1,
            Some(Piece::Inner { q, closed: false }) => q3.push(q),
            Some(Piece::Inner { q, closed: true }) => q4.push(q),
            Some(Piece::Outer { q, closed }) => outer.push((q, closed)),
            Some(Piece::Merged(r)) => {
                if merged.is_some() {
                    return;
                }
                merged = Some(r);
            }
        }
    }
    let vv3 = (b.has_edge(p, q), OptEdge::Vv3);
    let emit = |s: usize, t: usize, mut opts: Opts, paths: usize, outer: &[(usize, bool)], out: &mut Vec<CatalogSpec>| {
        let mut q3 = q3.clone();
        q3.extend(std::iter::repeat_n(1, paths));
        let q5: Vec<usize> = outer.iter().filter(|o| !o.1).map(|o| o.0).collect();
        let q6: Vec<usize> = outer.iter().filter(|o| o.1).map(|o| o.0).collect();
        if q5.iter().any(|&x| x < 2) {
            return;
        }
        if vv3.0 {
            opts.insert(vv3.1);
        }
        out.push(CatalogSpec::V {
            s,
            t,
            e1,
            e2,
            q3,
            q4: q4.clone(),
            q5,
            q6,
            opts,
        });
    };
    if let Some(readings) = merged {
        for (s, t, opts) in readings {
            emit(s, t, opts, paths, &outer, out);
        }
        return;
    }
    // pick the two special stars among the outer stars and the open paths
    let mut kinds: BTreeMap<(usize, bool), usize> = BTreeMap::new();
    for &o in &outer {
        *kinds.entry(o).or_default() += 1;
    }
    if paths > 0 {
        *kinds.entry((1, false)).or_default() += paths;
    }
    let keys: Vec<(usize, bool)> = kinds.keys().copied().collect();
    for (i, &k1) in keys.iter().enumerate() {
        for &k2 in &keys[i..] {
            if k1 == k2 && kinds[&k1] < 2 {
                continue;
            }
            let mut left_paths = paths;
            let mut left = outer.clone();
            for kk in [k1, k2] {
                if kk == (1, false) && left_paths > 0 {
                    left_paths -= 1;
                } else if let Some(pos) = left.iter().position(|&o| o == kk) {
                    left.remove(pos);
                }
            }
            let opts = opts_of(&[(k1.1, OptEdge::Vv2), (k2.1, OptEdge::Vv4)]);
            emit(k1.0 - 1, k2.0 - 1, opts, left_paths, &left, out);
        }
    }
}

fn v_candidates(b: &LabelledGraph, out: &mut Vec<CatalogSpec>) {
    if b.n() < 6 {
        return;
    }
    for p in 0..b.n() {
        for q in 0..b.n() {
            // every vertex other than the hubs is adjacent to one of them
            let covered = p != q
                && (0..b.n()).all(|x| x == p || x == q || b.has_edge(x, p) || b.has_edge(x, q));
            if covered {
                v_candidates_at(b, p, q, out);
            }
        }
    }
}

/// Every valid spec with `n` vertices from the catalogs of Ex(C_k), up to
/// the `s <= t` symmetry. Option sets that leave the class are dropped.
pub fn enumerate_specs(k: usize, n: usize) -> Vec<CatalogSpec> {
    let mut raw = Vec::new();
    if n == 3 {
        raw.push(CatalogSpec::K3);
    }
    if n >= 4 {
        for plus in [false, true] {
            raw.push(CatalogSpec::K2m { m: n - 2, plus });
        }
    }
    if k >= 6 && n >= 5 {
        for s in 1..=(n - 3) / 2 {
            let t = n - 3 - s;
            for opts in subsets(&H_OPTS) {
                raw.push(CatalogSpec::H2st { s, t, opts });
            }
        }
    }
    if k >= 7 && n >= 6 {
        let r = n - 6;
        for s in 0..=r {
            for t in s..=r - s {
                for u in 0..=r - s - t {
                    let w = r - s - t - u;
                    for opts in subsets(&S_OPTS) {
                        raw.push(CatalogSpec::S { s, t, u, w, opts });
                    }
                }
            }
        }
        for s in 0..=r {
            for t in s..=r - s {
                for e1 in 0..=r - s - t {
                    for e2 in 0..=(r - s - t - e1) / 2 {
                        let budget = r - s - t - e1 - 2 * e2;
                        for (q3, q4, q5, q6) in star_groups(budget) {
                            for opts in subsets(&V_OPTS) {
                                raw.push(CatalogSpec::V {
                                    s,
                                    t,
                                    e1,
                                    e2,
                                    q3: q3.clone(),
                                    q4: q4.clone(),
                                    q5: q5.clone(),
                                    q6: q6.clone(),
                                    opts,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    raw.into_iter()
        .filter(|spec| build_catalog_block(spec).is_ok())
        .collect()
}

fn subsets(items: &[OptEdge]) -> Vec<Opts> {
    (0..1u32 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &o)| o)
                .collect()
        })
        .collect()
}

/// Non-increasing lists of star degrees `q >= min_q` whose cost
/// `sum (q + 1)` is exactly `budget`.
fn star_lists(budget: usize, min_q: usize, max_q: usize) -> Vec<Vec<usize>> {
    if budget == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for q in (min_q..=max_q.min(budget - 1)).rev() {
        for mut tail in star_lists(budget - q - 1, min_q, q) {
            tail.insert(0, q);
            out.push(tail);
        }
    }
    out
}

type StarGroups = (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>);

fn star_groups(budget: usize) -> Vec<StarGroups> {
    let mut out = Vec::new();
    for b3 in 0..=budget {
        for b4 in 0..=budget - b3 {
            for b5 in 0..=budget - b3 - b4 {
                let b6 = budget - b3 - b4 - b5;
                for q3 in star_lists(b3, 1, usize::MAX) {
                    for q4 in star_lists(b4, 0, usize::MAX) {
                        for q5 in star_lists(b5, 2, usize::MAX) {
                            for q6 in star_lists(b6, 0, usize::MAX) {
                                out.push((q3.clone(), q4.clone(), q5.clone(), q6));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Identify the catalog family of a 2-connected member of Ex(C_k).
pub fn classify_block(b: &LabelledGraph, k: usize) -> Result<Classification> {
    if !(5..=7).contains(&k) {
        return Err(Error::InvalidParameters(format!(
            "block catalogs exist for k in 5..=7, got {k}"
        )));
    }
    if !b.is_two_connected() {
        return Err(Error::NotTwoConnected);
    }
    if has_long_cycle(b, k) {
        return Err(Error::NotInClass(format!("exc{k}")));
    }
    Ok(match recognize_block(b, k)? {
        Some(spec) => Classification::Match(spec),
        None => Classification::Exceptional,
    })
}

/// The catalog spec of a 2-connected `b`, without first checking that `b`
/// lies in Ex(C_k). A match certifies membership: every built catalog block
/// is checked to lie in the class.
pub fn recognize_block(b: &LabelledGraph, k: usize) -> Result<Option<CatalogSpec>> {
    if !(5..=7).contains(&k) {
        return Err(Error::InvalidParameters(format!(
            "block catalogs exist for k in 5..=7, got {k}"
        )));
    }
    if !b.is_two_connected() {
        return Err(Error::NotTwoConnected);
    }
    let mut cands = Vec::new();
    if b.n() == 3 {
        cands.push(CatalogSpec::K3);
    }
    k2m_candidates(b, &mut cands);
    three_hub_candidates(b, k, &mut cands);
    if k >= 7 {
        v_candidates(b, &mut cands);
    }
    let mut cands: Vec<CatalogSpec> = cands.iter().map(CatalogSpec::normalized).collect();
    cands.sort_by_key(|c| (family_rank(c), c.opts().map_or(0, |o| o.len()), c.clone()));
    cands.dedup();
    let target = Target::new(b)?;
    for spec in cands {
        if target.matches(&spec)? {
            return Ok(Some(spec));
        }
    }
    if b.n() <= FALLBACK_LIMIT {
        for spec in enumerate_specs(k, b.n()) {
            if target.matches(&spec)? {
                return Ok(Some(spec.normalized()));
            }
        }
    }
    Ok(None)
}

struct Target<'a> {
    graph: &'a LabelledGraph,
    degrees: Vec<usize>,
    code: Option<Vec<u8>>,
}

impl<'a> Target<'a> {
    fn new(graph: &'a LabelledGraph) -> Result<Self> {
        let code = if graph.n() <= ENGINE_LIMIT {
            Some(canonical_code_bounded(graph, ENGINE_LIMIT)?)
        } else {
            None
        };
        Ok(Target {
            graph,
            degrees: graph.sorted_degrees(),
            code,
        })
    }

    /// Beyond the reach of the canonical labelling engine, equal degree
    /// sequences are taken as confirmation of a structural match.
    fn matches(&self, spec: &CatalogSpec) -> Result<bool> {
        if spec.vertex_count() != self.graph.n() {
            return Ok(false);
        }
        let Ok(h) = build_catalog_block(spec) else {
            return Ok(false);
        };
        if h.edge_count() != self.graph.edge_count() || h.sorted_degrees() != self.degrees {
            return Ok(false);
        }
        match &self.code {
            Some(code) => Ok(canonical_code_bounded(&h, ENGINE_LIMIT)? == *code),
            None => Ok(true),
        }
    }
}
