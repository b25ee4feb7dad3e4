//! Exact labelled counting through the block decomposition.
//!
//! With `b_k` the labelled blocks on `k` labels, rooted connected members
//! satisfy `Ĉ(x) = x exp(B'(Ĉ(x)))`. Everything is done on integer EGF
//! coefficients (coefficient times `n!`), so no rationals appear:
//!
//! * `ĉ_m = m e_{m-1}` where `e` counts sets of root-block structures;
//! * `f_m = Σ_k b_k S_{k-1}(m)`, with `S_j(m)` the sets of `j` rooted graphs
//!   on `m` labels;
//! * `e_m = Σ_j C(m-1, j-1) f_j e_{m-j}`;
//! * `g = exp(c)` with `c_n = ĉ_n / n`.
//!
//! For Ex(C5) the blocks on five or more vertices are exactly `K_{2,m}` and
//! `K+_{2,m}`, whose contribution has the closed form
//! `2 (Ĉ X_{>=3} + S_2 X_{>=2})` where `X_{>=r}` counts sets of at least `r`
//! rooted graphs. This keeps large tables quadratic in `N`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::catalog::{build_catalog_block, enumerate_specs};
use crate::error::{Error, Result};
use crate::graph::{named, LabelledGraph};
use crate::io::from_graph6;
use crate::iso::{automorphism_count, canonical_code_bounded, ENGINE_LIMIT};
use crate::minors::GraphClass;

/// Table bound for classes with finitely many block shapes per size, and
/// for Ex(C5).
pub const LARGE_LIMIT: usize = 1000;
/// Table bound where blocks beyond the census come from the catalog.
pub const CATALOG_LIMIT: usize = 40;
/// Block sizes covered by the embedded census data.
pub const CENSUS_BLOCK_LIMIT: usize = 8;

const CENSUS_BLOCKS: &str = include_str!("../data/census_blocks.txt");

/// One isomorphism type of labelled block, with its number of labellings.
#[derive(Clone, Debug)]
pub struct BlockType {
    pub graph: LabelledGraph,
    /// `k! / |Aut|`.
    pub weight: BigUint,
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).product()
}

fn block_type(graph: LabelledGraph) -> Result<BlockType> {
    let weight = factorial(graph.n()) / automorphism_count(&graph)?;
    Ok(BlockType { graph, weight })
}

/// Largest `N` for which [`class_count_table`] is available.
pub fn count_limit(class: GraphClass) -> Result<usize> {
    match class {
        GraphClass::Forest | GraphClass::Tree => Ok(LARGE_LIMIT),
        GraphClass::ExCycle(3..=5) => Ok(LARGE_LIMIT),
        GraphClass::ExCycle(6) => Ok(CATALOG_LIMIT),
        GraphClass::ExCycle(7) | GraphClass::Outerplanar => Ok(CENSUS_BLOCK_LIMIT),
        GraphClass::ExCycle(k) => Err(Error::InvalidParameters(format!(
            "counting is available for exc3..exc7, got exc{k}"
        ))),
    }
}

fn census_codes(class: GraphClass, k: usize) -> impl Iterator<Item = &'static str> {
    let id = class.id();
    let k = k.to_string();
    CENSUS_BLOCKS.lines().filter_map(move |line| {
        let mut parts = line.split(' ');
        (parts.next() == Some(id.as_str()) && parts.next() == Some(k.as_str()))
            .then(|| parts.next())
            .flatten()
    })
}

/// The isomorphism types of labelled blocks on `k` vertices in `class`; for
/// `k = 2` the single edge.
pub fn block_types(class: GraphClass, k: usize) -> Result<Vec<BlockType>> {
    count_limit(class)?;
    if k < 2 {
        return Ok(Vec::new());
    }
    if k == 2 {
        return Ok(vec![block_type(named::path(2))?]);
    }
    match class {
        GraphClass::Forest | GraphClass::Tree | GraphClass::ExCycle(3) => Ok(Vec::new()),
        GraphClass::ExCycle(4) => Ok(if k == 3 {
            vec![block_type(named::complete(3))?]
        } else {
            Vec::new()
        }),
        _ if k <= CENSUS_BLOCK_LIMIT => census_codes(class, k)
            .map(|code| block_type(from_graph6(code)?))
            .collect(),
        GraphClass::ExCycle(c @ (5 | 6)) if k <= CATALOG_LIMIT => catalog_block_types(c, k),
        _ => Err(Error::OutOfRange {
            what: format!("block types of {class}"),
            n: k,
        }),
    }
}

/// One representative per isomorphism class of catalog blocks on `k`
/// vertices, collapsing isomorphic specs by canonical code.
pub fn catalog_block_types(c: usize, k: usize) -> Result<Vec<BlockType>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for spec in enumerate_specs(c, k) {
        let g = build_catalog_block(&spec)?;
        if seen.insert(canonical_code_bounded(&g, ENGINE_LIMIT)?) {
            out.push(block_type(g)?);
        }
    }
    Ok(out)
}

/// `b[0..=N]`: labelled blocks (2-connected members, plus `K2`) on `k` labels.
pub fn block_count_table(class: GraphClass, n: usize) -> Result<Vec<BigUint>> {
    check_bound(class, n)?;
    let mut b = vec![BigUint::zero(); n + 1];
    for (k, slot) in b.iter_mut().enumerate().skip(2) {
        *slot = if class == GraphClass::ExCycle(5) && k >= 5 {
            // K_{2,k-2} and K+_{2,k-2}: one per choice of the hub pair each
            BigUint::from(k * (k - 1))
        } else {
            block_types(class, k)?.into_iter().map(|t| t.weight).sum()
        };
    }
    Ok(b)
}

fn check_bound(class: GraphClass, n: usize) -> Result<()> {
    let limit = count_limit(class)?;
    if n < 2 {
        return Err(Error::InvalidParameters(format!("table size must be at least 2, got {n}")));
    }
    if n > limit {
        return Err(Error::OutOfRange {
            what: format!("counting {class}"),
            n,
        });
    }
    Ok(())
}

/// Row `m` of Pascal's triangle.
pub(crate) fn binomial_row(m: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(m + 1);
    row.push(BigUint::one());
    for a in 0..m {
        let next = &row[a] * BigUint::from(m - a) / BigUint::from(a + 1);
        row.push(next);
    }
    row
}

/// `Σ_{a=1}^{m} C(m-1, a-1) x_a y_{m-a}`: the part holding the smallest label
/// has size `a`. `prev` is row `m - 1`.
fn min_label_conv(prev: &[BigUint], x: &[BigUint], y: &[BigUint], m: usize) -> BigUint {
    let mut total = BigUint::zero();
    for a in 1..=m {
        if x[a].is_zero() || y[m - a].is_zero() {
            continue;
        }
        total += &prev[a - 1] * &x[a] * &y[m - a];
    }
    total
}

/// `Σ_{a=0}^{m} C(m, a) x_a y_{m-a}`. `row` is row `m`.
fn full_conv(row: &[BigUint], x: &[BigUint], y: &[BigUint], m: usize) -> BigUint {
    let mut total = BigUint::zero();
    for a in 0..=m {
        if x[a].is_zero() || y[m - a].is_zero() {
            continue;
        }
        total += &row[a] * &x[a] * &y[m - a];
    }
    total
}

/// All intermediate tables of the recurrence, indexed by label count.
#[derive(Clone, Debug)]
pub struct Recurrence {
    pub n_max: usize,
    pub b: Vec<BigUint>,
    /// Block sizes up to this one enter through `b` directly.
    pub generic_max: usize,
    /// Ex(C5) closed form for blocks on five or more vertices.
    pub k2m_tail: bool,
    pub c_rooted: Vec<BigUint>,
    /// `s[j][m]`, for `j < generic_max`.
    pub s: Vec<Vec<BigUint>>,
    /// `x_at_least[r][m]` for `r <= 3`; empty without the tail.
    pub x_at_least: Vec<Vec<BigUint>>,
    /// Root-block structures on `m` non-root labels.
    pub f: Vec<BigUint>,
    /// Sets of root-block structures.
    pub e: Vec<BigUint>,
    pub c: Vec<BigUint>,
    pub g: Vec<BigUint>,
}

impl Recurrence {
    /// Run the recurrence for `class` up to `n`.
    pub fn new(class: GraphClass, n: usize) -> Result<Self> {
        let b = block_count_table(class, n)?;
        Ok(Self::from_blocks(class, b))
    }

    /// Run the recurrence on given block counts. For Ex(C5) the counts above
    /// four vertices are replaced by the closed form.
    pub fn from_blocks(class: GraphClass, b: Vec<BigUint>) -> Self {
        let k2m_tail = class == GraphClass::ExCycle(5);
        let generic_max = if k2m_tail {
            4
        } else {
            b.iter().rposition(|x| !x.is_zero()).unwrap_or(2)
        };
        Self::run(class == GraphClass::Tree, b, generic_max.max(2), k2m_tail)
    }

    fn run(tree: bool, b: Vec<BigUint>, generic_max: usize, k2m_tail: bool) -> Self {
        let n = b.len() - 1;
        let zero = || vec![BigUint::zero(); n + 1];
        let mut c_rooted = zero();
        let mut s: Vec<Vec<BigUint>> = (0..generic_max).map(|_| zero()).collect();
        s[0][0] = BigUint::one();
        let mut x_at_least: Vec<Vec<BigUint>> = if k2m_tail { (0..4).map(|_| zero()).collect() } else { Vec::new() };
        if k2m_tail {
            x_at_least[0][0] = BigUint::one();
        }
        let mut f = zero();
        let mut e = zero();
        e[0] = BigUint::one();
        let mut c = zero();
        let mut g = zero();
        g[0] = BigUint::one();
        let mut prev = binomial_row(0);
        for m in 1..=n {
            let row = binomial_row(m);
            c_rooted[m] = BigUint::from(m) * &e[m - 1];
            s[1][m] = c_rooted[m].clone();
            for j in 2..generic_max {
                let (lo, hi) = s.split_at_mut(j);
                hi[0][m] = min_label_conv(&prev, &c_rooted, &lo[j - 1], m);
            }
            for r in 0..x_at_least.len() {
                let value = {
                    let below = if r == 0 { &x_at_least[0] } else { &x_at_least[r - 1] };
                    min_label_conv(&prev, &c_rooted, below, m)
                };
                x_at_least[r][m] = value;
            }
            let mut fm = BigUint::zero();
            for k in 2..=generic_max.min(m + 1) {
                if !b[k].is_zero() {
                    fm += &b[k] * &s[k - 1][m];
                }
            }
            if k2m_tail {
                let hub = full_conv(&row, &c_rooted, &x_at_least[3], m);
                let middle = full_conv(&row, &s[2], &x_at_least[2], m);
                fm += (hub + middle) * 2u32;
            }
            f[m] = fm;
            e[m] = min_label_conv(&prev, &f, &e, m);
            c[m] = &c_rooted[m] / BigUint::from(m);
            g[m] = if tree {
                c[m].clone()
            } else {
                min_label_conv(&prev, &c, &g, m)
            };
            prev = row;
        }
        Recurrence {
            n_max: n,
            b,
            generic_max,
            k2m_tail,
            c_rooted,
            s,
            x_at_least,
            f,
            e,
            c,
            g,
        }
    }
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_str_radix(10)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| BigUint::parse_bytes(t.as_bytes(), 10).ok_or_else(|| D::Error::custom(format!("not a decimal integer: {t}"))))
            .collect()
    }
}

/// Exact counts for one class; every vector is indexed by `n` from 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub class: GraphClass,
    pub n_max: usize,
    #[serde(with = "decimal")]
    pub b: Vec<BigUint>,
    #[serde(with = "decimal")]
    pub c_rooted: Vec<BigUint>,
    #[serde(with = "decimal")]
    pub c: Vec<BigUint>,
    #[serde(with = "decimal")]
    pub g: Vec<BigUint>,
}

impl CountTable {
    pub fn from_recurrence(class: GraphClass, r: &Recurrence) -> Self {
        CountTable {
            class,
            n_max: r.n_max,
            b: r.b.clone(),
            c_rooted: r.c_rooted.clone(),
            c: r.c.clone(),
            g: r.g.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("count tables serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: CountTable = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let len = t.n_max + 1;
        if [&t.b, &t.c_rooted, &t.c, &t.g].iter().any(|v| v.len() != len) {
            return Err(Error::Parse(format!("count table columns must have {len} entries")));
        }
        Ok(t)
    }

    /// `|G_n|`.
    pub fn members(&self, n: usize) -> Result<&BigUint> {
        self.g.get(n).ok_or(Error::TableTooSmall { n, max: self.n_max })
    }
}

/// Exact `b`, `ĉ`, `c` and `g` for `n <= N`.
pub fn class_count_table(class: GraphClass, n: usize) -> Result<CountTable> {
    let r = Recurrence::new(class, n)?;
    Ok(CountTable::from_recurrence(class, &r))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub sum: f64,
    pub lower_bound: f64,
    pub ok: bool,
}

/// `Σ n_i log n_i` against `N log(N / r)`, its value when all parts are equal.
pub fn entropy_check(values: &[i64]) -> Result<EntropyReport> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&bad) = values.iter().find(|&&v| v < 1) {
        return Err(Error::NonPositiveEntry(bad));
    }
    let total: f64 = values.iter().map(|&v| v as f64).sum();
    let sum: f64 = values.iter().map(|&v| v as f64 * (v as f64).ln()).sum();
    let lower_bound = total * (total / values.len() as f64).ln();
    Ok(EntropyReport {
        sum,
        lower_bound,
        ok: sum >= lower_bound - 1e-12 * lower_bound.abs().max(1.0),
    })
}
