//! Exhaustive small-graph census: isomorphism classes of 2-connected class
//! members, checks of the block catalogs, and brute-force labelled counts.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::catalog::{classify_block, CatalogSpec, Classification};
use crate::error::{Error, Result};
use crate::graph::LabelledGraph;
use crate::iso::{automorphism_count, canonical_code};
use crate::minors::{in_class, GraphClass};

/// Largest `n` swept edge set by edge set.
pub const SWEEP_LIMIT: usize = 7;
/// Largest `n` reachable through the opt-in vertex extension.
pub const EXTENDED_LIMIT: usize = 8;

const CHUNK: u64 = 1 << 14;

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect()
}

fn rows_of(n: usize, pairs: &[(usize, usize)], mask: u64) -> Vec<u64> {
    let mut rows = vec![0u64; n];
    for (bit, &(i, j)) in pairs.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            rows[i] |= 1 << j;
            rows[j] |= 1 << i;
        }
    }
    rows
}

/// Connectivity of the graph induced on `alive`.
fn connected_within(rows: &[u64], alive: u64) -> bool {
    if alive == 0 {
        return true;
    }
    let mut seen = alive & alive.wrapping_neg();
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = rows[v] & alive & !seen;
        seen |= new;
        frontier |= new;
    }
    seen == alive
}

fn two_connected_rows(rows: &[u64]) -> bool {
    let n = rows.len();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    n >= 3
        && connected_within(rows, all)
        && (0..n).all(|v| connected_within(rows, all & !(1 << v)))
}

fn check_n(n: usize, limit: usize, what: &str) -> Result<()> {
    if n > limit {
        return Err(Error::OutOfRange {
            what: what.into(),
            n,
        });
    }
    Ok(())
}

fn admits(g: &LabelledGraph, class: Option<GraphClass>) -> bool {
    class.is_none_or(|c| in_class(g, c))
}

fn code_string(g: &LabelledGraph) -> String {
    String::from_utf8(canonical_code(g).expect("census graphs are small")).expect("graph6 is ASCII")
}

/// Canonical codes of all graphs on `n <= 7` vertices passing `keep`.
fn sweep<F>(n: usize, keep: F) -> BTreeSet<String>
where
    F: Fn(&[u64]) -> Option<LabelledGraph> + Sync,
{
    let p = pairs(n);
    let total = 1u64 << p.len();
    (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut local = BTreeSet::new();
            for mask in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let rows = rows_of(n, &p, mask);
                if let Some(g) = keep(&rows) {
                    local.insert(code_string(&g));
                }
            }
            local
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        })
}

/// Isomorphism classes of connected members of `class` on `n` vertices.
fn connected_classes(n: usize, class: Option<GraphClass>) -> BTreeSet<String> {
    if n <= SWEEP_LIMIT {
        let all = (1u64 << n) - 1;
        return sweep(n, |rows| {
            if !connected_within(rows, all) {
                return None;
            }
            let g = LabelledGraph::from_rows(rows);
            admits(&g, class).then_some(g)
        });
    }
    // each connected graph has a non-cut vertex, and the classes are closed
    // under deleting vertices
    extend(n, class, |rows| connected_within(rows, (1u64 << rows.len()) - 1))
}

fn extend<F>(n: usize, class: Option<GraphClass>, keep: F) -> BTreeSet<String>
where
    F: Fn(&[u64]) -> bool + Sync,
{
    let smaller: Vec<String> = connected_classes(n - 1, class).into_iter().collect();
    smaller
        .par_iter()
        .map(|code| {
            let base = crate::io::from_graph6(code).expect("codes are graph6");
            let mut local = BTreeSet::new();
            for nb in 1u64..1 << (n - 1) {
                let mut rows: Vec<u64> = (0..n - 1)
                    .map(|v| base.row(v) | ((nb >> v & 1) << (n - 1)))
                    .collect();
                rows.push(nb);
                if !keep(&rows) {
                    continue;
                }
                let g = LabelledGraph::from_rows(&rows);
                if admits(&g, class) {
                    local.insert(code_string(&g));
                }
            }
            local
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        })
}

/// One canonical code (graph6) per isomorphism class of 2-connected members
/// of `class` (all graphs if `None`) on `n <= 7` vertices.
pub fn enumerate_two_connected(n: usize, class: Option<GraphClass>) -> Result<Vec<String>> {
    check_n(n, SWEEP_LIMIT, "census enumeration without the n = 8 opt-in")?;
    Ok(two_connected_impl(n, class))
}

/// As [`enumerate_two_connected`], also allowing `n = 8`.
pub fn enumerate_two_connected_extended(n: usize, class: Option<GraphClass>) -> Result<Vec<String>> {
    check_n(n, EXTENDED_LIMIT, "census enumeration")?;
    Ok(two_connected_impl(n, class))
}

fn two_connected_impl(n: usize, class: Option<GraphClass>) -> Vec<String> {
    if n < 3 {
        return Vec::new();
    }
    let codes = if n <= SWEEP_LIMIT {
        sweep(n, |rows| {
            if !two_connected_rows(rows) {
                return None;
            }
            let g = LabelledGraph::from_rows(rows);
            admits(&g, class).then_some(g)
        })
    } else {
        extend(n, class, two_connected_rows)
    };
    codes.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedClass {
    pub code: String,
    pub spec: CatalogSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionWitness {
    pub code: String,
    /// The witness graph in graph6; the canonical relabelling itself.
    pub graph6: String,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub k: usize,
    pub n: usize,
    pub matched: Vec<MatchedClass>,
    pub exceptions: Vec<ExceptionWitness>,
    /// Matched classes per catalog family.
    pub totals: BTreeMap<String, usize>,
}

impl CensusReport {
    pub fn families(&self) -> BTreeSet<String> {
        self.totals.keys().cloned().collect()
    }
}

/// Run every 2-connected member of Ex(C_k) on `n` vertices through the
/// recognizers. Unmatched classes are reported as exceptions.
pub fn verify_characterization(k: usize, n: usize, allow_n8: bool) -> Result<CensusReport> {
    if !(5..=7).contains(&k) {
        return Err(Error::InvalidParameters(format!(
            "block catalogs exist for k in 5..=7, got {k}"
        )));
    }
    let codes = if allow_n8 {
        enumerate_two_connected_extended(n, Some(GraphClass::ExCycle(k)))?
    } else {
        enumerate_two_connected(n, Some(GraphClass::ExCycle(k)))?
    };
    let results: Vec<(String, Classification)> = codes
        .par_iter()
        .map(|code| {
            let g = crate::io::from_graph6(code)?;
            Ok((code.clone(), classify_block(&g, k)?))
        })
        .collect::<Result<_>>()?;
    let mut report = CensusReport {
        k,
        n,
        matched: Vec::new(),
        exceptions: Vec::new(),
        totals: BTreeMap::new(),
    };
    for (code, class) in results {
        match class {
            Classification::Match(spec) => {
                *report.totals.entry(spec.family().to_string()).or_default() += 1;
                report.matched.push(MatchedClass { code, spec });
            }
            Classification::Exceptional => {
                let g = crate::io::from_graph6(&code)?;
                report.exceptions.push(ExceptionWitness {
                    graph6: code.clone(),
                    code,
                    edges: g.edge_count(),
                });
            }
        }
    }
    Ok(report)
}

/// Labelled members of `class` on `n <= 7` vertices, by checking every edge set.
pub fn brute_force_count(class: GraphClass, n: usize) -> Result<BigUint> {
    check_n(n, SWEEP_LIMIT, "brute-force counting")?;
    if n == 0 {
        return Ok(BigUint::from(1u32));
    }
    let p = pairs(n);
    let total = 1u64 << p.len();
    let count: u64 = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(total))
                .filter(|&mask| in_class(&LabelledGraph::from_rows(&rows_of(n, &p, mask)), class))
                .count() as u64
        })
        .sum();
    Ok(BigUint::from(count))
}

/// Labelled 2-connected members of `class` on `n` vertices (plus the single
/// edge for `n = 2`): the sum of `n! / |Aut|` over the census classes.
pub fn labelled_block_count(class: GraphClass, n: usize, allow_n8: bool) -> Result<BigUint> {
    if n == 2 {
        return Ok(BigUint::from(1u32));
    }
    let codes = if allow_n8 {
        enumerate_two_connected_extended(n, Some(class))?
    } else {
        enumerate_two_connected(n, Some(class))?
    };
    let fact: BigUint = (1..=n as u64).product();
    let mut total = BigUint::from(0u32);
    for code in codes {
        let g = crate::io::from_graph6(&code)?;
        total += &fact / automorphism_count(&g)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_two_connected(3, Some(GraphClass::ExCycle(5))).unwrap().len(), 1);
        assert_eq!(enumerate_two_connected(4, None).unwrap().len(), 3);
        assert_eq!(enumerate_two_connected(5, Some(GraphClass::ExCycle(5))).unwrap().len(), 2);
        assert!(matches!(enumerate_two_connected(8, None), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn known_two_connected_class_counts() {
        // 2-connected unlabelled graphs: 1, 3, 10, 56 on 3..6 vertices
        let counts: Vec<usize> = (3..=6)
            .map(|n| enumerate_two_connected(n, None).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 3, 10, 56]);
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_count(GraphClass::Forest, 3).unwrap(), BigUint::from(7u32));
        assert_eq!(brute_force_count(GraphClass::ExCycle(4), 4).unwrap(), BigUint::from(54u32));
        assert_eq!(brute_force_count(GraphClass::ExCycle(5), 4).unwrap(), BigUint::from(64u32));
        assert_eq!(brute_force_count(GraphClass::Forest, 4).unwrap(), BigUint::from(38u32));
        assert_eq!(brute_force_count(GraphClass::Tree, 5).unwrap(), BigUint::from(125u32));
    }

    #[test]
    fn characterization_examples() {
        let r = verify_characterization(5, 5, false).unwrap();
        assert_eq!((r.matched.len(), r.exceptions.len()), (2, 0));
        let r = verify_characterization(5, 4, false).unwrap();
        assert_eq!(r.exceptions.len(), 1);
        assert_eq!(r.exceptions[0].graph6, "C~");
        let r = verify_characterization(6, 5, false).unwrap();
        assert!(r.exceptions.iter().any(|e| e.graph6 == "D~{"));
    }
}
