//! Monte Carlo scans of the maximum degree and pendant statistics.
//!
//! Every sample draws from its own stream derived from the seed, `n` and
//! the sample index, so results do not depend on the number of threads.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{max_pendants_per_vertex, pendant_vertices, LabelledGraph};
use crate::minors::GraphClass;
use crate::sampling::{rng_for, sampler_for};

/// Statistics of one sampled graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    pub delta: usize,
    pub pendants: usize,
    pub max_pendants_per_vertex: usize,
}

impl SampleStats {
    pub fn of(g: &LabelledGraph) -> SampleStats {
        SampleStats {
            n: g.n(),
            delta: (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0),
            pendants: pendant_vertices(g).len(),
            max_pendants_per_vertex: max_pendants_per_vertex(g),
        }
    }
}

/// One line of a scan; the field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub class: String,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub delta_mean: f64,
    pub delta_min: usize,
    pub delta_q05: usize,
    pub delta_q95: usize,
    pub delta_max: usize,
    pub pendant_fraction_mean: f64,
    pub max_pendants_per_vertex_mean: f64,
}

/// Nearest-rank quantile of sorted data.
pub fn nearest_rank(sorted: &[usize], q: f64) -> usize {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

fn stream(n: usize, i: usize) -> u64 {
    ((n as u64) << 32) | i as u64
}

/// Per-sample statistics for `samples` independent draws at each `n`.
pub fn sample_stats(class: GraphClass, ns: &[usize], samples: usize, seed: u64) -> Result<Vec<Vec<SampleStats>>> {
    let Some(&top) = ns.iter().max() else {
        return Ok(Vec::new());
    };
    let sampler = sampler_for(class, top)?;
    ns.iter()
        .map(|&n| {
            (0..samples)
                .into_par_iter()
                .map(|i| {
                    let g = sampler.sample(n, &mut rng_for(seed, stream(n, i)))?;
                    Ok(SampleStats::of(&g))
                })
                .collect()
        })
        .collect()
}

/// Summary row of a set of samples at one `n`.
pub fn summarize(class: GraphClass, n: usize, seed: u64, stats: &[SampleStats]) -> Result<ScanRow> {
    if stats.is_empty() {
        return Err(Error::EmptyInput);
    }
    let count = stats.len() as f64;
    let mut deltas: Vec<usize> = stats.iter().map(|s| s.delta).collect();
    deltas.sort_unstable();
    let mean = |f: &dyn Fn(&SampleStats) -> f64| stats.iter().map(f).sum::<f64>() / count;
    Ok(ScanRow {
        class: class.id(),
        n,
        samples: stats.len(),
        seed,
        delta_mean: mean(&|s| s.delta as f64),
        delta_min: deltas[0],
        delta_q05: nearest_rank(&deltas, 0.05),
        delta_q95: nearest_rank(&deltas, 0.95),
        delta_max: deltas[deltas.len() - 1],
        pendant_fraction_mean: mean(&|s| s.pendants as f64 / s.n.max(1) as f64),
        max_pendants_per_vertex_mean: mean(&|s| s.max_pendants_per_vertex as f64),
    })
}

pub fn degree_scan(class: GraphClass, ns: &[usize], samples: usize, seed: u64) -> Result<Vec<ScanRow>> {
    if samples == 0 {
        return Err(Error::InvalidParameters("samples must be positive".into()));
    }
    let stats = sample_stats(class, ns, samples, seed)?;
    ns.iter().zip(&stats).map(|(&n, s)| summarize(class, n, seed, s)).collect()
}

pub fn rows_to_csv(rows: &[ScanRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("writing to memory");
    }
    if rows.is_empty() {
        w.write_record([
            "class",
            "n",
            "samples",
            "seed",
            "delta_mean",
            "delta_min",
            "delta_q05",
            "delta_q95",
            "delta_max",
            "pendant_fraction_mean",
            "max_pendants_per_vertex_mean",
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

pub fn rows_from_csv(text: &str) -> Result<Vec<ScanRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

pub fn rows_to_json(rows: &[ScanRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

/// Scale against which `delta_mean` is compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalizer {
    Log,
    /// `log n / log^(j) n`, with `log^(j)` the `j`-fold iterated log, `j >= 2`.
    LogOverIter(usize),
}

impl Normalizer {
    pub const LOG_OVER_LOG_LOG: Normalizer = Normalizer::LogOverIter(2);
    pub const LOG_OVER_LOG3: Normalizer = Normalizer::LogOverIter(3);
    pub const LOG_OVER_LOG4: Normalizer = Normalizer::LogOverIter(4);

    pub fn eval(self, n: usize) -> Result<f64> {
        let x = n as f64;
        let (num, den) = match self {
            Normalizer::Log => (x.ln(), 1.0),
            Normalizer::LogOverIter(j) => (x.ln(), (0..j).fold(x, |acc, _| acc.ln())),
        };
        if !(num > 0.0 && den > 0.0 && num.is_finite() && den.is_finite()) {
            return Err(Error::NormalizerUndefined(n));
        }
        Ok(num / den)
    }
}

impl fmt::Display for Normalizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normalizer::Log => f.write_str("log"),
            Normalizer::LogOverIter(j) => write!(f, "log/log{j}"),
        }
    }
}

impl FromStr for Normalizer {
    type Err = Error;

    /// `log`, `log/loglog`, or `log/logJ` for the `J`-fold iterated log.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.to_ascii_lowercase();
        if t == "log" {
            return Ok(Normalizer::Log);
        }
        if t == "log/loglog" {
            return Ok(Normalizer::LOG_OVER_LOG_LOG);
        }
        match t.strip_prefix("log/log").and_then(|j| j.parse::<usize>().ok()) {
            Some(j) if j >= 2 => Ok(Normalizer::LogOverIter(j)),
            _ => Err(Error::Parse(format!("unknown normalizer '{s}'"))),
        }
    }
}

/// `(n, delta_mean / m(n))` per row.
pub fn scaling_ratios(rows: &[ScanRow], m: Normalizer) -> Result<Vec<(usize, f64)>> {
    rows.iter().map(|r| Ok((r.n, r.delta_mean / m.eval(r.n)?))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PendantReport {
    pub samples: usize,
    pub violations: usize,
    pub violation_fraction: f64,
}

/// Bound `2 log n / log log n` on the pendants at one vertex; infinite
/// where it is undefined.
pub fn pendant_bound(n: usize) -> f64 {
    let x = n as f64;
    let b = 2.0 * x.ln() / x.ln().ln();
    if b.is_finite() && b > 0.0 {
        b
    } else {
        f64::INFINITY
    }
}

/// Share of samples with more pendants at a single vertex than the bound.
pub fn pendant_bound_check(stats: &[SampleStats]) -> PendantReport {
    let violations = stats
        .iter()
        .filter(|s| s.max_pendants_per_vertex as f64 > pendant_bound(s.n))
        .count();
    PendantReport {
        samples: stats.len(),
        violations,
        violation_fraction: if stats.is_empty() {
            0.0
        } else {
            violations as f64 / stats.len() as f64
        },
    }
}
