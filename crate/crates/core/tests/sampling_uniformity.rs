use std::collections::HashMap;

use cyclex::iso::canonical_code;
use cyclex::sampling::{rng_for, sampler_for, McmcRunner};
use cyclex::{in_class, GraphClass, LabelledGraph};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn mask_of(g: &LabelledGraph) -> u64 {
    g.edges().iter().map(|&(a, b)| 1u64 << (b * (b - 1) / 2 + a)).sum()
}

/// Edge masks of every labelled member on `n` vertices.
fn members(class: GraphClass, n: usize) -> Vec<u64> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|b| (0..b).map(move |a| (a, b))).collect();
    (0..1u64 << pairs.len())
        .filter(|&m| {
            let edges = pairs.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &p)| p);
            in_class(&LabelledGraph::from_edges(n, edges).unwrap(), class)
        })
        .collect()
}

fn p_value(counts: &HashMap<u64, u64>, support: &[u64], samples: u64) -> f64 {
    let expected = samples as f64 / support.len() as f64;
    let stat: f64 = support
        .iter()
        .map(|m| {
            let o = *counts.get(m).unwrap_or(&0) as f64;
            (o - expected).powi(2) / expected
        })
        .sum();
    1.0 - ChiSquared::new((support.len() - 1) as f64).unwrap().cdf(stat)
}

fn total_variation(counts: &HashMap<u64, u64>, support: &[u64], samples: u64) -> f64 {
    let u = 1.0 / support.len() as f64;
    support
        .iter()
        .map(|m| (*counts.get(m).unwrap_or(&0) as f64 / samples as f64 - u).abs())
        .sum::<f64>()
        / 2.0
}

fn exact_counts(class: GraphClass, n: usize, samples: u64, seed: u64, support: &[u64]) -> HashMap<u64, u64> {
    let sampler = sampler_for(class, n).unwrap();
    let mut rng = rng_for(seed, 0);
    let mut counts = HashMap::new();
    for _ in 0..samples {
        let g = sampler.sample(n, &mut rng).unwrap();
        assert!(in_class(&g, class));
        *counts.entry(mask_of(&g)).or_insert(0) += 1;
    }
    assert!(counts.keys().all(|m| support.contains(m)));
    counts
}

#[test]
fn exact_sampler_is_uniform() {
    let cases = [
        (GraphClass::ExCycle(4), 4, 54_000, 54),
        (GraphClass::Forest, 4, 38_000, 38),
        (GraphClass::Forest, 4, 100_000, 38),
        (GraphClass::Forest, 5, 100_000, 291),
        (GraphClass::ExCycle(4), 5, 100_000, 0),
        (GraphClass::ExCycle(5), 4, 100_000, 64),
        (GraphClass::ExCycle(5), 5, 100_000, 0),
    ];
    for (i, (class, n, samples, size)) in cases.into_iter().enumerate() {
        let support = members(class, n);
        if size > 0 {
            assert_eq!(support.len(), size);
        }
        let counts = exact_counts(class, n, samples, 100 + i as u64, &support);
        let p = p_value(&counts, &support, samples);
        assert!(p > 0.001, "{class} n={n}: p = {p}");
    }
}

#[test]
fn mcmc_is_near_uniform() {
    for (class, seed) in [(GraphClass::ExCycle(4), 1), (GraphClass::Forest, 2)] {
        let support = members(class, 4);
        let mut runner = McmcRunner::new(class, 4);
        let chains = 54_000u64;
        let mut counts = HashMap::new();
        for c in 0..chains {
            let g = runner.run(10_000, &mut rng_for(seed, c));
            assert!(in_class(&g, class));
            *counts.entry(mask_of(&g)).or_insert(0) += 1;
        }
        let tv = total_variation(&counts, &support, chains);
        assert!(tv <= 0.05, "{class}: total variation {tv}");
    }
}

#[test]
fn mcmc_forest_long_run_hits_empty_graph() {
    let mut runner = McmcRunner::new(GraphClass::Forest, 3);
    let mut rng = rng_for(8, 0);
    let (rounds, mut empty) = (70_000, 0);
    for _ in 0..rounds {
        if runner.run(25, &mut rng).edge_count() == 0 {
            empty += 1;
        }
    }
    let freq = empty as f64 / rounds as f64;
    assert!((freq - 1.0 / 7.0).abs() < 0.01, "empty graph frequency {freq}");
}

/// Two-sample chi-square between exact and MCMC samples, over isomorphism types.
#[test]
fn exact_and_mcmc_agree() {
    let (class, n, samples) = (GraphClass::ExCycle(5), 5, 20_000u64);
    let sampler = sampler_for(class, n).unwrap();
    let mut rng = rng_for(31, 0);
    let mut runner = McmcRunner::new(class, n);
    let mut table: HashMap<Vec<u8>, [u64; 2]> = HashMap::new();
    for i in 0..samples {
        let g = sampler.sample(n, &mut rng).unwrap();
        table.entry(canonical_code(&g).unwrap()).or_default()[0] += 1;
        let h = runner.run(2_000, &mut rng_for(32, i));
        table.entry(canonical_code(&h).unwrap()).or_default()[1] += 1;
    }
    let stat: f64 = table
        .values()
        .map(|&[a, b]| (a as f64 - b as f64).powi(2) / (a + b) as f64)
        .sum();
    let p = 1.0 - ChiSquared::new((table.len() - 1) as f64).unwrap().cdf(stat);
    assert!(p > 0.001, "p = {p} over {} types", table.len());
}
