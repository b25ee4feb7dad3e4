use std::collections::BTreeSet;

use cyclex::constructions::{
    double_count_ratio, reconstruct, transform, RatioParams, TransformParams, TransformRecord, TransformVariant,
};
use cyclex::error::Error;
use cyclex::graph::{max_degree, named, pendant_vertices, LabelledGraph};
use cyclex::iso::canonical_code_bounded;
use cyclex::minors::{in_class, GraphClass};
use cyclex::sampling::{mcmc_chain, rng_for, sampler_for};
use rand::Rng;

const N: usize = 500;
const SEEDS: u64 = 100;

/// Random members of the class: exact samples, or MCMC states where no exact
/// sampler reaches n = 500. Chains are slow, so ten of them are cycled through.
fn base_graphs(class: GraphClass, count: u64) -> Vec<LabelledGraph> {
    match class {
        GraphClass::Outerplanar | GraphClass::ExCycle(7) => {
            let chains: Vec<LabelledGraph> = (0..count.min(10))
                .map(|i| mcmc_chain(class, N, 20_000, &mut rng_for(i, 7)))
                .collect();
            (0..count as usize).map(|i| chains[i % chains.len()].clone()).collect()
        }
        _ => {
            let sampler = sampler_for(class, N).unwrap();
            (0..count).map(|i| sampler.sample(N, &mut rng_for(i, 7)).unwrap()).collect()
        }
    }
}

fn check(rec: &TransformRecord, g: &LabelledGraph, variant: TransformVariant) {
    let h = &rec.result;
    assert_eq!(h.n(), g.n());
    assert!(in_class(h, variant.class()), "{variant}: result left the class");
    if variant.is_lower() {
        let (_, argmax) = max_degree(h).unwrap();
        assert_eq!(argmax, vec![rec.v1], "{variant}: v1 is not the unique maximum");
    }
    assert_eq!(reconstruct(rec).unwrap(), *g, "{variant}: round trip");
}

fn lower_params(variant: TransformVariant, delta: usize) -> TransformParams {
    let mut p = TransformParams::default();
    match variant {
        TransformVariant::LowerFan => p.size = Some(delta + 2),
        TransformVariant::LowerC5 => {
            p.r = Some(3);
            p.size = Some(3 * (delta / 3 + 1));
        }
        _ => p.size = Some(delta + 1),
    }
    p
}

fn lower_round_trips(variant: TransformVariant) {
    for (i, g) in base_graphs(variant.class(), SEEDS).iter().enumerate() {
        let (delta, _) = max_degree(g).unwrap();
        let rec = transform(g, variant, &lower_params(variant, delta), i as u64).unwrap();
        check(&rec, g, variant);
    }
}

#[test]
fn lower_tree_round_trips() {
    lower_round_trips(TransformVariant::LowerTree);
}

#[test]
fn lower_fan_round_trips() {
    lower_round_trips(TransformVariant::LowerFan);
}

#[test]
fn lower_c4_round_trips() {
    lower_round_trips(TransformVariant::LowerC4);
}

#[test]
fn lower_c5_round_trips() {
    lower_round_trips(TransformVariant::LowerC5);
}

#[test]
fn lower_hierarchical_round_trips() {
    lower_round_trips(TransformVariant::LowerC2l1(3));
}

#[test]
fn lower_c4_pairs_form_a_matching() {
    let g = &base_graphs(GraphClass::ExCycle(4), 1)[0];
    let p = TransformParams {
        size: Some(8),
        ..Default::default()
    };
    let rec = transform(g, TransformVariant::LowerC4, &p, 5).unwrap();
    let h = &rec.result;
    assert_eq!(h.degree(rec.v1), 9);
    let inside: Vec<usize> = h.neighbors(rec.v1).iter().copied().filter(|&x| Some(x) != rec.u).collect();
    let matched = inside
        .iter()
        .filter(|&&x| h.neighbors(x).iter().filter(|y| inside.contains(y)).count() == 1)
        .count();
    assert_eq!(matched, 8);
}

#[test]
fn upper_tree_round_trips() {
    let sampler = sampler_for(GraphClass::Forest, N).unwrap();
    for i in 0..SEEDS {
        let g = sampler.sample(N, &mut rng_for(i, 7)).unwrap();
        let p = TransformParams {
            size: Some(12 + (i as usize % 20)),
            ..Default::default()
        };
        let g = transform(&g, TransformVariant::LowerTree, &p, i).unwrap().result;
        let rec = transform(&g, TransformVariant::UpperTree, &TransformParams::default(), i).unwrap();
        check(&rec, &g, TransformVariant::UpperTree);
    }
}

#[test]
fn upper_exc4_round_trips() {
    let sampler = sampler_for(GraphClass::ExCycle(4), N).unwrap();
    for i in 0..SEEDS {
        let g = sampler.sample(N, &mut rng_for(i, 7)).unwrap();
        let p = TransformParams {
            size: Some(12 + (i as usize % 20)),
            ..Default::default()
        };
        let g = transform(&g, TransformVariant::LowerC4, &p, i).unwrap().result;
        let rec = transform(&g, TransformVariant::UpperExC4, &TransformParams::default(), i).unwrap();
        check(&rec, &g, TransformVariant::UpperExC4);
    }
}

/// A member of Ex(C5) whose vertex 0 carries `K_{2,t}` and `K+_{2,t}` blocks,
/// a triangle and some pendant edges, next to a random member.
fn hub_graph<R: Rng>(base: &LabelledGraph, rng: &mut R) -> LabelledGraph {
    let mut edges = Vec::new();
    let mut next = 1;
    let mut block = |t: usize, plus: bool, edges: &mut Vec<(usize, usize)>| {
        let z0 = next;
        for m in z0 + 1..=z0 + t {
            edges.push((0, m));
            edges.push((z0, m));
        }
        if plus {
            edges.push((0, z0));
        }
        next = z0 + t + 1;
    };
    // the first block alone lifts vertex 0 over the threshold at n = 500
    block(rng.gen_range(16..=40), false, &mut edges);
    for _ in 0..rng.gen_range(0..=2) {
        let t = rng.gen_range(3..=40);
        block(t, false, &mut edges);
    }
    for _ in 0..rng.gen_range(0..=2) {
        let t = rng.gen_range(3..=20);
        block(t, true, &mut edges);
    }
    edges.extend([(0, next), (0, next + 1), (next, next + 1)]);
    next += 2;
    for _ in 0..rng.gen_range(0..=4) {
        edges.push((0, next));
        next += 1;
    }
    let hub = LabelledGraph::from_edges(next, edges).unwrap();
    let g = hub.disjoint_union(&base.induced(&(0..N - next).collect::<Vec<_>>()));
    assert!(in_class(&g, GraphClass::ExCycle(5)));
    g
}

#[test]
fn upper_exc5_round_trips() {
    let sampler = sampler_for(GraphClass::ExCycle(5), N).unwrap();
    for i in 0..SEEDS {
        let mut rng = rng_for(i, 7);
        let base = sampler.sample(N, &mut rng).unwrap();
        let g = hub_graph(&base, &mut rng);
        let rec = transform(&g, TransformVariant::UpperExC5, &TransformParams::default(), i).unwrap();
        check(&rec, &g, TransformVariant::UpperExC5);
    }
}

#[test]
fn upper_exc5_on_k240() {
    // K_{2,40} at vertex 0 and a caterpillar carrying 300 pendants
    let mut edges: Vec<(usize, usize)> = (2..42).flat_map(|m| [(0, m), (1, m)]).collect();
    let spine: Vec<usize> = (42..100).collect();
    edges.push((0, spine[0]));
    edges.extend(spine.windows(2).map(|w| (w[0], w[1])));
    edges.extend((0..300).map(|i| (spine[i % spine.len()], 100 + i)));
    let g = LabelledGraph::from_edges(400, edges).unwrap();
    assert!(in_class(&g, GraphClass::ExCycle(5)));
    let rec = transform(&g, TransformVariant::UpperExC5, &TransformParams::default(), 1).unwrap();
    check(&rec, &g, TransformVariant::UpperExC5);
    // the block is now a star of fresh vertices below v2
    assert_eq!(rec.result.degree(0), 3);
    assert!((2..42).all(|m| rec.result.degree(m) == 1));
}

#[test]
fn spider_upper_tree() {
    // centre 0 with 50 legs of length 2, and 200 pendants on a path
    let mut edges: Vec<(usize, usize)> = (0..50).flat_map(|i| [(0, 1 + i), (1 + i, 51 + i)]).collect();
    let path: Vec<usize> = (101..151).collect();
    edges.extend(path.windows(2).map(|w| (w[0], w[1])));
    edges.extend((0..200).map(|i| (path[i % path.len()], 151 + i)));
    let g = LabelledGraph::from_edges(351, edges).unwrap();
    let p = TransformParams {
        c: Some(0.2),
        ..Default::default()
    };
    let rec = transform(&g, TransformVariant::UpperTree, &p, 4).unwrap();
    check(&rec, &g, TransformVariant::UpperTree);
    assert_eq!(rec.result.degree(0), 10);
}

#[test]
fn tampering_is_detected() {
    let mut rng = rng_for(99, 0);
    let variants = [
        TransformVariant::LowerTree,
        TransformVariant::LowerC4,
        TransformVariant::LowerC5,
        TransformVariant::LowerFan,
    ];
    for variant in variants {
        for (i, g) in base_graphs(variant.class(), 10).iter().enumerate() {
            let (delta, _) = max_degree(g).unwrap();
            let mut rec = transform(g, variant, &lower_params(variant, delta), i as u64).unwrap();
            loop {
                let (a, b) = (rng.gen_range(0..N), rng.gen_range(0..N));
                if a != b && rec.result.add_edge(a, b) {
                    break;
                }
            }
            match reconstruct(&rec) {
                Err(Error::IdentificationFailed(_)) => {}
                Ok(back) => assert_ne!(back, *g, "{variant}: tampering went unnoticed"),
                Err(e) => panic!("{variant}: unexpected error {e}"),
            }
        }
    }
}

#[test]
fn seeds_give_distinct_results() {
    let g = &base_graphs(GraphClass::Forest, 1)[0];
    let (delta, _) = max_degree(g).unwrap();
    let p = lower_params(TransformVariant::LowerTree, delta);
    let mut seen = BTreeSet::new();
    for seed in 0..SEEDS {
        let rec = transform(g, TransformVariant::LowerTree, &p, seed).unwrap();
        assert_eq!(reconstruct(&rec).unwrap(), *g);
        seen.insert(rec.result.edges());
    }
    assert_eq!(seen.len(), SEEDS as usize);
}

#[test]
fn distinct_witnesses_give_distinct_shapes() {
    // a small tree where canonical forms are cheap: the pendant sets differ,
    // and so do the shapes left behind
    let mut edges: Vec<(usize, usize)> = (0..9).map(|i| (i, i + 1)).collect();
    edges.extend((0..10).map(|i| (i, 10 + i)));
    edges.extend((0..10).map(|i| (10 + i, 20 + i)));
    edges.extend([(20, 30), (25, 31)]);
    let g = LabelledGraph::from_edges(32, edges).unwrap();
    assert!(pendant_vertices(&g).len() >= 6);
    let p = TransformParams {
        size: Some(4),
        ..Default::default()
    };
    let mut by_witness = std::collections::BTreeMap::new();
    for seed in 0..SEEDS {
        let rec = transform(&g, TransformVariant::LowerTree, &p, seed).unwrap();
        let key = (rec.pendants.clone(), rec.u);
        let code = canonical_code_bounded(&rec.result, 32).unwrap();
        by_witness.insert(key, (code, rec.result.edges()));
    }
    let labelled: BTreeSet<_> = by_witness.values().map(|(_, e)| e.clone()).collect();
    assert_eq!(labelled.len(), by_witness.len());
    let shapes: BTreeSet<_> = by_witness.values().map(|(c, _)| c.clone()).collect();
    assert!(shapes.len() > 1);
}

#[test]
fn lower_tree_ratio_grows() {
    let p = RatioParams::default();
    let logs: Vec<f64> = [1e4, 1e5, 1e6, 1e7]
        .iter()
        .map(|&n| double_count_ratio(n, TransformVariant::LowerTree, &p).unwrap().log_ratio)
        .collect();
    assert!(logs.windows(2).all(|w| w[1] > w[0]), "{logs:?}");
    assert!(double_count_ratio(1e6, TransformVariant::LowerTree, &p).unwrap().log_ratio > 0.0);
}

#[test]
fn star_is_a_valid_upper_tree_input() {
    let g = named::star(30).disjoint_union(&LabelledGraph::from_edges(60, (0..30).map(|i| (2 * i, 2 * i + 1))).unwrap());
    let rec = transform(&g, TransformVariant::UpperTree, &TransformParams::default(), 0).unwrap();
    check(&rec, &g, TransformVariant::UpperTree);
}
