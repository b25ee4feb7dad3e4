use proptest::prelude::*;

use cyclex::blocks::block_decomposition;
use cyclex::counting::entropy_check;
use cyclex::graph::LabelledGraph;
use cyclex::io::{from_graph6, from_sparse6, parse_graph, to_graph6, to_sparse6};
use cyclex::iso::canonical_code;
use cyclex::minors::{circumference, in_class, GraphClass};

fn graph(max_n: usize) -> impl Strategy<Value = LabelledGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let edges = (0..n)
                .flat_map(|b| (0..b).map(move |a| (a, b)))
                .zip(bits)
                .filter(|(_, keep)| *keep)
                .map(|(e, _)| e);
            LabelledGraph::from_edges(n, edges).unwrap()
        })
    })
}

fn shuffled(max_n: usize) -> impl Strategy<Value = (LabelledGraph, Vec<usize>)> {
    graph(max_n).prop_flat_map(|g| {
        let perm = Just((0..g.n()).collect::<Vec<_>>()).prop_shuffle();
        (Just(g), perm)
    })
}

proptest! {
    #[test]
    fn graph6_and_sparse6_round_trip(g in graph(40)) {
        prop_assert_eq!(from_graph6(&to_graph6(&g)).unwrap(), g.clone());
        prop_assert_eq!(from_sparse6(&to_sparse6(&g)).unwrap(), g.clone());
        prop_assert_eq!(parse_graph(&to_sparse6(&g)).unwrap(), g);
    }

    #[test]
    fn blocks_partition_the_edges(g in graph(14)) {
        let bt = block_decomposition(&g);
        let mut edges: Vec<(usize, usize)> = bt.blocks.iter().flat_map(|b| b.edges.iter().copied()).collect();
        edges.sort_unstable();
        prop_assert_eq!(edges, g.edges());
        for b in &bt.blocks {
            let bg = b.graph();
            prop_assert!(bg.n() == 2 || bg.is_two_connected());
        }
    }

    #[test]
    fn class_membership_ignores_labels((g, perm) in shuffled(9)) {
        let h = g.relabel(&perm);
        for class in [GraphClass::Forest, GraphClass::ExCycle(4), GraphClass::ExCycle(5), GraphClass::ExCycle(7), GraphClass::Outerplanar] {
            prop_assert_eq!(in_class(&g, class), in_class(&h, class));
        }
        prop_assert_eq!(circumference(&g), circumference(&h));
        prop_assert_eq!(canonical_code(&g).unwrap(), canonical_code(&h).unwrap());
    }

    #[test]
    fn ex_cycle_classes_are_nested(g in graph(10)) {
        let c = circumference(&g);
        for k in 3..=8 {
            prop_assert_eq!(in_class(&g, GraphClass::ExCycle(k)), c < k);
        }
    }

    #[test]
    fn entropy_sum_dominates_equal_parts(values in proptest::collection::vec(1i64..1_000_000, 1..60)) {
        let r = entropy_check(&values).unwrap();
        prop_assert!(r.ok, "{:?} {:?}", values, r);
    }

    #[test]
    fn equal_parts_are_tight(v in 1i64..10_000_000, parts in 1usize..200) {
        let r = entropy_check(&vec![v; parts]).unwrap();
        prop_assert!(r.ok);
        prop_assert!((r.sum - r.lower_bound).abs() <= 1e-9 * r.sum.abs().max(1.0));
    }
}
