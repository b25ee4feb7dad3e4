use num_bigint::BigUint;
use cyclex::catalog::{classify_block, Classification};
use cyclex::census::{brute_force_count, enumerate_two_connected_extended};
use cyclex::counting::{block_count_table, block_types, catalog_block_types, class_count_table};
use cyclex::io::from_graph6;
use cyclex::iso::automorphism_count;
use cyclex::GraphClass;

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).product()
}

#[test]
fn recurrence_matches_brute_force() {
    let classes = [
        GraphClass::Forest,
        GraphClass::Tree,
        GraphClass::ExCycle(3),
        GraphClass::ExCycle(4),
        GraphClass::ExCycle(5),
        GraphClass::ExCycle(6),
        GraphClass::ExCycle(7),
        GraphClass::Outerplanar,
    ];
    for class in classes {
        let table = class_count_table(class, 7).unwrap();
        for n in 1..=7 {
            assert_eq!(table.g[n], brute_force_count(class, n).unwrap(), "{class} n={n}");
            assert_eq!(table.c_rooted[n], &table.c[n] * BigUint::from(n));
            assert!(table.g[n] >= table.c[n]);
        }
    }
}

#[test]
fn census_blocks_match_live_census() {
    for class in [GraphClass::ExCycle(5), GraphClass::ExCycle(6), GraphClass::ExCycle(7), GraphClass::Outerplanar] {
        for k in 3..=7 {
            let live = cyclex::census::enumerate_two_connected(k, Some(class)).unwrap();
            assert_eq!(block_types(class, k).unwrap().len(), live.len(), "{class} k={k}");
        }
    }
}

/// Census count = catalog count + weight of the census exceptions.
#[test]
fn block_sources_agree() {
    for c in 5..=7 {
        let class = GraphClass::ExCycle(c);
        let b = block_count_table(class, 8).unwrap();
        for k in 4..=8 {
            let catalog: BigUint = catalog_block_types(c, k).unwrap().into_iter().map(|t| t.weight).sum();
            let mut exceptional = BigUint::from(0u32);
            let mut witnesses = Vec::new();
            for code in enumerate_two_connected_extended(k, Some(class)).unwrap() {
                let g = from_graph6(&code).unwrap();
                if classify_block(&g, c).unwrap() == Classification::Exceptional {
                    exceptional += factorial(k) / automorphism_count(&g).unwrap();
                    witnesses.push(code);
                }
            }
            assert_eq!(b[k], catalog + exceptional, "exc{c} k={k}");
            if (c == 5 && k >= 5) || (c == 6 && k >= 6) {
                assert!(witnesses.is_empty(), "exc{c} k={k}: {witnesses:?}");
            }
        }
    }
}

#[test]
fn exc5_closed_form_matches_catalog() {
    let b = block_count_table(GraphClass::ExCycle(5), 40).unwrap();
    for k in 5..=40 {
        let catalog: BigUint = catalog_block_types(5, k).unwrap().into_iter().map(|t| t.weight).sum();
        assert_eq!(b[k], catalog, "k={k}");
    }
}

#[test]
fn exc6_beyond_census_is_catalog() {
    let b = block_count_table(GraphClass::ExCycle(6), 12).unwrap();
    for k in 9..=12 {
        let types = catalog_block_types(6, k).unwrap();
        assert!(types.iter().all(|t| t.graph.is_two_connected()));
        assert_eq!(b[k], types.into_iter().map(|t| t.weight).sum::<BigUint>());
    }
}
