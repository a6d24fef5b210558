mod common;

use dsec::metrics::{closeness_indices, closer_hop_cardinalities, neighbor_categories, WeightTerms};
use dsec::verify::{check_efficient_edge_domination, verify_state, Property};
use dsec::{cluster, compute_metrics, hop_distance_table, node_weight, Fixture, Graph64, Overrides, WeightConfig};
use proptest::prelude::*;

fn small_graph() -> impl Strategy<Value = Graph64> {
    (1usize..=7).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph64::from_edges(n, &edges).unwrap()
        })
    })
}

/// g_h(u) straight from the definition: for every v ≠ u, every w, compare
/// d(w, u) with d(w, v).
fn g_h_oracle(g: &Graph64) -> Vec<i64> {
    let hop = hop_distance_table(g);
    let n = g.node_count();
    (0..n)
        .map(|u| {
            let mut total = 0i64;
            for v in (0..n).filter(|&v| v != u) {
                for w in 0..n {
                    let (du, dv) = (hop.or_infinite(w, u), hop.or_infinite(w, v));
                    if du < dv {
                        total += 1;
                    } else if dv < du {
                        total -= 1;
                    }
                }
            }
            total
        })
        .collect()
}

fn naive_efficient(edge_set: &[(usize, usize)], g: &Graph64) -> bool {
    g.edges().all(|(a, b)| {
        let mut hits = 0;
        for &(c, d) in edge_set {
            if [c, d].iter().any(|x| *x == a || *x == b) {
                hits += 1;
            }
        }
        hits == 1
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closeness_sums_vanish(n in 2usize..30, seed in any::<u64>(), range in 15.0f64..60.0) {
        let geo = common::geometric(n, seed, range, false);
        let (g_h, g_ed) = closeness_indices(&geo.tables).unwrap();
        prop_assert_eq!(g_h.iter().sum::<i64>(), 0);
        prop_assert_eq!(g_ed.iter().sum::<i64>(), 0);
    }

    #[test]
    fn closer_sets_and_ties_cover_all_nodes(g in small_graph()) {
        let hop = hop_distance_table(&g);
        let n = g.node_count();
        for u in 0..n {
            for v in (0..n).filter(|&v| v != u) {
                let (a, b) = closer_hop_cardinalities(u, v, &hop).unwrap();
                let ties = (0..n).filter(|&w| hop.or_infinite(w, u) == hop.or_infinite(w, v)).count();
                prop_assert_eq!(a + b + ties, n);
                prop_assert_eq!(closer_hop_cardinalities(v, u, &hop).unwrap(), (b, a));
            }
        }
    }

    #[test]
    fn g_h_matches_triple_loop(g in small_graph()) {
        let hop = hop_distance_table(&g);
        let n = g.node_count();
        let via_pairs: Vec<i64> = (0..n)
            .map(|u| (0..n).filter(|&v| v != u).map(|v| {
                let (a, b) = closer_hop_cardinalities(u, v, &hop).unwrap();
                a as i64 - b as i64
            }).sum())
            .collect();
        prop_assert_eq!(via_pairs, g_h_oracle(&g));
    }

    #[test]
    fn edge_domination_matches_naive(g in small_graph(), pick in proptest::collection::vec(any::<bool>(), 21)) {
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let chosen: Vec<(usize, usize)> = edges.iter().zip(&pick).filter(|(_, &p)| p).map(|(&e, _)| e).collect();
        prop_assert_eq!(check_efficient_edge_domination(&chosen, &g).unwrap(), naive_efficient(&chosen, &g));
    }

    #[test]
    fn weight_is_linear_in_alphas(
        terms in proptest::array::uniform6(-50.0f64..50.0),
        a in proptest::array::uniform6(-2.0f64..2.0),
        b in proptest::array::uniform6(-2.0f64..2.0),
    ) {
        let t = WeightTerms { deg: terms[0], cci: terms[1], inv_ecc: terms[2], inv_mhd: terms[3], inv_med: terms[4], ns: terms[5] };
        let cfg = |alphas| WeightConfig { alphas, ..WeightConfig::default() };
        let sum: [f64; 6] = std::array::from_fn(|i| a[i] + b[i]);
        let lhs = node_weight(&t, &cfg(sum));
        let rhs = node_weight(&t, &cfg(a)) + node_weight(&t, &cfg(b));
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn categories_partition_neighbourhood(n in 2usize..30, seed in any::<u64>(), range in 15.0f64..60.0) {
        let geo = common::geometric(n, seed, range, false);
        for u in geo.graph.nodes() {
            let c = neighbor_categories(u, &geo.graph, &geo.tables.euclid).unwrap();
            prop_assert_eq!(c.total(), geo.graph.degree(u));
        }
    }

    #[test]
    fn engine_states_are_well_formed(n in 5usize..40, seed in any::<u64>()) {
        let geo = common::geometric(n, seed, 25.0, true);
        let metrics = compute_metrics(&geo.graph, &geo.tables, &WeightConfig::default(), &Overrides::default()).unwrap();
        let r = cluster(&geo.graph, &geo.tables.hop, &metrics).unwrap();
        for state in [&r.formed, &r.adjusted] {
            let report = verify_state(state, &geo.graph, &geo.tables.hop, None).unwrap();
            prop_assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        }
        // A master outranks everything it claimed that was never passed over.
        for c in &r.formed.clusters {
            for &u in c.members.iter().filter(|u| !r.formed.deferred.contains(u)) {
                prop_assert!(metrics[c.master].weight >= metrics[u].weight);
            }
        }
        prop_assert_ne!(r.class, dsec::PerfectionClass::Imperfect);
    }

    #[test]
    fn fixture_capture_round_trips(n in 2usize..20, seed in any::<u64>()) {
        let geo = common::geometric(n, seed, 40.0, true);
        let cfg = WeightConfig::default();
        let fx = Fixture::capture(&geo.graph, &geo.tables, &Overrides::default(), &cfg);
        let text = serde_json::to_string(&fx).unwrap();
        let back = Fixture::<f64>::from_json(&text).unwrap().ingest().unwrap();
        prop_assert_eq!(&back.tables.hop, &geo.tables.hop);
        prop_assert_eq!(&back.tables.euclid, &geo.tables.euclid);
        let a = compute_metrics(&geo.graph, &geo.tables, &cfg, &Overrides::default()).unwrap();
        let b = compute_metrics(&back.graph, &back.tables, &back.config, &back.overrides).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn pair_edges_need_not_dominate_slave_edges() {
    // K4: one cluster (0, 1) with slaves 2 and 3; edge (2, 3) touches no head.
    let g = Graph64::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    let geo_metrics = common::metrics_of(&common::ingested());
    let mut metrics: Vec<_> = geo_metrics.into_iter().take(4).collect();
    for (u, m) in metrics.iter_mut().enumerate() {
        m.weight = 10.0 - u as f64;
    }
    let hop = hop_distance_table(&g);
    let r = cluster(&g, &hop, &metrics).unwrap();
    assert_eq!(r.class, dsec::PerfectionClass::Perfect);
    let report = verify_state(&r.adjusted, &g, &hop, Some(r.class)).unwrap();
    let entry = report.entry(Property::EfficientEdgeDomination).unwrap();
    assert!(!entry.passed);
    assert!(entry.witnesses.contains(&dsec::verify::Witness::Edge { u: 2, v: 3 }));
}
