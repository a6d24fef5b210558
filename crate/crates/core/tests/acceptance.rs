//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use dsec::metrics::{closeness_indices, closer_hop_cardinalities, path_statistics};
use dsec::sim::{run_simulation, Scenario, SimulationOptions};
use dsec::verify::{
    check_efficient_edge_domination, check_partition, line_graph_domination_number, verify_state, Property,
    EXHAUSTIVE_EDGE_LIMIT,
};
use dsec::{
    cluster, compute_metrics, hop_distance_table, run_m_dsec, ClusterState, Graph64, Overrides, PerfectionClass,
    WeightConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

type Criterion = fn() -> Outcome;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn set(xs: &[usize]) -> BTreeSet<usize> {
    xs.iter().copied().collect()
}

fn has_cluster(state: &ClusterState, master: usize, proxy: Option<usize>, members: &[usize]) -> bool {
    state.clusters.iter().any(|c| c.master == master && c.proxy == proxy && c.members == set(members))
}

fn worked_example_weights() -> Outcome {
    let start = Instant::now();
    let mut fx = common::fixture();
    fx.weight_override = None;
    let ing = fx.ingest().unwrap();
    let metrics = compute_metrics(&ing.graph, &ing.tables, &ing.config, &ing.overrides).unwrap();
    let printed = common::column(&common::tables_json(), "w");
    let (worst, at) = metrics
        .iter()
        .zip(&printed)
        .enumerate()
        .map(|(u, (m, &w))| ((m.weight - w).abs(), u))
        .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
    let elapsed = start.elapsed();
    outcome(
        worst <= 0.02 && within(elapsed, Duration::from_secs(1)),
        format!(
            "max |W - table| = {worst:.4} at node {at}; W(3)={:.2} W(13)={:.2} W(20)={:.2}; {elapsed:?}",
            metrics[3].weight, metrics[13].weight, metrics[20].weight
        ),
    )
}

fn worked_example_formation() -> Outcome {
    let start = Instant::now();
    let ing = common::ingested();
    let metrics = common::metrics_of(&ing);
    let s = run_m_dsec(&ing.graph, &ing.tables.hop, &metrics).unwrap();
    let elapsed = start.elapsed();
    let ok = s.clusters.len() == 3
        && has_cluster(&s, 3, Some(1), &[3, 1, 0, 2, 4, 5, 22])
        && has_cluster(&s, 18, Some(16), &[18, 16, 13, 14, 15, 17, 19, 21])
        && has_cluster(&s, 9, Some(10), &[9, 10, 8, 11, 12])
        && s.hm1 == set(&[11, 13, 14])
        && s.critical == set(&[6, 7, 11, 13, 14, 20]);
    let clusters: Vec<String> =
        s.clusters.iter().map(|c| format!("({},{:?}){:?}", c.master, c.proxy, c.members)).collect();
    outcome(
        ok && within(elapsed, Duration::from_secs(1)),
        format!("{}; HM-I {:?}; critical {:?}; {elapsed:?}", clusters.join(" "), s.hm1, s.critical),
    )
}

fn worked_example_adjustment() -> Outcome {
    let ing = common::ingested();
    let metrics = common::metrics_of(&ing);
    let r = cluster(&ing.graph, &ing.tables.hop, &metrics).unwrap();
    let s = r.final_state();
    let shape = has_cluster(s, 13, Some(11), &[13, 11, 12, 14, 15])
        && has_cluster(s, 18, Some(16), &[18, 16, 17, 19, 21])
        && has_cluster(s, 9, Some(10), &[9, 10, 8])
        && has_cluster(s, 6, Some(7), &[6, 7])
        && has_cluster(s, 20, None, &[20])
        && s.clusters.len() == 6;
    let partition = check_partition(s);
    let covered = s.node_count == 23 && s.clusters.iter().map(|c| c.members.len()).sum::<usize>() == 23;
    outcome(
        shape && partition.passed && covered,
        format!("{} clusters, class {:?}, partition {}", s.clusters.len(), r.class, partition.passed),
    )
}

fn hop_table_reproduction() -> Outcome {
    let ing = common::ingested();
    let tables = common::tables_json();
    let printed: Vec<Vec<u64>> = tables["hop"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect())
        .collect();
    let n = ing.graph.node_count();
    let mut mismatches = Vec::new();
    for (u, row) in printed.iter().enumerate() {
        for (v, &want) in row.iter().enumerate().skip(u + 1) {
            let bfs = u64::from(ing.tables.hop.get(u, v).unwrap());
            if bfs != want {
                mismatches.push(format!("d({u},{v}) bfs {bfs} table {want}"));
            }
        }
    }
    let ecc = common::column(&tables, "ecc");
    let inv_mhd = common::column(&tables, "inv_mhd");
    let mut ecc_err = 0.0f64;
    let mut mhd_err = 0.0f64;
    for u in 0..n {
        let st = path_statistics(u, &ing.tables, ing.config.mean_divisor).unwrap();
        ecc_err = ecc_err.max((f64::from(st.ecc) - ecc[u]).abs());
        mhd_err = mhd_err.max((1.0 / st.mhd - inv_mhd[u]).abs());
    }
    let pairs = n * (n - 1) / 2;
    outcome(
        mismatches.is_empty() && ecc_err <= 0.01 && mhd_err <= 0.01,
        format!(
            "{}/{pairs} pairs match [{}]; max ecc err {ecc_err:.3}, max 1/MHD err {mhd_err:.4}",
            pairs - mismatches.len(),
            mismatches.join("; ")
        ),
    )
}

fn closeness_antisymmetry() -> Outcome {
    let ing = common::ingested();
    let (g_h, _) = closeness_indices(&ing.tables).unwrap();
    let fixture_sum: i64 = g_h.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=30);
        let geo = common::geometric(n, rng.gen(), rng.gen_range(15.0..60.0), false);
        let (h, e) = closeness_indices(&geo.tables).unwrap();
        if h.iter().sum::<i64>() != 0 || e.iter().sum::<i64>() != 0 {
            bad += 1;
        }
    }
    outcome(
        fixture_sum == 0 && bad == 0,
        format!("fixture Σg_h = {fixture_sum}; {bad}/200 random graphs with nonzero sums"),
    )
}

fn random_small_graph(rng: &mut ChaCha8Rng) -> Graph64 {
    let n = rng.gen_range(1..=7);
    let p = rng.gen_range(0.2..0.9);
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(p)).collect();
    Graph64::from_edges(n, &edges).unwrap()
}

fn brute_force_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut g_bad, mut d_bad) = (0, 0);
    for _ in 0..100 {
        let g = random_small_graph(&mut rng);
        let n = g.node_count();
        let hop = hop_distance_table(&g);
        for u in 0..n {
            let mut via_pairs = 0i64;
            let mut oracle = 0i64;
            for v in (0..n).filter(|&v| v != u) {
                let (a, b) = closer_hop_cardinalities(u, v, &hop).unwrap();
                via_pairs += a as i64 - b as i64;
                for w in 0..n {
                    let (du, dv) = (hop.or_infinite(w, u), hop.or_infinite(w, v));
                    oracle += i64::from(du < dv) - i64::from(dv < du);
                }
            }
            if via_pairs != oracle {
                g_bad += 1;
            }
        }
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let chosen: Vec<(usize, usize)> = edges.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
        let naive = edges
            .iter()
            .all(|&(a, b)| chosen.iter().filter(|&&(c, d)| c == a || c == b || d == a || d == b).count() == 1);
        if check_efficient_edge_domination(&chosen, &g).unwrap() != naive {
            d_bad += 1;
        }
    }
    outcome(g_bad == 0 && d_bad == 0, format!("g_h disagreements {g_bad}, edge-domination disagreements {d_bad}"))
}

fn structural_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut structural_failures = Vec::new();
    let (mut perfect, mut small_perfect, mut p4_failures) = (0, 0, Vec::new());
    for trial in 0..200 {
        let n = rng.gen_range(5..=40);
        let geo = common::geometric(n, rng.gen(), 25.0, true);
        let metrics =
            compute_metrics(&geo.graph, &geo.tables, &WeightConfig::default(), &Overrides::default()).unwrap();
        let r = cluster(&geo.graph, &geo.tables.hop, &metrics).unwrap();
        for state in [&r.formed, &r.adjusted] {
            let report = verify_state(state, &geo.graph, &geo.tables.hop, None).unwrap();
            if !report.passed() {
                structural_failures.push(trial);
            }
        }
        if r.class == PerfectionClass::Perfect {
            perfect += 1;
            let report = verify_state(&r.adjusted, &geo.graph, &geo.tables.hop, Some(r.class)).unwrap();
            let entry = report.entry(Property::EfficientEdgeDomination).unwrap();
            if geo.graph.edge_count() <= EXHAUSTIVE_EDGE_LIMIT {
                small_perfect += 1;
                let gamma = line_graph_domination_number(&geo.graph).unwrap();
                if gamma != r.adjusted.pair_edges().len() && entry.passed {
                    p4_failures.push(format!("trial {trial}: size mismatch"));
                }
            }
            if !entry.passed {
                p4_failures.push(format!(
                    "trial {trial} (n={n}, {} edges): {:?}",
                    geo.graph.edge_count(),
                    entry.witnesses.first()
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        structural_failures.is_empty() && p4_failures.is_empty() && within(elapsed, Duration::from_secs(60)),
        format!(
            "structural failures {}; perfect instances {perfect} ({small_perfect} with ≤ {EXHAUSTIVE_EDGE_LIMIT} edges); \
             edge-domination failures {} {}; {elapsed:?}",
            structural_failures.len(),
            p4_failures.len(),
            p4_failures.iter().take(3).cloned().collect::<Vec<_>>().join(", ")
        ),
    )
}

fn scenario(v_max: f64) -> Scenario<f64> {
    Scenario {
        node_count: 30,
        terrain_size: 100.0,
        range: 35.0,
        v_max,
        broadcast_interval: 1.0,
        dt: 0.5,
        steps: 100,
        ns_threshold: 100.0,
        alphas: [1.0 / 6.0; 6],
        seed: 7,
        mean_divisor: None,
    }
}

fn maintenance() -> Outcome {
    let a = run_simulation(&scenario(6.0), SimulationOptions::default()).unwrap();
    let b = run_simulation(&scenario(6.0), SimulationOptions::default()).unwrap();
    let replay = a.events == b.events && a.summaries == b.summaries;
    let refreshes = a.summaries.iter().filter(|s| s.refreshed).count();
    let unsafe_steps = a.summaries.iter().filter(|s| !s.partition_ok || !s.dominance_ok).count();
    let warnings: usize = a.summaries.iter().map(|s| s.adjacent_masters.len()).sum();
    let still = run_simulation(&scenario(0.0), SimulationOptions::default()).unwrap();
    outcome(
        replay && unsafe_steps == 0 && still.events.is_empty(),
        format!(
            "replay identical {replay}; {} events over {refreshes} refreshes; unsafe refreshes {unsafe_steps}; \
             adjacent-master warnings {warnings}; static run events {}",
            a.events.len(),
            still.events.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("worked-example weights", worked_example_weights),
        ("worked-example formation", worked_example_formation),
        ("worked-example adjustment", worked_example_adjustment),
        ("hop table reproduction", hop_table_reproduction),
        ("closeness antisymmetry", closeness_antisymmetry),
        ("brute-force oracle equivalence", brute_force_oracles),
        ("structural property suite", structural_suite),
        ("maintenance determinism and safety", maintenance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        println!("criterion {} {verdict}: {name}: {}", i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
