#![allow(dead_code)]

use dsec::{build_graph, deploy_random, DistanceTables, Fixture, Graph64, Ingested, Position64};

pub fn fixture() -> Fixture<f64> {
    Fixture::load(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/paper23.json")).unwrap()
}

/// The fixture with every override, weights included.
pub fn ingested() -> Ingested<f64> {
    fixture().ingest().unwrap()
}

pub fn tables_json() -> serde_json::Value {
    let text =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/reference_tables.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn column(v: &serde_json::Value, key: &str) -> Vec<f64> {
    v[key].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

pub struct Geometric {
    pub positions: Vec<Position64>,
    pub graph: Graph64,
    pub tables: DistanceTables<f64>,
    pub range: f64,
}

/// Random unit-disk graph on a 100×100 terrain. With `connected`, the range
/// grows from `range` until the graph is connected.
pub fn geometric(n: usize, seed: u64, range: f64, connected: bool) -> Geometric {
    let positions = deploy_random(n, 100.0, seed).unwrap();
    let mut range = range;
    loop {
        let graph = build_graph(&positions, range).unwrap();
        if !connected || graph.is_connected() {
            let tables = DistanceTables::from_positions(&graph, &positions);
            return Geometric { positions, graph, tables, range };
        }
        range *= 1.15;
    }
}

pub fn metrics_of(ing: &Ingested<f64>) -> Vec<dsec::Metrics64> {
    dsec::compute_metrics(&ing.graph, &ing.tables, &ing.config, &ing.overrides).unwrap()
}
