//! Explicit network descriptions: adjacency plus Euclidean matrix, with
//! optional per-node values that replace recomputed metrics.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{hop_distance_table, DistanceTables, EuclidMatrix, NetworkGraph};
use crate::metrics::{MeanDivisor, Overrides, WeightConfig};
use crate::scalar::Scalar;

/// On-disk fixture document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "S: Scalar")]
pub struct Fixture<S = f64> {
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
    pub euclid: Vec<Vec<S>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ns_override: Option<Vec<S>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_override: Option<Vec<S>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_h_override: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_ed_override: Option<Vec<i64>>,
    /// Transmission range, when known; enables neighbour categories.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ns_threshold: Option<S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<[S; 6]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_divisor: Option<MeanDivisor>,
}

/// A fixture turned into the engine's inputs.
#[derive(Debug, Clone)]
pub struct Ingested<S = f64> {
    pub graph: NetworkGraph<S>,
    pub tables: DistanceTables<S>,
    pub overrides: Overrides<S>,
    pub config: WeightConfig<S>,
}

impl<S: Scalar> Fixture<S> {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Fixture(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Captures a graph and its tables as a fixture.
    pub fn capture(
        graph: &NetworkGraph<S>,
        tables: &DistanceTables<S>,
        overrides: &Overrides<S>,
        config: &WeightConfig<S>,
    ) -> Self {
        let n = graph.node_count();
        Self {
            nodes: n,
            edges: graph.edges().map(|(u, v)| [u, v]).collect(),
            euclid: (0..n).map(|u| tables.euclid.row(u).to_vec()).collect(),
            ns_override: overrides.ns.clone(),
            weight_override: overrides.weight.clone(),
            g_h_override: overrides.g_h.clone(),
            g_ed_override: overrides.g_ed.clone(),
            range: graph.range(),
            ns_threshold: Some(config.ns_threshold),
            alphas: Some(config.alphas),
            mean_divisor: Some(config.mean_divisor),
        }
    }

    pub fn overrides(&self) -> Overrides<S> {
        Overrides {
            ns: self.ns_override.clone(),
            weight: self.weight_override.clone(),
            g_h: self.g_h_override.clone(),
            g_ed: self.g_ed_override.clone(),
        }
    }

    pub fn config(&self) -> WeightConfig<S> {
        let mut config = WeightConfig::default();
        if let Some(a) = self.alphas {
            config.alphas = a;
        }
        if let Some(k) = self.ns_threshold {
            config.ns_threshold = k;
        }
        if let Some(d) = self.mean_divisor {
            config.mean_divisor = d;
        }
        config
    }

    pub fn ingest(&self) -> Result<Ingested<S>> {
        ingest_fixture(self)
    }
}

/// Uses the adjacency verbatim, validates the matrix, and recomputes hop
/// distances by breadth-first search.
pub fn ingest_fixture<S: Scalar>(fixture: &Fixture<S>) -> Result<Ingested<S>> {
    let n = fixture.nodes;
    if n == 0 {
        return Err(Error::Fixture("fixture declares zero nodes".into()));
    }
    if fixture.euclid.len() != n {
        return Err(Error::Fixture(format!("euclid has {} rows, expected {n}", fixture.euclid.len())));
    }
    let edges: Vec<(usize, usize)> = fixture.edges.iter().map(|&[u, v]| (u, v)).collect();
    let mut graph = NetworkGraph::from_edges(n, &edges)?;
    if let Some(r) = fixture.range {
        graph = graph.with_range(r)?;
    }
    let euclid = EuclidMatrix::from_rows(&fixture.euclid)?;
    let hop = hop_distance_table(&graph);
    let overrides = fixture.overrides();
    let config = fixture.config();
    overrides.check_len(n)?;
    Ok(Ingested { graph, tables: DistanceTables { hop, euclid }, overrides, config })
}
