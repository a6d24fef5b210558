//! Report documents: JSON cluster reports, DOT graphs and metric dumps.
//!
//! Field order is fixed so emitted documents compare byte for byte.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cluster::{
    ClusterEvent, ClusterOrigin, ClusterRecord, ClusterState, Clustering, NodeStatus, PerfectionClass, Phase,
};
use crate::error::{Error, Result};
use crate::graph::NetworkGraph;
use crate::metrics::NodeMetrics;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub id: usize,
    pub master: usize,
    pub proxy: Option<usize>,
    pub members: Vec<usize>,
    pub origin: ClusterOrigin,
}

impl From<&ClusterRecord> for ClusterEntry {
    fn from(c: &ClusterRecord) -> Self {
        Self {
            id: c.id,
            master: c.master,
            proxy: c.proxy,
            members: c.members.iter().copied().collect(),
            origin: c.origin,
        }
    }
}

impl From<&ClusterEntry> for ClusterRecord {
    fn from(c: &ClusterEntry) -> Self {
        Self {
            id: c.id,
            master: c.master,
            proxy: c.proxy,
            members: c.members.iter().copied().collect(),
            origin: c.origin,
        }
    }
}

/// Final clustering of a run. `E` is the event type of the run's log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport<E = ClusterEvent> {
    pub phase: Phase,
    pub clusters: Vec<ClusterEntry>,
    /// Clusters as they stood after formation, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formation: Option<Vec<ClusterEntry>>,
    pub statuses: Vec<NodeStatus>,
    pub critical: Vec<usize>,
    pub hm1: Vec<usize>,
    pub hm2: Vec<usize>,
    pub deferred: Vec<usize>,
    pub classification: Option<PerfectionClass>,
    pub events: Vec<E>,
}

fn entries(state: &ClusterState) -> Vec<ClusterEntry> {
    state.clusters.iter().map(ClusterEntry::from).collect()
}

impl<E> ClusterReport<E> {
    /// Report of `state` with an explicit event log.
    pub fn with_events(state: &ClusterState, class: Option<PerfectionClass>, events: Vec<E>) -> Self {
        Self {
            phase: state.phase,
            clusters: entries(state),
            formation: None,
            statuses: state.statuses(),
            critical: state.critical.iter().copied().collect(),
            hm1: state.hm1.iter().copied().collect(),
            hm2: state.hm2.iter().copied().collect(),
            deferred: state.deferred.iter().copied().collect(),
            classification: class,
            events,
        }
    }

    /// Rebuilds the clustering the report describes. Event logs are not
    /// carried over.
    pub fn to_state(&self) -> Result<ClusterState> {
        let n = self.statuses.len();
        let mut state = ClusterState::empty(n);
        state.phase = self.phase;
        state.clusters = self.clusters.iter().map(ClusterRecord::from).collect();
        state.critical = self.critical.iter().copied().collect();
        state.hm1 = self.hm1.iter().copied().collect();
        state.hm2 = self.hm2.iter().copied().collect();
        state.deferred = self.deferred.iter().copied().collect();
        let ids: BTreeSet<usize> = state.clusters.iter().map(|c| c.id).collect();
        if ids.len() != state.clusters.len() {
            return Err(Error::Fixture("report repeats a cluster id".into()));
        }
        Ok(state)
    }
}

impl ClusterReport<ClusterEvent> {
    /// Report of a formation + adjustment run.
    pub fn from_clustering(clustering: &Clustering) -> Self {
        // The adjusted log extends the formation log.
        let events = clustering.adjusted.events.clone();
        let mut report = Self::with_events(clustering.final_state(), Some(clustering.class), events);
        report.formation = Some(entries(&clustering.formed));
        report
    }
}

impl<E: Serialize> ClusterReport<E> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Graphviz rendering. Masters are double circles, proxies boxes and slaves
/// plain circles; every node also carries a `role` attribute. Each cluster is
/// a `cluster_<id>` subgraph and (master, proxy) edges are drawn bold.
pub fn to_dot<S: Scalar>(state: &ClusterState, graph: &NetworkGraph<S>) -> String {
    let mut out = String::from("graph dsec {\n  node [shape=circle];\n");
    for c in &state.clusters {
        let _ = writeln!(out, "  subgraph cluster_{} {{", c.id);
        let _ = writeln!(out, "    label=\"C{}\";", c.id);
        for &u in &c.members {
            let attrs = if u == c.master {
                "role=master, shape=doublecircle, style=filled, fillcolor=gray80"
            } else if c.proxy == Some(u) {
                "role=proxy, shape=box"
            } else {
                "role=slave"
            };
            let _ = writeln!(out, "    {u} [{attrs}];");
        }
        out.push_str("  }\n");
    }
    for u in graph.nodes() {
        if state.cluster_of(u).is_none() {
            let _ = writeln!(out, "  {u} [role=unclustered, style=dotted];");
        }
    }
    let pairs: BTreeSet<(usize, usize)> = state.pair_edges().into_iter().collect();
    for (u, v) in graph.edges() {
        if pairs.contains(&(u, v)) {
            let _ = writeln!(out, "  {u} -- {v} [penwidth=3];");
        } else {
            let _ = writeln!(out, "  {u} -- {v};");
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize)]
#[serde(bound = "S: Scalar")]
struct MetricsRow<'a, S> {
    node: usize,
    #[serde(flatten)]
    metrics: &'a NodeMetrics<S>,
}

/// Per-node parameters as a JSON array, one object per node.
pub fn metrics_to_json<S: Scalar>(metrics: &[NodeMetrics<S>]) -> Result<String> {
    let rows: Vec<MetricsRow<'_, S>> =
        metrics.iter().enumerate().map(|(node, metrics)| MetricsRow { node, metrics }).collect();
    Ok(serde_json::to_string_pretty(&rows)? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (ClusterState, NetworkGraph<f64>) {
        let g = NetworkGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut s = ClusterState::empty(4);
        s.phase = Phase::Adjusted;
        s.clusters.push(ClusterRecord {
            id: 1,
            master: 1,
            proxy: Some(2),
            members: BTreeSet::from([0, 1, 2, 3]),
            origin: ClusterOrigin::Formation,
        });
        (s, g)
    }

    #[test]
    fn report_round_trips() {
        let (s, _) = sample();
        let report = ClusterReport::<ClusterEvent>::with_events(&s, Some(PerfectionClass::Perfect), vec![]);
        let text = report.to_json().unwrap();
        assert!(text.contains("\"events\": []"));
        let back: ClusterReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_state().unwrap(), s);
    }

    #[test]
    fn dot_marks_roles() {
        let (s, g) = sample();
        let dot = to_dot(&s, &g);
        assert!(dot.starts_with("graph dsec {"));
        assert!(dot.contains("subgraph cluster_1 {"));
        assert!(dot.contains("1 [role=master"));
        assert!(dot.contains("2 [role=proxy"));
        assert!(dot.contains("1 -- 2 [penwidth=3];"));
        assert!(dot.contains("2 -- 3;"));
    }
}
