//! Cluster formation, critical-node adjustment and clustering categories.
//!
//! Every cluster embeds a double star: a master `m`, an optional proxy `p`
//! adjacent to it, and slaves adjacent to `m` or `p`. Formation elects
//! (m, p) pairs greedily by weight under a 3-hop separation rule; the
//! adjustment pass regroups the critical nodes formation leaves behind.

mod adjust;
mod formation;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::NetworkGraph;
use crate::metrics::NodeMetrics;
use crate::scalar::Scalar;

pub use adjust::run_adjusted;
pub use formation::{elect_proxy, master_eligibility, run_m_dsec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    Master,
    Proxy,
    Slave,
    #[serde(rename = "hm1")]
    HiddenMasterI,
    #[serde(rename = "hm2")]
    HiddenMasterII,
    Unclustered,
}

/// How a cluster came to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterOrigin {
    Formation,
    Adjusted,
    /// A leftover critical node, or a maintenance wanderer, heading itself.
    Singleton,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterRecord {
    pub id: usize,
    pub master: usize,
    pub proxy: Option<usize>,
    /// All members, master and proxy included.
    pub members: BTreeSet<usize>,
    pub origin: ClusterOrigin,
}

impl ClusterRecord {
    pub fn is_head(&self, u: usize) -> bool {
        self.master == u || self.proxy == Some(u)
    }

    pub fn slaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied().filter(move |&u| !self.is_head(u))
    }

    pub fn pair(&self) -> (usize, Option<usize>) {
        (self.master, self.proxy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Formation,
    Adjusted,
    Maintenance,
}

/// One step of formation or adjustment, in execution order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClusterEvent {
    /// A new (m, p) pair and the nodes it claimed.
    Elect { cluster: usize, master: usize, proxy: Option<usize>, members: Vec<usize>, hidden_masters: Vec<usize> },
    /// Highest remaining node failed the 3-hop separation test.
    Defer { node: usize },
    /// An adjusted cluster headed by a critical node.
    Adjust {
        cluster: usize,
        master: usize,
        proxy: usize,
        members: Vec<usize>,
        /// `[node, donor cluster id]` for every node moved out of a cluster.
        moved: Vec<[usize; 2]>,
    },
    /// A critical hidden master that stays a slave of its cluster.
    Retain { node: usize },
    /// A critical node adjacent to a master joins that master's cluster.
    Join { node: usize, cluster: usize },
    /// A leftover node becomes the master of a one-node cluster.
    Singleton { node: usize, cluster: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterState {
    pub node_count: usize,
    pub clusters: Vec<ClusterRecord>,
    /// Critical nodes after formation: unclustered nodes plus type I hidden masters.
    pub critical: BTreeSet<usize>,
    pub hm1: BTreeSet<usize>,
    pub hm2: BTreeSet<usize>,
    /// Nodes that failed the separation test when they were the best candidate.
    pub deferred: BTreeSet<usize>,
    pub phase: Phase,
    pub events: Vec<ClusterEvent>,
}

impl ClusterState {
    pub fn empty(node_count: usize) -> Self {
        Self {
            node_count,
            clusters: Vec::new(),
            critical: BTreeSet::new(),
            hm1: BTreeSet::new(),
            hm2: BTreeSet::new(),
            deferred: BTreeSet::new(),
            phase: Phase::Formation,
            events: Vec::new(),
        }
    }

    /// True once every node must belong to a cluster: after adjustment or
    /// maintenance, or after a formation that left no critical nodes.
    pub fn is_final(&self) -> bool {
        self.phase != Phase::Formation || self.critical.is_empty()
    }

    /// Index into `clusters` of the first cluster containing each node.
    pub fn membership(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.node_count];
        for (idx, c) in self.clusters.iter().enumerate() {
            for &u in &c.members {
                if u < self.node_count && out[u].is_none() {
                    out[u] = Some(idx);
                }
            }
        }
        out
    }

    pub fn cluster_of(&self, u: usize) -> Option<&ClusterRecord> {
        self.clusters.iter().find(|c| c.members.contains(&u))
    }

    pub fn cluster_by_id(&self, id: usize) -> Option<&ClusterRecord> {
        self.clusters.iter().find(|c| c.id == id)
    }

    pub fn masters(&self) -> impl Iterator<Item = usize> + '_ {
        self.clusters.iter().map(|c| c.master)
    }

    pub fn proxies(&self) -> impl Iterator<Item = usize> + '_ {
        self.clusters.iter().filter_map(|c| c.proxy)
    }

    pub fn is_master(&self, u: usize) -> bool {
        self.clusters.iter().any(|c| c.master == u)
    }

    pub fn is_proxy(&self, u: usize) -> bool {
        self.clusters.iter().any(|c| c.proxy == Some(u))
    }

    pub fn next_cluster_id(&self) -> usize {
        self.clusters.iter().map(|c| c.id).max().map_or(1, |m| m + 1)
    }

    /// Hidden-master statuses are only reported during formation; afterwards
    /// every node is a master, proxy or slave.
    pub fn status(&self, u: usize) -> NodeStatus {
        if self.is_master(u) {
            return NodeStatus::Master;
        }
        if self.is_proxy(u) {
            return NodeStatus::Proxy;
        }
        let clustered = self.cluster_of(u).is_some();
        if self.phase == Phase::Formation {
            if self.hm1.contains(&u) {
                return NodeStatus::HiddenMasterI;
            }
            if !clustered && self.hm2.contains(&u) {
                return NodeStatus::HiddenMasterII;
            }
        }
        if clustered {
            NodeStatus::Slave
        } else {
            NodeStatus::Unclustered
        }
    }

    pub fn statuses(&self) -> Vec<NodeStatus> {
        (0..self.node_count).map(|u| self.status(u)).collect()
    }

    /// The (m, p) pairs that have a proxy, as undirected edges.
    pub fn pair_edges(&self) -> Vec<(usize, usize)> {
        self.clusters.iter().filter_map(|c| c.proxy.map(|p| (c.master.min(p), c.master.max(p)))).collect()
    }
}

/// Neighbour subsets used by election and adjustment.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NeighborPartitions {
    /// Neighbours with strictly greater weight, masters excluded.
    pub n_prime: BTreeSet<usize>,
    /// Non-master, non-proxy neighbours with strictly lower weight.
    pub n_dprime: BTreeSet<usize>,
    /// Neighbours adjacent to some master.
    pub n_m: BTreeSet<usize>,
}

pub fn neighbor_partitions<S: Scalar>(
    u: usize,
    graph: &NetworkGraph<S>,
    state: &ClusterState,
    metrics: &[NodeMetrics<S>],
) -> NeighborPartitions {
    let masters: BTreeSet<usize> = state.masters().collect();
    let proxies: BTreeSet<usize> = state.proxies().collect();
    let w = metrics[u].weight;
    let mut out = NeighborPartitions::default();
    for &v in graph.neighbors(u) {
        let is_master = masters.contains(&v);
        if metrics[v].weight > w && !is_master {
            out.n_prime.insert(v);
        }
        if metrics[v].weight < w && !is_master && !proxies.contains(&v) {
            out.n_dprime.insert(v);
        }
        if graph.neighbors(v).iter().any(|x| masters.contains(x)) {
            out.n_m.insert(v);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerfectionClass {
    /// Formation left no critical nodes.
    Perfect,
    /// Critical nodes existed and adjustment gave every one a place.
    FairlyPerfect,
    /// Some critical node could not be placed. Not produced by this engine,
    /// whose adjustment always ends with a covering clustering.
    Imperfect,
}

pub fn classify(formed: &ClusterState, adjusted: &ClusterState) -> PerfectionClass {
    if formed.critical.is_empty() {
        return PerfectionClass::Perfect;
    }
    let membership = adjusted.membership();
    let all_placed = formed.critical.iter().all(|&u| {
        let count = adjusted.clusters.iter().filter(|c| c.members.contains(&u)).count();
        count == 1 && membership[u].is_some()
    });
    if all_placed {
        PerfectionClass::FairlyPerfect
    } else {
        PerfectionClass::Imperfect
    }
}

/// Formation followed by adjustment.
#[derive(Debug, Clone)]
pub struct Clustering {
    pub formed: ClusterState,
    pub adjusted: ClusterState,
    pub class: PerfectionClass,
}

impl Clustering {
    pub fn final_state(&self) -> &ClusterState {
        &self.adjusted
    }
}

/// Runs both phases on a connected graph with known weights.
pub fn cluster<S: Scalar>(
    graph: &NetworkGraph<S>,
    hop: &crate::graph::HopMatrix,
    metrics: &[NodeMetrics<S>],
) -> crate::Result<Clustering> {
    let formed = run_m_dsec(graph, hop, metrics)?;
    let adjusted = run_adjusted(&formed, graph, metrics);
    let class = classify(&formed, &adjusted);
    Ok(Clustering { formed, adjusted, class })
}
