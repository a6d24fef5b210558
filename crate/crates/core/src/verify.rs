//! Structural checks over a clustering: cluster diameter, the embedded double
//! star, the partition, slave dominance, master independence and efficient
//! edge domination by the (master, proxy) edges.
//!
//! Every failing entry carries at least one witness.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cluster::{ClusterState, PerfectionClass};
use crate::error::{Error, Result};
use crate::graph::{HopMatrix, NetworkGraph};
use crate::scalar::Scalar;

/// Largest edge count [`line_graph_domination_number`] will search.
pub const EXHAUSTIVE_EDGE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    ClusterDiameter,
    DoubleStar,
    Partition,
    SlaveDominance,
    MasterIndependence,
    EfficientEdgeDomination,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Cluster {
        id: usize,
    },
    Node {
        node: usize,
    },
    Pair {
        a: usize,
        b: usize,
    },
    Edge {
        u: usize,
        v: usize,
    },
    /// Cardinality disagreement.
    Count {
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyEntry {
    pub property: Property,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl PropertyEntry {
    fn new(property: Property) -> Self {
        Self { property, passed: true, witnesses: Vec::new(), notes: Vec::new() }
    }

    fn fail(&mut self, witnesses: impl IntoIterator<Item = Witness>) {
        self.passed = false;
        self.witnesses.extend(witnesses);
        debug_assert!(!self.witnesses.is_empty());
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub entries: Vec<PropertyEntry>,
    /// Radius r(G) in hops; absent when G is empty or disconnected.
    pub radius: Option<u32>,
    /// Diameter d(G) in hops.
    pub diameter: Option<u32>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn entry(&self, property: Property) -> Option<&PropertyEntry> {
        self.entries.iter().find(|e| e.property == property)
    }
}

/// Radius and diameter of G from its hop table.
pub fn radius_and_diameter(hop: &HopMatrix) -> (Option<u32>, Option<u32>) {
    let n = hop.size();
    let mut ecc = Vec::with_capacity(n);
    for u in 0..n {
        let mut e = 0;
        for v in 0..n {
            match hop.get(u, v) {
                Some(d) => e = e.max(d),
                None => return (None, None),
            }
        }
        ecc.push(e);
    }
    (ecc.iter().copied().min(), ecc.iter().copied().max())
}

/// Hop distances from `src` inside the subgraph induced by `members`.
fn induced_bfs<S: Scalar>(src: usize, members: &BTreeSet<usize>, graph: &NetworkGraph<S>) -> Vec<(usize, Option<u32>)> {
    let mut dist = std::collections::BTreeMap::from([(src, 0u32)]);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for &v in graph.neighbors(u) {
            if members.contains(&v) && !dist.contains_key(&v) {
                dist.insert(v, d + 1);
                queue.push_back(v);
            }
        }
    }
    members.iter().map(|&v| (v, dist.get(&v).copied())).collect()
}

fn out_of_range(state: &ClusterState, graph_nodes: usize) -> Vec<Witness> {
    let mut bad = BTreeSet::new();
    for c in &state.clusters {
        for &u in c.members.iter().chain([&c.master]).chain(c.proxy.as_ref()) {
            if u >= graph_nodes {
                bad.insert(u);
            }
        }
    }
    bad.into_iter().map(|node| Witness::Node { node }).collect()
}

/// Diameter of each cluster's member-induced subgraph is at most 3.
pub fn check_cluster_diameter<S: Scalar>(state: &ClusterState, graph: &NetworkGraph<S>) -> PropertyEntry {
    let mut entry = PropertyEntry::new(Property::ClusterDiameter);
    let stray = out_of_range(state, graph.node_count());
    if !stray.is_empty() {
        entry.fail(stray);
        return entry;
    }
    for c in &state.clusters {
        let mut worst: Option<(usize, usize, Option<u32>)> = None;
        for &a in &c.members {
            for (b, d) in induced_bfs(a, &c.members, graph) {
                if b <= a {
                    continue;
                }
                let longer = match (worst, d) {
                    (None, _) => true,
                    (Some((_, _, None)), _) => false,
                    (Some(_), None) => true,
                    (Some((_, _, Some(w))), Some(d)) => d > w,
                };
                if longer {
                    worst = Some((a, b, d));
                }
            }
        }
        if let Some((a, b, d)) = worst {
            if d.is_none_or(|d| d > 3) {
                entry.fail([Witness::Cluster { id: c.id }, Witness::Pair { a, b }]);
            }
        }
    }
    entry
}

/// The proxy is adjacent to the master and every slave is adjacent to one
/// of them, so edge (m, p) dominates the spanning double star.
pub fn check_double_star<S: Scalar>(state: &ClusterState, graph: &NetworkGraph<S>) -> PropertyEntry {
    let mut entry = PropertyEntry::new(Property::DoubleStar);
    let stray = out_of_range(state, graph.node_count());
    if !stray.is_empty() {
        entry.fail(stray);
        return entry;
    }
    for c in &state.clusters {
        let Some(p) = c.proxy else {
            entry.note(format!("cluster {} has no proxy: star, not double star", c.id));
            continue;
        };
        let m = c.master;
        if !graph.is_adjacent(m, p) {
            entry.fail([Witness::Cluster { id: c.id }, Witness::Edge { u: m, v: p }]);
        }
        let loose: Vec<Witness> = c
            .slaves()
            .filter(|&s| !graph.is_adjacent(s, m) && !graph.is_adjacent(s, p))
            .map(|node| Witness::Node { node })
            .collect();
        if !loose.is_empty() {
            entry.fail(std::iter::once(Witness::Cluster { id: c.id }).chain(loose));
        }
    }
    entry
}

/// No node lies in two clusters, heads belong to their own cluster, and once
/// the state is final every node of `0..node_count` is covered.
pub fn check_partition(state: &ClusterState) -> PropertyEntry {
    let mut entry = PropertyEntry::new(Property::Partition);
    let n = state.node_count;
    let mut count = vec![0usize; n];
    let mut stray = BTreeSet::new();
    for c in &state.clusters {
        for &u in &c.members {
            match count.get_mut(u) {
                Some(k) => *k += 1,
                None => {
                    stray.insert(u);
                }
            }
        }
        for head in std::iter::once(c.master).chain(c.proxy) {
            if !c.members.contains(&head) {
                entry.fail([Witness::Cluster { id: c.id }, Witness::Node { node: head }]);
            }
        }
    }
    if !stray.is_empty() {
        entry.fail(stray.into_iter().map(|node| Witness::Node { node }));
    }
    let dup: Vec<Witness> = (0..n).filter(|&u| count[u] > 1).map(|node| Witness::Node { node }).collect();
    if !dup.is_empty() {
        entry.fail(dup);
    }
    if state.is_final() {
        let missing: Vec<Witness> = (0..n).filter(|&u| count[u] == 0).map(|node| Witness::Node { node }).collect();
        if !missing.is_empty() {
            entry.fail(missing);
        }
    } else {
        entry.note("formation state with critical nodes: coverage not required");
    }
    entry
}

/// Every slave is at most 2 hops from its own master or proxy.
pub fn check_slave_dominance(state: &ClusterState, hop: &HopMatrix) -> PropertyEntry {
    let mut entry = PropertyEntry::new(Property::SlaveDominance);
    let n = hop.size();
    for c in &state.clusters {
        for s in c.slaves() {
            let near = |h: usize| s < n && h < n && hop.or_infinite(s, h) <= 2;
            if !near(c.master) && !c.proxy.is_some_and(near) {
                entry.fail([Witness::Cluster { id: c.id }, Witness::Node { node: s }]);
            }
        }
    }
    entry
}

/// No two masters are adjacent.
pub fn check_master_independence<S: Scalar>(state: &ClusterState, graph: &NetworkGraph<S>) -> PropertyEntry {
    let mut entry = PropertyEntry::new(Property::MasterIndependence);
    let masters: Vec<usize> = state.masters().filter(|&m| m < graph.node_count()).collect();
    for (i, &a) in masters.iter().enumerate() {
        for &b in &masters[i + 1..] {
            if graph.is_adjacent(a, b) {
                entry.fail([Witness::Pair { a: a.min(b), b: a.max(b) }]);
            }
        }
    }
    entry
}

pub fn check_dominance_and_independence<S: Scalar>(
    state: &ClusterState,
    graph: &NetworkGraph<S>,
    hop: &HopMatrix,
) -> [PropertyEntry; 2] {
    [check_slave_dominance(state, hop), check_master_independence(state, graph)]
}

fn normalized_edge_set<S: Scalar>(
    edge_set: &[(usize, usize)],
    graph: &NetworkGraph<S>,
) -> Result<BTreeSet<(usize, usize)>> {
    edge_set
        .iter()
        .map(|&(u, v)| {
            if u < graph.node_count() && v < graph.node_count() && graph.is_adjacent(u, v) {
                Ok((u.min(v), u.max(v)))
            } else {
                Err(Error::InvalidArgument(format!("({u}, {v}) is not an edge of the graph")))
            }
        })
        .collect()
}

/// For every edge of G, how many edges of `edge_set` share an endpoint with it.
pub fn edge_domination_counts<S: Scalar>(
    edge_set: &[(usize, usize)],
    graph: &NetworkGraph<S>,
) -> Result<Vec<((usize, usize), usize)>> {
    let chosen = normalized_edge_set(edge_set, graph)?;
    Ok(graph
        .edges()
        .map(|(a, b)| {
            let k = chosen.iter().filter(|&&(c, d)| c == a || c == b || d == a || d == b).count();
            ((a, b), k)
        })
        .collect())
}

/// True iff every edge of G is dominated by exactly one edge of `edge_set`.
/// An edge dominates itself.
pub fn check_efficient_edge_domination<S: Scalar>(
    edge_set: &[(usize, usize)],
    graph: &NetworkGraph<S>,
) -> Result<bool> {
    Ok(edge_domination_counts(edge_set, graph)?.iter().all(|&(_, k)| k == 1))
}

/// Smallest number of edges dominating every edge of G, by exhaustive search
/// over subsets in increasing size.
pub fn line_graph_domination_number<S: Scalar>(graph: &NetworkGraph<S>) -> Result<usize> {
    let edges: Vec<(usize, usize)> = graph.edges().collect();
    let m = edges.len();
    if m > EXHAUSTIVE_EDGE_LIMIT {
        return Err(Error::SizeLimit { edges: m, limit: EXHAUSTIVE_EDGE_LIMIT });
    }
    if m == 0 {
        return Ok(0);
    }
    let covers: Vec<u32> = edges
        .iter()
        .map(|&(a, b)| {
            edges
                .iter()
                .enumerate()
                .filter(|&(_, &(c, d))| c == a || c == b || d == a || d == b)
                .fold(0u32, |acc, (j, _)| acc | (1 << j))
        })
        .collect();
    let full: u32 = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    for k in 1..=m {
        // Gosper's hack: every m-bit mask with k bits set, in increasing order.
        let mut set: u32 = (1u32 << k) - 1;
        while set <= full {
            let mut covered = 0u32;
            let mut bits = set;
            while bits != 0 {
                covered |= covers[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            if covered == full {
                return Ok(k);
            }
            let c = set & set.wrapping_neg();
            let r = set + c;
            set = (((r ^ set) >> 2) / c) | r;
        }
    }
    Ok(m)
}

/// The (m, p) edges form an efficient edge dominating set whose size equals
/// the line-graph domination number (compared only up to the search limit).
pub fn check_pair_edge_domination<S: Scalar>(state: &ClusterState, graph: &NetworkGraph<S>) -> Result<PropertyEntry> {
    let mut entry = PropertyEntry::new(Property::EfficientEdgeDomination);
    let pairs = state.pair_edges();
    let bad: Vec<Witness> = edge_domination_counts(&pairs, graph)?
        .into_iter()
        .filter(|&(_, k)| k != 1)
        .map(|((u, v), _)| Witness::Edge { u, v })
        .collect();
    if !bad.is_empty() {
        entry.fail(bad);
    }
    if graph.edge_count() <= EXHAUSTIVE_EDGE_LIMIT {
        let gamma = line_graph_domination_number(graph)?;
        if gamma != pairs.len() {
            entry.fail([Witness::Count { expected: gamma, found: pairs.len() }]);
        }
    } else {
        entry.note(format!("{} edges: cardinality comparison skipped", graph.edge_count()));
    }
    Ok(entry)
}

/// Runs every check. Edge domination is only checked for Perfect clusterings.
pub fn verify_state<S: Scalar>(
    state: &ClusterState,
    graph: &NetworkGraph<S>,
    hop: &HopMatrix,
    class: Option<PerfectionClass>,
) -> Result<PropertyReport> {
    let [dominance, independence] = check_dominance_and_independence(state, graph, hop);
    let mut entries = vec![
        check_cluster_diameter(state, graph),
        check_double_star(state, graph),
        check_partition(state),
        dominance,
        independence,
    ];
    if class == Some(PerfectionClass::Perfect) {
        entries.push(check_pair_edge_domination(state, graph)?);
    }
    let (radius, diameter) = radius_and_diameter(hop);
    Ok(PropertyReport { entries, radius, diameter })
}
