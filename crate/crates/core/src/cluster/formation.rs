use std::collections::BTreeSet;

use crate::error::Result;
use crate::graph::{HopMatrix, NetworkGraph};
use crate::metrics::{best, NodeMetrics};
use crate::scalar::Scalar;

use super::{neighbor_partitions, ClusterEvent, ClusterOrigin, ClusterRecord, ClusterState, Phase};

/// A candidate may head a new cluster iff it is exactly 3 hops from the
/// master (or proxy) of some elected pair while at least 3 from that pair's
/// other head, and at least 3 hops from every head of every pair.
///
/// The second clause covers the chosen pair too, so the test reduces to
/// "exactly 3 from some head, at least 3 from all heads".
pub fn master_eligibility(candidate: usize, pairs: &[(usize, Option<usize>)], hop: &HopMatrix) -> bool {
    if pairs.is_empty() {
        return true;
    }
    let d = |x: usize| hop.or_infinite(candidate, x);
    let clear = pairs.iter().all(|&(m, p)| d(m) >= 3 && p.is_none_or(|p| d(p) >= 3));
    let touches = pairs.iter().any(|&(m, p)| d(m) == 3 || p.is_some_and(|p| d(p) == 3));
    clear && touches
}

/// Highest-ranked neighbour of `master` at least 3 hops from every head of
/// the previously elected pairs. `None` when no neighbour qualifies.
pub fn elect_proxy<S: Scalar>(
    master: usize,
    pairs: &[(usize, Option<usize>)],
    graph: &NetworkGraph<S>,
    hop: &HopMatrix,
    metrics: &[NodeMetrics<S>],
) -> Option<usize> {
    let clear = |v: usize| {
        pairs.iter().all(|&(m, p)| hop.or_infinite(v, m) >= 3 && p.is_none_or(|p| hop.or_infinite(v, p) >= 3))
    };
    best(metrics, graph.neighbors(master).iter().copied().filter(|&v| clear(v)))
}

/// Formation phase. Returns the clusters, the type I hidden masters, the
/// deferred set, and the critical set `(V \ S) ∪ HM-I`.
pub fn run_m_dsec<S: Scalar>(
    graph: &NetworkGraph<S>,
    hop: &HopMatrix,
    metrics: &[NodeMetrics<S>],
) -> Result<ClusterState> {
    graph.ensure_connected()?;
    let n = graph.node_count();
    let mut state = ClusterState::empty(n);
    state.phase = Phase::Formation;

    let mut clustered = vec![false; n];
    let mut pairs: Vec<(usize, Option<usize>)> = Vec::new();
    // (node, number of pairs elected when it was deferred, adjacent to a proxy then)
    let mut deferrals: Vec<(usize, usize, bool)> = Vec::new();

    let mut next = best(metrics, 0..n);
    while let Some(master) = next.take() {
        let proxy = elect_proxy(master, &pairs, graph, hop, metrics);
        pairs.push((master, proxy));

        let mut members = BTreeSet::from([master]);
        members.extend(proxy);
        members.extend(graph.neighbors(master));
        if let Some(p) = proxy {
            members.extend(graph.neighbors(p));
        }
        members.retain(|&u| !clustered[u]);
        for &u in &members {
            clustered[u] = true;
        }

        let id = state.next_cluster_id();
        state.clusters.push(ClusterRecord {
            id,
            master,
            proxy,
            members: members.clone(),
            origin: ClusterOrigin::Formation,
        });
        let hidden: BTreeSet<usize> = match proxy {
            Some(p) => neighbor_partitions(p, graph, &state, metrics).n_prime,
            None => BTreeSet::new(),
        };
        state.hm1.extend(&hidden);
        state.events.push(ClusterEvent::Elect {
            cluster: id,
            master,
            proxy,
            members: members.into_iter().collect(),
            hidden_masters: hidden.into_iter().collect(),
        });

        loop {
            let remaining = (0..n).filter(|&u| !clustered[u] && !state.deferred.contains(&u));
            let Some(z) = best(metrics, remaining) else { break };
            if master_eligibility(z, &pairs, hop) {
                next = Some(z);
                break;
            }
            let near_proxy = pairs.iter().any(|&(_, p)| p.is_some_and(|p| graph.is_adjacent(z, p)));
            deferrals.push((z, pairs.len(), near_proxy));
            state.deferred.insert(z);
            state.events.push(ClusterEvent::Defer { node: z });
        }
    }

    // Type II: passed over for a later, lower-ranked master while not adjacent to any proxy.
    state.hm2 = deferrals
        .into_iter()
        .filter(|&(_, elected, near_proxy)| elected < pairs.len() && !near_proxy)
        .map(|(z, _, _)| z)
        .collect();
    state.critical = (0..n).filter(|&u| !clustered[u]).collect();
    state.critical.extend(&state.hm1);
    Ok(state)
}
