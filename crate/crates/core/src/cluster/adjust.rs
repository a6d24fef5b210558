//! Regrouping of critical nodes after formation.
//!
//! Critical nodes are taken in rank order. A type I hidden master `c` with an
//! adjacent lower-weight proxy `p` pairs with the best node `c'` of
//! `N(c) \ {p}`; any other critical node pairs with the best node of
//! `N''(c) \ N_m(c)`. The new cluster is `{c, c'}` plus the restricted
//! neighbourhoods of both, and its members leave whatever cluster held them.
//!
//! Restrictions that keep the result a valid clustering:
//! - masters and proxies are never moved;
//! - a node already placed in an adjusted cluster is never moved again;
//! - a non-critical slave adjacent to a master stays where it is;
//! - a critical node adjacent to an existing master does not head a cluster.
//!   A hidden master in that position stays a slave; an unclustered one joins
//!   the best adjacent master's cluster.
//!
//! Unclustered nodes no selection could absorb become one-node masters at the
//! end, unless an adjacent master exists by then.

use std::collections::BTreeSet;

use crate::graph::NetworkGraph;
use crate::metrics::{best, NodeMetrics};
use crate::scalar::Scalar;

use super::{neighbor_partitions, ClusterEvent, ClusterOrigin, ClusterRecord, ClusterState, Phase};

struct Adjuster<'a, S> {
    graph: &'a NetworkGraph<S>,
    metrics: &'a [NodeMetrics<S>],
    state: ClusterState,
    /// Nodes placed by this pass; never moved again.
    locked: BTreeSet<usize>,
}

impl<S: Scalar> Adjuster<'_, S> {
    fn adjacent_to_master(&self, u: usize) -> bool {
        self.graph.neighbors(u).iter().any(|&v| self.state.is_master(v))
    }

    fn is_head(&self, u: usize) -> bool {
        self.state.is_master(u) || self.state.is_proxy(u)
    }

    fn clustered(&self, u: usize) -> bool {
        self.state.cluster_of(u).is_some()
    }

    /// Whether `v` may be placed in a new adjusted cluster.
    fn movable(&self, v: usize) -> bool {
        if self.is_head(v) || self.locked.contains(&v) {
            return false;
        }
        if self.clustered(v) && !self.state.critical.contains(&v) {
            return !self.adjacent_to_master(v);
        }
        true
    }

    fn movable_of(&self, nodes: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        nodes.into_iter().filter(|&v| self.movable(v)).collect()
    }

    fn best_adjacent_master(&self, u: usize) -> Option<usize> {
        best(self.metrics, self.graph.neighbors(u).iter().copied().filter(|&v| self.state.is_master(v)))
    }

    /// Proxy whose hidden master `c` is: its own cluster's proxy when that
    /// one is adjacent and lighter, else the best such adjacent proxy.
    fn hidden_master_proxy(&self, c: usize) -> Option<usize> {
        let w = self.metrics[c].weight;
        let qualifies = |p: usize| self.graph.is_adjacent(c, p) && self.metrics[p].weight < w;
        if let Some(p) = self.state.cluster_of(c).and_then(|cl| cl.proxy) {
            if qualifies(p) {
                return Some(p);
            }
        }
        best(self.metrics, self.state.proxies().filter(|&p| qualifies(p)).collect::<Vec<_>>())
    }

    fn place(&mut self, master: usize, proxy: usize, members: BTreeSet<usize>) {
        let mut moved = Vec::new();
        for cl in &mut self.state.clusters {
            let taken: Vec<usize> = cl.members.intersection(&members).copied().collect();
            for u in taken {
                cl.members.remove(&u);
                moved.push([u, cl.id]);
            }
        }
        moved.sort_unstable();
        let id = self.state.next_cluster_id();
        self.locked.extend(&members);
        self.state.events.push(ClusterEvent::Adjust {
            cluster: id,
            master,
            proxy,
            members: members.iter().copied().collect(),
            moved,
        });
        self.state.clusters.push(ClusterRecord {
            id,
            master,
            proxy: Some(proxy),
            members,
            origin: ClusterOrigin::Adjusted,
        });
    }

    fn join(&mut self, u: usize, master: usize) {
        let idx = self.state.clusters.iter().position(|c| c.master == master).expect("master heads a cluster");
        let cl = &mut self.state.clusters[idx];
        cl.members.insert(u);
        self.locked.insert(u);
        self.state.events.push(ClusterEvent::Join { node: u, cluster: cl.id });
    }

    /// Returns the nodes the new cluster resolved, or `None` if `c` could not
    /// pair with anybody.
    fn hidden_master_case(&mut self, c: usize) -> Option<BTreeSet<usize>> {
        let p = self.hidden_master_proxy(c)?;
        let around_c = self.movable_of(self.graph.neighbors(c).iter().copied().filter(|&v| v != p));
        let partner = best(self.metrics, around_c.iter().copied())?;
        let partner_side: BTreeSet<usize> = if self.state.hm1.contains(&partner) || self.clustered(partner) {
            // Hidden master or slave partner: only its lighter, non-head neighbours.
            neighbor_partitions(partner, self.graph, &self.state, self.metrics).n_dprime
        } else {
            self.graph.neighbors(partner).iter().copied().collect()
        };
        let mut members = BTreeSet::from([c, partner]);
        members.extend(around_c);
        members.extend(self.movable_of(partner_side));
        self.place(c, partner, members.clone());
        Some(members)
    }

    fn unclustered_case(&mut self, c: usize) -> Option<BTreeSet<usize>> {
        let restricted = |adj: &Self, u: usize| {
            let parts = neighbor_partitions(u, adj.graph, &adj.state, adj.metrics);
            adj.movable_of(parts.n_dprime.difference(&parts.n_m).copied())
        };
        let around_c = restricted(self, c);
        let partner = best(self.metrics, around_c.iter().copied())?;
        let around_partner = restricted(self, partner);
        let mut members = BTreeSet::from([c, partner]);
        members.extend(around_c);
        members.extend(around_partner);
        self.place(c, partner, members.clone());
        Some(members)
    }
}

/// Adjustment phase. Returns `formed` unchanged when it has no critical nodes.
pub fn run_adjusted<S: Scalar>(
    formed: &ClusterState,
    graph: &NetworkGraph<S>,
    metrics: &[NodeMetrics<S>],
) -> ClusterState {
    if formed.critical.is_empty() {
        return formed.clone();
    }
    let mut adj = Adjuster { graph, metrics, state: formed.clone(), locked: BTreeSet::new() };
    adj.state.phase = Phase::Adjusted;

    let mut pending: BTreeSet<usize> = formed.critical.clone();
    let mut leftovers: Vec<usize> = Vec::new();
    while let Some(c) = best(metrics, pending.iter().copied()) {
        pending.remove(&c);
        if adj.locked.contains(&c) {
            continue;
        }
        let hidden = adj.clustered(c);
        let resolved = if adj.adjacent_to_master(c) {
            if hidden {
                adj.state.events.push(ClusterEvent::Retain { node: c });
            } else {
                let m = adj.best_adjacent_master(c).expect("adjacent master exists");
                adj.join(c, m);
            }
            None
        } else if hidden {
            let r = adj.hidden_master_case(c);
            if r.is_none() {
                adj.state.events.push(ClusterEvent::Retain { node: c });
            }
            r
        } else {
            let r = adj.unclustered_case(c);
            if r.is_none() {
                leftovers.push(c);
            }
            r
        };
        if let Some(members) = resolved {
            for u in &members {
                pending.remove(u);
            }
        }
    }

    // Leftovers in rank order; each either joins an adjacent master or heads itself.
    let mut leftovers: Vec<usize> = leftovers.into_iter().filter(|&u| !adj.clustered(u)).collect();
    leftovers.sort_by(|&a, &b| crate::metrics::rank(metrics, b, a));
    for u in leftovers {
        if let Some(m) = adj.best_adjacent_master(u) {
            adj.join(u, m);
        } else {
            let id = adj.state.next_cluster_id();
            adj.state.clusters.push(ClusterRecord {
                id,
                master: u,
                proxy: None,
                members: BTreeSet::from([u]),
                origin: ClusterOrigin::Singleton,
            });
            adj.locked.insert(u);
            adj.state.events.push(ClusterEvent::Singleton { node: u, cluster: id });
        }
    }

    adj.state
}
