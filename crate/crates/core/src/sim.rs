//! Mobility and cluster maintenance.
//!
//! Nodes move by independent random direction steps with reflection at the
//! terrain edges. Every broadcast interval the neighbourhood is rebuilt; a
//! slave that lost contact with both its master and its proxy leaves its
//! cluster and re-affiliates with an adjacent head (find_CH), or heads a new
//! one-node cluster when nobody acknowledges.
//!
//! When the master-proxy link itself breaks, the head with more adjacent
//! slaves keeps the cluster (the master on ties), becomes its master and
//! picks a new proxy among its own members. The other head re-affiliates.
//! A cluster whose heads both lost every slave dissolves.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::{cluster, ClusterOrigin, ClusterRecord, ClusterState, Clustering, Phase};
use crate::error::{Error, Result};
use crate::graph::{deploy_with, hop_distance_table, DistanceTables, NetworkGraph, Position};
use crate::metrics::{best, compute_metrics, MeanDivisor, NodeMetrics, Overrides, WeightConfig};
use crate::scalar::Scalar;
use crate::verify::{check_master_independence, check_partition, check_slave_dominance, Witness};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "S: Scalar")]
pub struct Scenario<S = f64> {
    pub node_count: usize,
    pub terrain_size: S,
    pub range: S,
    pub v_max: S,
    pub broadcast_interval: S,
    pub dt: S,
    pub steps: usize,
    pub ns_threshold: S,
    pub alphas: [S; 6],
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_divisor: Option<MeanDivisor>,
}

impl<S: Scalar> Scenario<S> {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::Config(format!("{field}: {why}")));
        if self.node_count == 0 {
            return bad("node_count", "must be positive");
        }
        let positive = [
            ("terrain_size", self.terrain_size),
            ("range", self.range),
            ("broadcast_interval", self.broadcast_interval),
            ("dt", self.dt),
        ];
        for (field, v) in positive {
            if !v.is_finite() || v <= S::zero() {
                return bad(field, "must be positive and finite");
            }
        }
        if !self.v_max.is_finite() || self.v_max < S::zero() {
            return bad("v_max", "must be non-negative and finite");
        }
        if !self.ns_threshold.is_finite() || self.alphas.iter().any(|a| !a.is_finite()) {
            return bad("ns_threshold/alphas", "must be finite");
        }
        Ok(())
    }

    pub fn config(&self) -> WeightConfig<S> {
        WeightConfig {
            alphas: self.alphas,
            ns_threshold: self.ns_threshold,
            mean_divisor: self.mean_divisor.unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    BoundaryExit,
    #[serde(rename = "FindCH")]
    FindCh,
    Ack,
    Join,
    BecomeMaster,
    /// A cluster whose master-proxy link broke was handed to the surviving
    /// head (`target` is the new pair), or dissolved (`target` absent).
    Handover,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaintenanceEvent {
    pub time: f64,
    pub kind: EventKind,
    pub node: usize,
    /// `(master, proxy)` of the cluster concerned.
    pub target: Option<(usize, Option<usize>)>,
}

impl MaintenanceEvent {
    fn new(time: f64, kind: EventKind, node: usize, target: Option<(usize, Option<usize>)>) -> Self {
        Self { time, kind, node, target }
    }
}

/// Orders a log by time, then node id, keeping the emission order otherwise.
pub fn order_events(events: &mut [MaintenanceEvent]) {
    events.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.node.cmp(&b.node)));
}

/// One JSON object per line.
pub fn events_to_ndjson(events: &[MaintenanceEvent]) -> Result<String> {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e)?);
        out.push('\n');
    }
    Ok(out)
}

fn reflect<S: Scalar>(x: S, side: S) -> S {
    let two = side + side;
    let y = x % two;
    let y = if y < S::zero() { y + two } else { y };
    if y > side {
        two - y
    } else {
        y
    }
}

/// Moves every node once: uniform heading in `[0, 2π)`, uniform speed in
/// `[0, v_max]`, displacement `speed·dt`, reflected back into the terrain.
pub fn step_positions<S: Scalar, R: Rng + ?Sized>(
    positions: &[Position<S>],
    v_max: S,
    dt: S,
    terrain_size: S,
    rng: &mut R,
) -> Vec<Position<S>> {
    positions
        .iter()
        .map(|p| {
            let heading = S::of(rng.gen::<f64>()) * S::TAU();
            let speed = S::of(rng.gen::<f64>()) * v_max;
            let step = speed * dt;
            Position::new(
                reflect(p.x + step * heading.cos(), terrain_size),
                reflect(p.y + step * heading.sin(), terrain_size),
            )
        })
        .collect()
}

/// BoundaryExit for every slave adjacent to neither its master nor its proxy.
pub fn boundary_exits<S: Scalar>(state: &ClusterState, graph: &NetworkGraph<S>, time: f64) -> Vec<MaintenanceEvent> {
    let mut out = Vec::new();
    for c in &state.clusters {
        for s in c.slaves() {
            let held = graph.is_adjacent(s, c.master) || c.proxy.is_some_and(|p| graph.is_adjacent(s, p));
            if !held {
                out.push(MaintenanceEvent::new(time, EventKind::BoundaryExit, s, Some(c.pair())));
            }
        }
    }
    order_events(&mut out);
    out
}

/// Rebuilds adjacency from positions and reports the slaves that left their
/// cluster's boundary.
pub fn hello_refresh<S: Scalar>(
    positions: &[Position<S>],
    range: S,
    state: &ClusterState,
    time: f64,
) -> Result<(NetworkGraph<S>, Vec<MaintenanceEvent>)> {
    let graph = NetworkGraph::from_positions(positions, range)?;
    let events = boundary_exits(state, &graph, time);
    Ok((graph, events))
}

/// Resolves clusters whose master and proxy are no longer adjacent. Returns
/// the log entries and the nodes that must re-affiliate.
pub fn repair_heads<S: Scalar>(
    state: &mut ClusterState,
    graph: &NetworkGraph<S>,
    metrics: &[NodeMetrics<S>],
    time: f64,
) -> (Vec<MaintenanceEvent>, BTreeSet<usize>) {
    let mut events = Vec::new();
    let mut wanderers = BTreeSet::new();
    let mut dissolved = Vec::new();
    for (idx, c) in state.clusters.iter_mut().enumerate() {
        let Some(p) = c.proxy else { continue };
        let m = c.master;
        if graph.is_adjacent(m, p) {
            continue;
        }
        let support = |h: usize| c.slaves().filter(|&s| graph.is_adjacent(s, h)).count();
        let (sm, sp) = (support(m), support(p));
        if sm == 0 && sp == 0 {
            events.push(MaintenanceEvent::new(time, EventKind::Handover, m, None));
            wanderers.extend(c.members.iter().copied());
            dissolved.push(idx);
            continue;
        }
        let (keep, leave) = if sp > sm { (p, m) } else { (m, p) };
        c.members.remove(&leave);
        let proxy = best(metrics, c.members.iter().copied().filter(|&v| v != keep && graph.is_adjacent(v, keep)));
        c.master = keep;
        c.proxy = proxy;
        events.push(MaintenanceEvent::new(time, EventKind::Handover, keep, Some((keep, proxy))));
        events.push(MaintenanceEvent::new(time, EventKind::BoundaryExit, leave, Some((m, Some(p)))));
        wanderers.insert(leave);
    }
    for idx in dissolved.into_iter().rev() {
        state.clusters.remove(idx);
    }
    (events, wanderers)
}

/// Re-affiliation of a node that left its cluster. Acknowledgers are the
/// masters and proxies adjacent to `node`; it joins the cluster of the best
/// one, or heads a new one-node cluster if there is none.
pub fn find_ch<S: Scalar>(
    node: usize,
    state: &mut ClusterState,
    graph: &NetworkGraph<S>,
    metrics: &[NodeMetrics<S>],
    time: f64,
) -> Vec<MaintenanceEvent> {
    for c in &mut state.clusters {
        c.members.remove(&node);
    }
    let mut events = vec![MaintenanceEvent::new(time, EventKind::FindCh, node, None)];
    let acks: Vec<(usize, usize)> = graph
        .neighbors(node)
        .iter()
        .filter_map(|&v| state.clusters.iter().position(|c| c.is_head(v)).map(|idx| (v, idx)))
        .collect();
    for &(_, idx) in &acks {
        events.push(MaintenanceEvent::new(time, EventKind::Ack, node, Some(state.clusters[idx].pair())));
    }
    match best(metrics, acks.iter().map(|&(v, _)| v)) {
        Some(head) => {
            let idx = acks.iter().find(|&&(v, _)| v == head).map(|&(_, i)| i).expect("acknowledger listed");
            let c = &mut state.clusters[idx];
            c.members.insert(node);
            events.push(MaintenanceEvent::new(time, EventKind::Join, node, Some(c.pair())));
        }
        None => {
            let id = state.next_cluster_id();
            state.clusters.push(ClusterRecord {
                id,
                master: node,
                proxy: None,
                members: BTreeSet::from([node]),
                origin: ClusterOrigin::Singleton,
            });
            events.push(MaintenanceEvent::new(time, EventKind::BecomeMaster, node, Some((node, None))));
        }
    }
    events
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimulationOptions {
    /// Recompute weights from the current distance tables at every refresh
    /// where the network is connected.
    pub recompute_weights: bool,
    /// Re-run formation and adjustment at every refresh where the network is
    /// connected, instead of maintaining the existing clusters.
    pub force_recluster: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub step: usize,
    pub time: f64,
    pub refreshed: bool,
    pub reclustered: bool,
    pub events: usize,
    pub partition_ok: bool,
    pub dominance_ok: bool,
    /// Masters that drifted into each other's range; logged, not acted on.
    pub adjacent_masters: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct SimulationOutcome<S = f64> {
    pub initial: Clustering,
    pub state: ClusterState,
    pub events: Vec<MaintenanceEvent>,
    pub summaries: Vec<StepSummary>,
    pub positions: Vec<Position<S>>,
    pub graph: NetworkGraph<S>,
    pub metrics: Vec<NodeMetrics<S>>,
}

fn weigh<S: Scalar>(
    graph: &NetworkGraph<S>,
    positions: &[Position<S>],
    config: &WeightConfig<S>,
) -> Result<(DistanceTables<S>, Vec<NodeMetrics<S>>)> {
    let tables = DistanceTables::from_positions(graph, positions);
    let metrics = compute_metrics(graph, &tables, config, &Overrides::default())?;
    Ok((tables, metrics))
}

/// Deploys the scenario, clusters it at t = 0 and maintains the clusters for
/// `steps` steps. The initial network must be connected.
pub fn run_simulation<S: Scalar>(scenario: &Scenario<S>, options: SimulationOptions) -> Result<SimulationOutcome<S>> {
    scenario.validate()?;
    let config = scenario.config();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut positions = deploy_with(&mut rng, scenario.node_count, scenario.terrain_size)?;
    let mut graph = NetworkGraph::from_positions(&positions, scenario.range)?;
    graph.ensure_connected()?;
    let (tables, mut metrics) = weigh(&graph, &positions, &config)?;
    let initial = cluster(&graph, &tables.hop, &metrics)?;
    let mut state = initial.final_state().clone();

    let dt = scenario.dt.to_f64_lossy();
    let bi = scenario.broadcast_interval.to_f64_lossy();
    let mut events = Vec::new();
    let mut summaries = Vec::with_capacity(scenario.steps);
    for step in 1..=scenario.steps {
        state.phase = Phase::Maintenance;
        let time = step as f64 * dt;
        positions = step_positions(&positions, scenario.v_max, scenario.dt, scenario.terrain_size, &mut rng);
        let refreshed = (time / bi).floor() > ((time - dt) / bi).floor();
        let mut summary = StepSummary {
            step,
            time,
            refreshed,
            reclustered: false,
            events: 0,
            partition_ok: true,
            dominance_ok: true,
            adjacent_masters: Vec::new(),
        };
        if refreshed {
            graph = NetworkGraph::from_positions(&positions, scenario.range)?;
            let connected = graph.is_connected();
            if connected && (options.recompute_weights || options.force_recluster) {
                let (tables, fresh) = weigh(&graph, &positions, &config)?;
                metrics = fresh;
                if options.force_recluster {
                    let mut redone = cluster(&graph, &tables.hop, &metrics)?.adjusted;
                    redone.phase = Phase::Maintenance;
                    state = redone;
                    summary.reclustered = true;
                }
            }
            let mut step_events = Vec::new();
            if !summary.reclustered {
                let (repairs, mut wanderers) = repair_heads(&mut state, &graph, &metrics, time);
                step_events.extend(repairs);
                let exits = boundary_exits(&state, &graph, time);
                wanderers.extend(exits.iter().map(|e| e.node));
                step_events.extend(exits);
                for node in wanderers {
                    step_events.extend(find_ch(node, &mut state, &graph, &metrics, time));
                }
            }
            order_events(&mut step_events);
            summary.events = step_events.len();
            events.extend(step_events);

            let hop = hop_distance_table(&graph);
            summary.partition_ok = check_partition(&state).passed;
            summary.dominance_ok = check_slave_dominance(&state, &hop).passed;
            summary.adjacent_masters = check_master_independence(&state, &graph)
                .witnesses
                .iter()
                .filter_map(|w| match *w {
                    Witness::Pair { a, b } => Some((a, b)),
                    _ => None,
                })
                .collect();
        }
        summaries.push(summary);
    }
    Ok(SimulationOutcome { initial, state, events, summaries, positions, graph, metrics })
}
