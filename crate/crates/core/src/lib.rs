//! Weighted clustering of homogeneous mobile ad hoc networks in which every
//! cluster embeds a double star: a master, a proxy adjacent to it, and slaves
//! adjacent to either.
//!
//! The pipeline is
//! [`build_graph`] → [`DistanceTables`] → [`compute_metrics`] →
//! [`cluster`] (formation, then adjustment of critical nodes) →
//! [`verify::verify_state`]. [`sim`] moves nodes and maintains the clusters.
//!
//! Geometry and weights are generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below fix the choice.
//!
//! ```
//! use dsec::{build_graph, cluster, compute_metrics, deploy_random, DistanceTables, Overrides, WeightConfig};
//!
//! let positions = deploy_random::<f64>(20, 100.0, 3).unwrap();
//! let graph = build_graph(&positions, 60.0).unwrap();
//! # if !graph.is_connected() { return; }
//! let tables = DistanceTables::from_positions(&graph, &positions);
//! let metrics = compute_metrics(&graph, &tables, &WeightConfig::default(), &Overrides::default()).unwrap();
//! let result = cluster(&graph, &tables.hop, &metrics).unwrap();
//! assert!(result.final_state().clusters.iter().map(|c| c.members.len()).sum::<usize>() == 20);
//! ```

pub mod cluster;
pub mod error;
pub mod fixture;
pub mod graph;
pub mod metrics;
pub mod report;
pub mod scalar;
pub mod sim;
pub mod verify;

pub use cluster::{
    classify, cluster, elect_proxy, master_eligibility, neighbor_partitions, run_adjusted, run_m_dsec, ClusterEvent,
    ClusterOrigin, ClusterRecord, ClusterState, Clustering, NodeStatus, PerfectionClass, Phase,
};
pub use error::{Error, Result};
pub use fixture::{ingest_fixture, Fixture, Ingested};
pub use graph::{
    build_graph, deploy_random, euclidean_distance_table, hop_distance_table, DistanceTables, EuclidMatrix, HopMatrix,
    NetworkGraph, Position,
};
pub use metrics::{compute_metrics, node_weight, MeanDivisor, NodeMetrics, Overrides, WeightConfig};
pub use scalar::Scalar;

pub type Position64 = Position<f64>;
pub type Position32 = Position<f32>;
pub type Graph64 = NetworkGraph<f64>;
pub type Graph32 = NetworkGraph<f32>;
pub type Tables64 = DistanceTables<f64>;
pub type Tables32 = DistanceTables<f32>;
pub type Metrics64 = NodeMetrics<f64>;
pub type Metrics32 = NodeMetrics<f32>;
pub type WeightConfig64 = WeightConfig<f64>;
pub type WeightConfig32 = WeightConfig<f32>;
pub type Fixture64 = Fixture<f64>;
pub type Scenario64 = sim::Scenario<f64>;
pub type Scenario32 = sim::Scenario<f32>;
