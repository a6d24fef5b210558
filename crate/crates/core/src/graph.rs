//! Network graph construction and all-pairs distance tables.
//!
//! Nodes are dense indices `0..n`. In position mode two nodes are adjacent
//! iff their Euclidean distance is at most the transmission range (ties at
//! exactly the range are adjacent). In fixture mode the adjacency is given
//! verbatim and no range is known.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Position<S = f64> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Position<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Self) -> S {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn within_square(&self, side: S) -> bool {
        self.x >= S::zero() && self.x <= side && self.y >= S::zero() && self.y <= side
    }
}

/// Places `n` nodes uniformly at random on `[0, terrain_size]²`.
pub fn deploy_random<S: Scalar>(n: usize, terrain_size: S, seed: u64) -> Result<Vec<Position<S>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    deploy_with(&mut rng, n, terrain_size)
}

/// Same as [`deploy_random`] but draws from a caller-owned generator.
pub fn deploy_with<S: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, terrain_size: S) -> Result<Vec<Position<S>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("node count must be at least 1".into()));
    }
    if !terrain_size.is_finite() || terrain_size <= S::zero() {
        return Err(Error::InvalidArgument(format!("terrain size must be positive and finite, got {terrain_size}")));
    }
    let side = terrain_size.to_f64_lossy();
    Ok((0..n)
        .map(|_| {
            let x = S::of(rng.gen_range(0.0..=side)).min(terrain_size);
            let y = S::of(rng.gen_range(0.0..=side)).min(terrain_size);
            Position::new(x, y)
        })
        .collect())
}

/// Undirected simple graph over nodes `0..n` with sorted neighbour lists.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph<S = f64> {
    neighbors: Vec<Vec<usize>>,
    range: Option<S>,
}

impl<S: Scalar> NetworkGraph<S> {
    /// Builds the unit-disk graph: `(u, v)` adjacent iff `ed(u, v) <= range`.
    pub fn from_positions(positions: &[Position<S>], range: S) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidArgument("no positions given".into()));
        }
        if range.is_nan() || range <= S::zero() {
            return Err(Error::InvalidArgument(format!("range must be positive, got {range}")));
        }
        let n = positions.len();
        let mut neighbors = vec![Vec::new(); n];
        for u in 0..n {
            for v in (u + 1)..n {
                if positions[u].distance(&positions[v]) <= range {
                    neighbors[u].push(v);
                    neighbors[v].push(u);
                }
            }
        }
        Ok(Self { neighbors, range: Some(range) })
    }

    /// Builds a graph from an explicit edge list. Duplicate edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("graph needs at least one node".into()));
        }
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Fixture(format!("edge ({u}, {v}) references a node outside 0..{n}")));
            }
            if u == v {
                return Err(Error::Fixture(format!("self-loop at node {u}")));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { neighbors, range: None })
    }

    /// Attaches a transmission range to a fixture graph. The adjacency is not
    /// re-derived; the range only drives neighbour categorisation.
    pub fn with_range(mut self, range: S) -> Result<Self> {
        if range.is_nan() || range <= S::zero() {
            return Err(Error::Fixture(format!("range must be positive, got {range}")));
        }
        self.range = Some(range);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn nodes(&self) -> std::ops::Range<usize> {
        0..self.neighbors.len()
    }

    /// Transmission range; `None` for fixture graphs.
    pub fn range(&self) -> Option<S> {
        self.range
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors[u].len()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.neighbors[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Fails with the component report when the graph is disconnected.
    pub fn ensure_connected(&self) -> Result<()> {
        let components = self.components();
        if components.len() > 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(())
    }
}

/// Convenience wrapper over [`NetworkGraph::from_positions`].
pub fn build_graph<S: Scalar>(positions: &[Position<S>], range: S) -> Result<NetworkGraph<S>> {
    NetworkGraph::from_positions(positions, range)
}

/// All-pairs hop distances; `None` marks an unreachable pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopMatrix {
    n: usize,
    data: Vec<Option<u32>>,
}

impl HopMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        self.data[u * self.n + v]
    }

    /// Hop distance, or [`Error::Unreachable`].
    pub fn reachable(&self, u: usize, v: usize) -> Result<u32> {
        self.get(u, v).ok_or(Error::Unreachable { from: u, to: v })
    }

    /// Hop distance with unreachable pairs treated as infinitely far.
    pub fn or_infinite(&self, u: usize, v: usize) -> u32 {
        self.get(u, v).unwrap_or(u32::MAX)
    }

    pub fn row(&self, u: usize) -> &[Option<u32>] {
        &self.data[u * self.n..(u + 1) * self.n]
    }
}

/// Breadth-first search from every node.
pub fn hop_distance_table<S: Scalar>(graph: &NetworkGraph<S>) -> HopMatrix {
    let n = graph.node_count();
    let mut data = vec![None; n * n];
    let mut queue = VecDeque::with_capacity(n);
    for source in 0..n {
        let row = &mut data[source * n..(source + 1) * n];
        row[source] = Some(0);
        queue.clear();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = row[u].map(|d| d + 1);
            for &v in graph.neighbors(u) {
                if row[v].is_none() {
                    row[v] = next;
                    queue.push_back(v);
                }
            }
        }
    }
    HopMatrix { n, data }
}

/// Dense symmetric matrix of Euclidean distances.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclidMatrix<S = f64> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> EuclidMatrix<S> {
    /// Wraps a row-major square matrix; checks shape, symmetry and zero diagonal.
    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (u, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Fixture(format!("euclid row {u} has {} entries, expected {n}", row.len())));
            }
            data.extend_from_slice(row);
        }
        for u in 0..n {
            if data[u * n + u] != S::zero() {
                return Err(Error::Fixture(format!("euclid diagonal entry ({u}, {u}) is not zero")));
            }
            for v in (u + 1)..n {
                let (a, b) = (data[u * n + v], data[v * n + u]);
                if a != b {
                    return Err(Error::Fixture(format!("euclid matrix asymmetric at ({u}, {v}): {a} vs {b}")));
                }
                if !a.is_finite() || a < S::zero() {
                    return Err(Error::Fixture(format!("euclid entry ({u}, {v}) is not a finite non-negative length")));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> S {
        self.data[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[S] {
        &self.data[u * self.n..(u + 1) * self.n]
    }
}

pub fn euclidean_distance_table<S: Scalar>(positions: &[Position<S>]) -> EuclidMatrix<S> {
    let n = positions.len();
    let mut data = vec![S::zero(); n * n];
    for u in 0..n {
        for v in (u + 1)..n {
            let d = positions[u].distance(&positions[v]);
            data[u * n + v] = d;
            data[v * n + u] = d;
        }
    }
    EuclidMatrix { n, data }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTables<S = f64> {
    pub hop: HopMatrix,
    pub euclid: EuclidMatrix<S>,
}

impl<S: Scalar> DistanceTables<S> {
    pub fn from_positions(graph: &NetworkGraph<S>, positions: &[Position<S>]) -> Self {
        Self { hop: hop_distance_table(graph), euclid: euclidean_distance_table(positions) }
    }

    pub fn node_count(&self) -> usize {
        self.hop.size()
    }
}
