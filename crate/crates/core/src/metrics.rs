//! Node weight parameters and the weighted sum that ranks clusterhead
//! candidates.
//!
//! The weight of a node combines its degree, its combined closeness index,
//! the reciprocals of its eccentricity, mean hop distance and mean Euclidean
//! distance, and its neighbour strength:
//!
//! ```text
//! W(u) = α1·deg + α2·CCI + α3/ecc + α4/MHD + α5/MED + α6·NS
//! ```
//!
//! Closeness indices compare every node pair `(u, v)` by counting the nodes
//! strictly closer to `u` than to `v` (ties count for neither side).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistanceTables, EuclidMatrix, HopMatrix, NetworkGraph};
use crate::scalar::Scalar;

/// Denominator used for the mean hop and mean Euclidean distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanDivisor {
    /// `|V| − 1`: average over the other nodes.
    #[default]
    ExcludeSelf,
    /// `|V|`: the convention the bundled 23-node reference tables were computed with.
    NodeCount,
}

impl MeanDivisor {
    fn value(self, n: usize) -> usize {
        match self {
            MeanDivisor::ExcludeSelf => n - 1,
            MeanDivisor::NodeCount => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct WeightConfig<S = f64> {
    /// Weighing factors for (deg, CCI, 1/ecc, 1/MHD, 1/MED, NS).
    pub alphas: [S; 6],
    /// Neighbour-strength threshold `K`.
    pub ns_threshold: S,
    pub mean_divisor: MeanDivisor,
}

impl<S: Scalar> Default for WeightConfig<S> {
    fn default() -> Self {
        Self { alphas: [S::one() / S::of(6.0); 6], ns_threshold: S::of(100.0), mean_divisor: MeanDivisor::ExcludeSelf }
    }
}

/// Fixture-supplied values that replace recomputation, indexed by node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Overrides<S = f64> {
    pub ns: Option<Vec<S>>,
    pub weight: Option<Vec<S>>,
    pub g_h: Option<Vec<i64>>,
    pub g_ed: Option<Vec<i64>>,
}

impl<S: Scalar> Overrides<S> {
    pub fn is_empty(&self) -> bool {
        self.ns.is_none() && self.weight.is_none() && self.g_h.is_none() && self.g_ed.is_none()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        let lens = [
            ("ns_override", self.ns.as_ref().map(Vec::len)),
            ("weight_override", self.weight.as_ref().map(Vec::len)),
            ("g_h_override", self.g_h.as_ref().map(Vec::len)),
            ("g_ed_override", self.g_ed.as_ref().map(Vec::len)),
        ];
        for (name, len) in lens {
            if let Some(len) = len {
                if len != n {
                    return Err(Error::Fixture(format!("{name} has {len} entries, expected {n}")));
                }
            }
        }
        Ok(())
    }
}

/// Closer-set cardinalities for an ordered node pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RelativeCloseness {
    pub c_h_uv: usize,
    pub c_h_vu: usize,
    pub c_ed_uv: usize,
    pub c_ed_vu: usize,
    pub f_h: i64,
    pub f_ed: i64,
}

impl RelativeCloseness {
    pub fn between<S: Scalar>(u: usize, v: usize, tables: &DistanceTables<S>) -> Result<Self> {
        let (c_h_uv, c_h_vu) = closer_hop_cardinalities(u, v, &tables.hop)?;
        let (c_ed_uv, c_ed_vu) = closer_euclidean_cardinalities(u, v, &tables.euclid)?;
        Ok(Self {
            c_h_uv,
            c_h_vu,
            c_ed_uv,
            c_ed_vu,
            f_h: c_h_uv as i64 - c_h_vu as i64,
            f_ed: c_ed_uv as i64 - c_ed_vu as i64,
        })
    }
}

/// Counts `w` with `d(u,w) < d(v,w)` and with `d(v,w) < d(u,w)`, over all
/// nodes including `u` and `v`. Unreachable distances compare as infinite.
pub fn closer_hop_cardinalities(u: usize, v: usize, hop: &HopMatrix) -> Result<(usize, usize)> {
    check_pair(u, v, hop.size())?;
    let (ru, rv) = (hop.row(u), hop.row(v));
    let inf = |d: Option<u32>| d.unwrap_or(u32::MAX);
    Ok(count_closer(ru.iter().zip(rv).map(|(&a, &b)| inf(a).cmp(&inf(b)))))
}

pub fn closer_euclidean_cardinalities<S: Scalar>(
    u: usize,
    v: usize,
    euclid: &EuclidMatrix<S>,
) -> Result<(usize, usize)> {
    check_pair(u, v, euclid.size())?;
    let (ru, rv) = (euclid.row(u), euclid.row(v));
    Ok(count_closer(ru.iter().zip(rv).map(|(a, b)| a.partial_cmp(b).unwrap_or(Ordering::Equal))))
}

fn check_pair(u: usize, v: usize, n: usize) -> Result<()> {
    if u == v {
        return Err(Error::InvalidArgument(format!("closer sets need distinct nodes, got {u} twice")));
    }
    if u >= n || v >= n {
        return Err(Error::InvalidArgument(format!("node pair ({u}, {v}) outside 0..{n}")));
    }
    Ok(())
}

fn count_closer(cmps: impl Iterator<Item = Ordering>) -> (usize, usize) {
    cmps.fold((0, 0), |(a, b), ord| match ord {
        Ordering::Less => (a + 1, b),
        Ordering::Greater => (a, b + 1),
        Ordering::Equal => (a, b),
    })
}

/// `g_h(u) = Σ_{v≠u} (c_h(u|v) − c_h(v|u))`.
pub fn hop_closeness_index(u: usize, hop: &HopMatrix) -> Result<i64> {
    (0..hop.size()).filter(|&v| v != u).try_fold(0i64, |acc, v| {
        let (a, b) = closer_hop_cardinalities(u, v, hop)?;
        Ok(acc + a as i64 - b as i64)
    })
}

/// `g_ed(u) = Σ_{v≠u} (c_ed(u|v) − c_ed(v|u))`.
pub fn euclidean_closeness_index<S: Scalar>(u: usize, euclid: &EuclidMatrix<S>) -> Result<i64> {
    (0..euclid.size()).filter(|&v| v != u).try_fold(0i64, |acc, v| {
        let (a, b) = closer_euclidean_cardinalities(u, v, euclid)?;
        Ok(acc + a as i64 - b as i64)
    })
}

/// Hop and Euclidean closeness indices of every node, one pass per unordered pair.
pub fn closeness_indices<S: Scalar>(tables: &DistanceTables<S>) -> Result<(Vec<i64>, Vec<i64>)> {
    let n = tables.node_count();
    let mut g_h = vec![0i64; n];
    let mut g_ed = vec![0i64; n];
    for u in 0..n {
        for v in (u + 1)..n {
            let rc = RelativeCloseness::between(u, v, tables)?;
            g_h[u] += rc.f_h;
            g_h[v] -= rc.f_h;
            g_ed[u] += rc.f_ed;
            g_ed[v] -= rc.f_ed;
        }
    }
    Ok((g_h, g_ed))
}

pub fn combined_closeness_index<S: Scalar>(g_h: i64, g_ed: i64) -> S {
    S::of_i64(g_h + g_ed) / S::of(2.0)
}

/// Strong / medium / weak neighbour counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NeighborCategories {
    pub strong: usize,
    pub medium: usize,
    pub weak: usize,
}

impl NeighborCategories {
    pub fn total(&self) -> usize {
        self.strong + self.medium + self.weak
    }
}

/// Bins each neighbour of `u` by distance: strong `[0, r/2]`, medium
/// `(r/2, 3r/4]`, weak `(3r/4, r]`.
pub fn neighbor_categories<S: Scalar>(
    u: usize,
    graph: &NetworkGraph<S>,
    euclid: &EuclidMatrix<S>,
) -> Result<NeighborCategories> {
    let r = graph.range().ok_or_else(|| Error::Config("neighbour categories need a transmission range".into()))?;
    let (half, three_quarters) = (r * S::of(0.5), r * S::of(0.75));
    let mut cats = NeighborCategories::default();
    for &v in graph.neighbors(u) {
        let d = euclid.get(u, v);
        if d <= half {
            cats.strong += 1;
        } else if d <= three_quarters {
            cats.medium += 1;
        } else {
            cats.weak += 1;
        }
    }
    Ok(cats)
}

/// `NS = (m1 + m2/2 + m3/4)·K`.
pub fn neighbor_strength<S: Scalar>(cats: NeighborCategories, threshold: S) -> S {
    (S::of_usize(cats.strong) + S::of_usize(cats.medium) / S::of(2.0) + S::of_usize(cats.weak) / S::of(4.0)) * threshold
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStatistics<S = f64> {
    pub ecc: u32,
    pub mhd: S,
    pub med: S,
}

/// Eccentricity, mean hop distance and mean Euclidean distance of `u`.
pub fn path_statistics<S: Scalar>(
    u: usize,
    tables: &DistanceTables<S>,
    divisor: MeanDivisor,
) -> Result<PathStatistics<S>> {
    let n = tables.node_count();
    if n < 2 {
        return Err(Error::DivisionByZero("mean distances of a single-node network"));
    }
    let mut ecc = 0u32;
    let mut hop_sum = 0u64;
    for v in 0..n {
        let d = tables.hop.reachable(u, v)?;
        ecc = ecc.max(d);
        hop_sum += u64::from(d);
    }
    let ed_sum = tables.euclid.row(u).iter().fold(S::zero(), |acc, &d| acc + d);
    let den = S::of_usize(divisor.value(n));
    Ok(PathStatistics { ecc, mhd: S::of(hop_sum as f64) / den, med: ed_sum / den })
}

/// The six summands of the weight before weighing, with the distance
/// parameters already inverted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightTerms<S = f64> {
    pub deg: S,
    pub cci: S,
    pub inv_ecc: S,
    pub inv_mhd: S,
    pub inv_med: S,
    pub ns: S,
}

impl<S: Scalar> WeightTerms<S> {
    pub fn from_raw(deg: usize, cci: S, ecc: u32, mhd: S, med: S, ns: S) -> Result<Self> {
        if ecc == 0 {
            return Err(Error::DivisionByZero("1/ecc"));
        }
        if mhd == S::zero() {
            return Err(Error::DivisionByZero("1/MHD"));
        }
        if med == S::zero() {
            return Err(Error::DivisionByZero("1/MED"));
        }
        Ok(Self {
            deg: S::of_usize(deg),
            cci,
            inv_ecc: S::one() / S::of(f64::from(ecc)),
            inv_mhd: S::one() / mhd,
            inv_med: S::one() / med,
            ns,
        })
    }

    pub fn as_array(&self) -> [S; 6] {
        [self.deg, self.cci, self.inv_ecc, self.inv_mhd, self.inv_med, self.ns]
    }
}

/// Weighted sum of the six terms. Negative weights are legitimate.
pub fn node_weight<S: Scalar>(terms: &WeightTerms<S>, config: &WeightConfig<S>) -> S {
    terms.as_array().iter().zip(config.alphas.iter()).fold(S::zero(), |acc, (&t, &a)| acc + a * t)
}

/// Per-node parameters and the weight used for election.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct NodeMetrics<S = f64> {
    pub deg: usize,
    pub g_h: i64,
    pub g_ed: i64,
    pub cci: S,
    pub ecc: u32,
    pub mhd: S,
    pub med: S,
    /// Category counts; absent when no range is known.
    pub m1: Option<usize>,
    pub m2: Option<usize>,
    pub m3: Option<usize>,
    pub ns: S,
    #[serde(rename = "w")]
    pub weight: S,
}

/// Computes every node's parameters and weight. Overrides win over
/// recomputation. The graph must be connected. A single-node network gets
/// zeroed parameters and weight zero, since its mean distances are undefined.
pub fn compute_metrics<S: Scalar>(
    graph: &NetworkGraph<S>,
    tables: &DistanceTables<S>,
    config: &WeightConfig<S>,
    overrides: &Overrides<S>,
) -> Result<Vec<NodeMetrics<S>>> {
    let n = graph.node_count();
    if tables.node_count() != n || tables.euclid.size() != n {
        return Err(Error::InvalidArgument(format!(
            "distance tables cover {} nodes, graph has {n}",
            tables.node_count()
        )));
    }
    overrides.check_len(n)?;
    graph.ensure_connected()?;

    if n == 1 {
        let ns = overrides.ns.as_ref().map_or(S::zero(), |v| v[0]);
        return Ok(vec![NodeMetrics {
            deg: 0,
            g_h: 0,
            g_ed: 0,
            cci: S::zero(),
            ecc: 0,
            mhd: S::zero(),
            med: S::zero(),
            m1: graph.range().map(|_| 0),
            m2: graph.range().map(|_| 0),
            m3: graph.range().map(|_| 0),
            ns,
            weight: overrides.weight.as_ref().map_or(S::zero(), |v| v[0]),
        }]);
    }

    let (g_h, g_ed) = match (&overrides.g_h, &overrides.g_ed) {
        (Some(h), Some(e)) => (h.clone(), e.clone()),
        (h, e) => {
            let (ch, ce) = closeness_indices(tables)?;
            (h.clone().unwrap_or(ch), e.clone().unwrap_or(ce))
        }
    };

    (0..n)
        .map(|u| {
            let cats = match graph.range() {
                Some(_) => Some(neighbor_categories(u, graph, &tables.euclid)?),
                None => None,
            };
            let ns = match (&overrides.ns, cats) {
                (Some(v), _) => v[u],
                (None, Some(c)) => neighbor_strength(c, config.ns_threshold),
                (None, None) => {
                    return Err(Error::Config(format!("node {u}: no transmission range and no NS override")))
                }
            };
            let stats = path_statistics(u, tables, config.mean_divisor)?;
            let cci = combined_closeness_index(g_h[u], g_ed[u]);
            let weight = match &overrides.weight {
                Some(v) => v[u],
                None => {
                    let terms = WeightTerms::from_raw(graph.degree(u), cci, stats.ecc, stats.mhd, stats.med, ns)?;
                    node_weight(&terms, config)
                }
            };
            Ok(NodeMetrics {
                deg: graph.degree(u),
                g_h: g_h[u],
                g_ed: g_ed[u],
                cci,
                ecc: stats.ecc,
                mhd: stats.mhd,
                med: stats.med,
                m1: cats.map(|c| c.strong),
                m2: cats.map(|c| c.medium),
                m3: cats.map(|c| c.weak),
                ns,
                weight,
            })
        })
        .collect()
}

/// Election order: higher weight, then higher NS, then lower node id.
/// `Ordering::Greater` means `a` ranks ahead of `b`.
pub fn rank<S: Scalar>(metrics: &[NodeMetrics<S>], a: usize, b: usize) -> Ordering {
    let (ma, mb) = (&metrics[a], &metrics[b]);
    ma.weight
        .partial_cmp(&mb.weight)
        .unwrap_or(Ordering::Equal)
        .then(ma.ns.partial_cmp(&mb.ns).unwrap_or(Ordering::Equal))
        .then(b.cmp(&a))
}

/// Highest-ranked node of `candidates`, if any.
pub fn best<S: Scalar>(metrics: &[NodeMetrics<S>], candidates: impl IntoIterator<Item = usize>) -> Option<usize> {
    candidates.into_iter().max_by(|&a, &b| rank(metrics, a, b))
}
