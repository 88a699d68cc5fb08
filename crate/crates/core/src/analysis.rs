// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Downstream analyses on a clustering: intra-cluster tiers, marker
//! concentration and the Jaccard overlap graph between clusters.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::graph::{CitationGraph, NodeId};
use crate::parallel::map_ordered;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierRow {
    pub cluster_id: u32,
    pub node: NodeId,
    /// Citations received from other members of the same cluster.
    pub intra_in_degree: usize,
    pub tier1: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeTierCount {
    pub node: NodeId,
    pub clusters: usize,
    pub tier1_clusters: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierAssignment {
    /// Cluster id order, members ascending within a cluster.
    pub rows: Vec<TierRow>,
    /// Nodes in at least one cluster, ascending.
    pub per_node: Vec<NodeTierCount>,
}

/// Smallest value still inside the top tenth of `values`: the
/// `ceil(len / 10)`-th largest. Ties at that value are all in.
pub fn top_decile_threshold(values: &[usize]) -> Option<usize> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let rank = values.len().div_ceil(10);
    Some(sorted[rank - 1])
}

pub fn tier_classify(graph: &CitationGraph, clustering: &Clustering) -> TierAssignment {
    let per_cluster = map_ordered(&clustering.clusters, |c| {
        let degrees: Vec<usize> = c
            .members
            .iter()
            .map(|&v| {
                graph
                    .in_neighbors(v)
                    .iter()
                    .filter(|u| c.members.binary_search(u).is_ok())
                    .count()
            })
            .collect();
        let threshold = top_decile_threshold(&degrees).unwrap_or(0);
        c.members
            .iter()
            .zip(degrees)
            .map(|(&node, d)| TierRow {
                cluster_id: c.id,
                node,
                intra_in_degree: d,
                tier1: d >= threshold,
            })
            .collect::<Vec<_>>()
    });
    let rows: Vec<TierRow> = per_cluster.into_iter().flatten().collect();

    let mut counts: HashMap<NodeId, (usize, usize)> = HashMap::new();
    for r in &rows {
        let e = counts.entry(r.node).or_default();
        e.0 += 1;
        if r.tier1 {
            e.1 += 1;
        }
    }
    let mut per_node: Vec<NodeTierCount> = counts
        .into_iter()
        .map(|(node, (clusters, tier1_clusters))| NodeTierCount {
            node,
            clusters,
            tier1_clusters,
        })
        .collect();
    per_node.sort_unstable_by_key(|r| r.node);
    TierAssignment { rows, per_node }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerSet {
    /// Resolved markers, sorted and distinct.
    pub nodes: Vec<NodeId>,
    pub listed: usize,
    pub unresolved: usize,
}

impl MarkerSet {
    pub fn resolve(graph: &CitationGraph, keys: &[String]) -> Self {
        let mut nodes: Vec<NodeId> = keys.iter().filter_map(|k| graph.id_of(k)).collect();
        let unresolved = keys.len() - nodes.len();
        nodes.sort_unstable();
        nodes.dedup();
        MarkerSet {
            nodes,
            listed: keys.len(),
            unresolved,
        }
    }

    pub fn resolved(&self) -> usize {
        self.nodes.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkerRow {
    pub cluster_id: u32,
    pub markers: usize,
    /// Share of resolved markers; `None` when no marker resolved.
    pub percent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkerReport {
    pub resolved: usize,
    pub zero_denominator: bool,
    pub rows: Vec<MarkerRow>,
    pub nonzero_clusters: usize,
    /// Markers in at least one cluster.
    pub covered: usize,
    pub covered_percent: Option<f64>,
}

pub fn marker_report(clustering: &Clustering, markers: &MarkerSet) -> MarkerReport {
    let resolved = markers.resolved();
    let pct = |count: usize| (resolved > 0).then(|| 100.0 * count as f64 / resolved as f64);
    let rows: Vec<MarkerRow> = clustering
        .clusters
        .iter()
        .map(|c| {
            let count = markers
                .nodes
                .iter()
                .filter(|v| c.members.binary_search(v).is_ok())
                .count();
            MarkerRow {
                cluster_id: c.id,
                markers: count,
                percent: pct(count),
            }
        })
        .collect();
    let covered = markers
        .nodes
        .iter()
        .filter(|v| clustering.clusters.iter().any(|c| c.contains(**v)))
        .count();
    MarkerReport {
        resolved,
        zero_denominator: resolved == 0,
        nonzero_clusters: rows.iter().filter(|r| r.markers > 0).count(),
        rows,
        covered,
        covered_percent: pct(covered),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapPair {
    pub a: u32,
    pub b: u32,
    pub intersection: usize,
    pub union: usize,
    pub jaccard: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapNode {
    pub cluster_id: u32,
    pub size: usize,
    /// Retained edges; 0 means the cluster is left out of the rendering.
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapGraph {
    pub clusters: Vec<OverlapNode>,
    /// Every pair with a non-empty intersection, ordered by `(a, b)`.
    pub pairs: Vec<OverlapPair>,
    /// Pairs with Jaccard strictly above `threshold`.
    pub edges: Vec<OverlapPair>,
    /// Median Jaccard; `None` when no two clusters overlap.
    pub threshold: Option<f64>,
    pub median_includes_zeros: bool,
}

fn median_sorted(values: &[f64]) -> f64 {
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Median of `zeros` zero values followed by the sorted `nonzero` values.
fn median_with_zeros(zeros: usize, nonzero: &[f64]) -> f64 {
    let n = zeros + nonzero.len();
    let at = |i: usize| if i < zeros { 0.0 } else { nonzero[i - zeros] };
    if n % 2 == 1 {
        at(n / 2)
    } else {
        (at(n / 2 - 1) + at(n / 2)) / 2.0
    }
}

/// Jaccard overlap between clusters, thresholded at the median.
///
/// Intersections are accumulated through a node-to-clusters index, so the
/// cost follows shared memberships rather than the number of cluster pairs.
pub fn overlap_graph(clustering: &Clustering, median_includes_zeros: bool) -> OverlapGraph {
    let c = &clustering.clusters;
    let mut by_node: HashMap<NodeId, Vec<usize>> = HashMap::new();
    for (i, cl) in c.iter().enumerate() {
        for &v in &cl.members {
            by_node.entry(v).or_default().push(i);
        }
    }
    let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
    for list in by_node.values() {
        for (x, &i) in list.iter().enumerate() {
            for &j in &list[x + 1..] {
                *shared.entry((i, j)).or_default() += 1;
            }
        }
    }
    let mut pairs: Vec<OverlapPair> = shared
        .into_iter()
        .map(|((i, j), inter)| {
            let union = c[i].members.len() + c[j].members.len() - inter;
            OverlapPair {
                a: c[i].id,
                b: c[j].id,
                intersection: inter,
                union,
                jaccard: inter as f64 / union as f64,
            }
        })
        .collect();
    pairs.sort_unstable_by_key(|p| (p.a, p.b));

    let threshold = if pairs.is_empty() {
        None
    } else {
        let mut values: Vec<f64> = pairs.iter().map(|p| p.jaccard).collect();
        values.sort_unstable_by(|a, b| a.total_cmp(b));
        Some(if median_includes_zeros {
            let total = c.len() * (c.len() - 1) / 2;
            median_with_zeros(total - values.len(), &values)
        } else {
            median_sorted(&values)
        })
    };

    let edges: Vec<OverlapPair> = match threshold {
        Some(t) => pairs.iter().filter(|p| p.jaccard > t).cloned().collect(),
        None => Vec::new(),
    };
    let mut degree: HashMap<u32, usize> = HashMap::new();
    for e in &edges {
        *degree.entry(e.a).or_default() += 1;
        *degree.entry(e.b).or_default() += 1;
    }
    OverlapGraph {
        clusters: c
            .iter()
            .map(|cl| OverlapNode {
                cluster_id: cl.id,
                size: cl.members.len(),
                degree: degree.get(&cl.id).copied().unwrap_or(0),
            })
            .collect(),
        pairs,
        edges,
        threshold,
        median_includes_zeros,
    }
}

/// Graphviz rendering with isolated clusters omitted.
pub fn overlap_to_dot(g: &OverlapGraph) -> String {
    let mut s = String::from("graph overlap {\n");
    match g.threshold {
        Some(t) => {
            let _ = writeln!(s, "  // edges drawn where jaccard > {t}");
        }
        None => s.push_str("  // no overlapping clusters; threshold undefined\n"),
    }
    for n in g.clusters.iter().filter(|n| n.degree > 0) {
        let _ = writeln!(s, "  c{} [label=\"{}\", size={}];", n.cluster_id, n.cluster_id, n.size);
    }
    for e in &g.edges {
        let _ = writeln!(
            s,
            "  c{} -- c{} [weight={:.6}, label=\"{:.3}\"];",
            e.a, e.b, e.jaccard, e.jaccard
        );
    }
    s.push_str("}\n");
    s
}
