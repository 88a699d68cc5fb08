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

//! Overlapping cluster assembly on top of a disjoint IKC clustering.
//!
//! Candidates are ranked by total degree (descending, ties by id). Each
//! cluster is expanded independently from its original members: candidates
//! are visited in rank order and admitted when they have enough neighbors
//! in the reference set and the enlarged cluster keeps positive modularity.
//! The neighbor threshold is `MCD(C)` for [`CriterionKind::AocM`] and `k`
//! for [`CriterionKind::AocK`].
//!
//! A candidate with no neighbor in the current expansion cannot pass either
//! test, so only candidates adjacent to the expansion are ever examined.
//! They are kept in a rank-ordered heap, which visits exactly the candidates
//! a full in-order scan would admit.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clustering::{describe, Cluster, Clustering, Provenance};
use crate::error::{Error, Result};
use crate::graph::{degree_group_of, CitationGraph, NodeId};
use crate::kcore::min_induced_degree;
use crate::modularity::{cluster_counts, modularity_from_counts};
use crate::parallel::map_ordered;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    /// At least `MCD(C)` neighbors in the cluster.
    AocM,
    /// At least `k` neighbors in the cluster.
    AocK,
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" | "aoc_m" | "mcd" => Ok(CriterionKind::AocM),
            "k" | "aoc_k" => Ok(CriterionKind::AocK),
            other => Err(Error::InvalidArgument(format!(
                "unknown criterion `{other}` (expected m or k)"
            ))),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCriterion {
    pub kind: CriterionKind,
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStrategy {
    NonSingletonMembers,
    /// Percent in `(0, 100]`.
    TopPercentSingletons(f64),
    ExplicitFile(Vec<String>),
}

impl fmt::Display for CandidateStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateStrategy::NonSingletonMembers => write!(f, "nonsingleton"),
            CandidateStrategy::TopPercentSingletons(p) => write!(f, "singletons:{p}"),
            CandidateStrategy::ExplicitFile(keys) => write!(f, "file({} keys)", keys.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet {
    /// Total degree descending, ties by ascending id; no duplicates.
    pub nodes: Vec<NodeId>,
    pub strategy: String,
    /// Explicit keys not present in the graph.
    pub unknown_keys: usize,
}

fn rank_by_degree(graph: &CitationGraph, nodes: &mut Vec<NodeId>) {
    nodes.sort_unstable_by(|&a, &b| graph.degree(b).cmp(&graph.degree(a)).then(a.cmp(&b)));
    nodes.dedup();
}

pub fn select_candidates(
    graph: &CitationGraph,
    clustering: &Clustering,
    strategy: &CandidateStrategy,
) -> Result<CandidateSet> {
    let counts = clustering.membership_counts();
    let mut unknown_keys = 0;
    let mut nodes: Vec<NodeId> = match strategy {
        CandidateStrategy::NonSingletonMembers => graph.nodes().filter(|v| counts[v.index()] > 0).collect(),
        CandidateStrategy::TopPercentSingletons(p) => {
            if !(*p > 0.0 && *p <= 100.0) {
                return Err(Error::InvalidArgument(format!("percent {p} outside (0, 100]")));
            }
            let n = graph.node_count();
            let take = ((p / 100.0) * n as f64).ceil() as usize;
            let mut ranked: Vec<NodeId> = graph.nodes().collect();
            rank_by_degree(graph, &mut ranked);
            let mut top = Vec::new();
            if take > 0 {
                let cutoff = graph.degree(ranked[take.min(n) - 1]);
                top = ranked.into_iter().take_while(|&v| graph.degree(v) >= cutoff).collect();
            }
            top.into_iter().filter(|v| counts[v.index()] == 0).collect()
        }
        CandidateStrategy::ExplicitFile(keys) => keys
            .iter()
            .filter_map(|k| {
                let id = graph.id_of(k);
                if id.is_none() {
                    unknown_keys += 1;
                }
                id
            })
            .collect(),
    };
    rank_by_degree(graph, &mut nodes);
    Ok(CandidateSet {
        nodes,
        strategy: strategy.to_string(),
        unknown_keys,
    })
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct AocOptions {
    /// Count neighbors against the original cluster instead of the current
    /// expansion. The modularity gate always uses the current expansion.
    pub frozen_reference: bool,
    /// Keep a per-candidate decision log.
    pub record_decisions: bool,
}

/// One admission decision for a candidate adjacent to the expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub cluster_id: u32,
    pub node: NodeId,
    /// Neighbors in the set the degree test counts against.
    pub reference_neighbors: usize,
    pub expansion_neighbors: usize,
    pub mcd: usize,
    pub k: u32,
    pub degree_test: bool,
    pub modularity_after: f64,
    pub admitted: bool,
}

#[derive(Clone, Debug)]
pub struct AocOutput {
    pub clustering: Clustering,
    pub decisions: Vec<Decision>,
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i >> 6] >> (i & 63) & 1 == 1
    }
    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i >> 6] |= 1 << (i & 63);
    }
}

pub fn aoc(
    graph: &CitationGraph,
    clustering: &Clustering,
    candidates: &CandidateSet,
    criterion: MembershipCriterion,
    options: AocOptions,
) -> Result<AocOutput> {
    if criterion.k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if clustering.node_count != graph.node_count() {
        return Err(Error::InvalidInput(
            "clustering was built over a different graph".into(),
        ));
    }
    if let Some(k) = clustering.k {
        if k != criterion.k {
            return Err(Error::Config(format!(
                "criterion k={} differs from the clustering's k={k}",
                criterion.k
            )));
        }
    }
    if !clustering.is_disjoint() {
        return Err(Error::InvalidInput("input clustering is not disjoint".into()));
    }
    let mcds: Vec<usize> = clustering
        .clusters
        .iter()
        .map(|c| min_induced_degree(graph, &c.members))
        .collect();
    if clustering.k.is_none() {
        if let Some((c, mcd)) = clustering
            .clusters
            .iter()
            .zip(&mcds)
            .find(|(_, &m)| m < criterion.k as usize)
        {
            return Err(Error::Config(format!(
                "cluster {} has MCD {mcd} < k={}; input is not a k-valid clustering",
                c.id, criterion.k
            )));
        }
    }

    let total_edges = graph.undirected_edge_count();
    let mut rank = vec![u32::MAX; graph.node_count()];
    for (r, v) in candidates.nodes.iter().enumerate() {
        rank[v.index()] = r as u32;
    }

    let jobs: Vec<(&Cluster, usize)> = clustering.clusters.iter().zip(mcds).collect();
    let expanded = map_ordered(&jobs, |&(cluster, mcd)| {
        expand(graph, cluster, mcd, candidates, &rank, total_edges, criterion, options)
    });

    let provenance = match criterion.kind {
        CriterionKind::AocM => Provenance::AocM,
        CriterionKind::AocK => Provenance::AocK,
    };
    let mut out = Clustering {
        clusters: Vec::with_capacity(clustering.len()),
        k: Some(criterion.k),
        node_count: clustering.node_count,
        graph_fingerprint: clustering.graph_fingerprint.clone(),
    };
    let mut decisions = Vec::new();
    for ((cluster, _), (mut added, log)) in jobs.iter().zip(expanded) {
        added.sort_unstable();
        let mut members = cluster.members.clone();
        members.extend_from_slice(&added);
        members.sort_unstable();
        let meta = describe(graph, &members, cluster.meta.extraction_k, provenance);
        out.clusters.push(Cluster {
            id: cluster.id,
            members,
            added,
            meta,
        });
        decisions.extend(log);
    }
    Ok(AocOutput {
        clustering: out,
        decisions,
    })
}

#[allow(clippy::too_many_arguments)]
fn expand(
    graph: &CitationGraph,
    cluster: &Cluster,
    mcd: usize,
    candidates: &CandidateSet,
    rank: &[u32],
    total_edges: usize,
    criterion: MembershipCriterion,
    options: AocOptions,
) -> (Vec<NodeId>, Vec<Decision>) {
    let n = graph.node_count();
    let threshold = match criterion.kind {
        CriterionKind::AocM => mcd,
        CriterionKind::AocK => criterion.k as usize,
    };
    let mut original = Bits::new(n);
    for v in &cluster.members {
        original.set(v.index());
    }
    let mut expansion = Bits::new(n);
    for v in &cluster.members {
        expansion.set(v.index());
    }
    let (mut internal, mut degree_sum) = cluster_counts(graph, &cluster.members);

    let mut queued = Bits::new(candidates.nodes.len());
    let mut heap = BinaryHeap::new();
    let mut push = |v: NodeId, after: u32, heap: &mut BinaryHeap<Reverse<u32>>, expansion: &Bits| {
        let r = rank[v.index()];
        if r != u32::MAX && (after == u32::MAX || r > after) && !expansion.get(v.index()) && !queued.get(r as usize) {
            queued.set(r as usize);
            heap.push(Reverse(r));
        }
    };
    for &v in &cluster.members {
        for &u in graph.neighbors(v) {
            push(u, u32::MAX, &mut heap, &expansion);
        }
    }

    let mut added = Vec::new();
    let mut log = Vec::new();
    while let Some(Reverse(r)) = heap.pop() {
        let v = candidates.nodes[r as usize];
        if expansion.get(v.index()) {
            continue;
        }
        let nbrs = graph.neighbors(v);
        let in_expansion = nbrs.iter().filter(|u| expansion.get(u.index())).count();
        let in_reference = if options.frozen_reference {
            nbrs.iter().filter(|u| original.get(u.index())).count()
        } else {
            in_expansion
        };
        let degree_test = in_reference >= threshold;
        let q = modularity_from_counts(internal + in_expansion, degree_sum + nbrs.len(), total_edges);
        let admitted = degree_test && q > 0.0;
        if options.record_decisions {
            log.push(Decision {
                cluster_id: cluster.id,
                node: v,
                reference_neighbors: in_reference,
                expansion_neighbors: in_expansion,
                mcd,
                k: criterion.k,
                degree_test,
                modularity_after: q,
                admitted,
            });
        }
        if admitted {
            expansion.set(v.index());
            internal += in_expansion;
            degree_sum += nbrs.len();
            added.push(v);
            // Only the expansion-relative test can be unlocked by a new member.
            if !options.frozen_reference {
                for &u in nbrs {
                    push(u, r, &mut heap, &expansion);
                }
            }
        }
    }
    (added, log)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiAssignmentReport {
    /// clusters-per-node -> node count, over nodes in at least one cluster.
    pub histogram: BTreeMap<u32, usize>,
    /// The same histogram split by total-degree group (groups 1..=5).
    pub by_degree_group: Vec<BTreeMap<u32, usize>>,
    pub clustered_nodes: usize,
    pub multi_assigned_nodes: usize,
}

pub fn multi_assignment_report(graph: &CitationGraph, clustering: &Clustering) -> MultiAssignmentReport {
    let mut report = MultiAssignmentReport {
        by_degree_group: vec![BTreeMap::new(); 5],
        ..Default::default()
    };
    for (i, &count) in clustering.membership_counts().iter().enumerate() {
        if count == 0 {
            continue;
        }
        *report.histogram.entry(count).or_default() += 1;
        let group = degree_group_of(graph.degree(NodeId(i as u32)));
        *report.by_degree_group[group].entry(count).or_default() += 1;
        report.clustered_nodes += 1;
        if count >= 2 {
            report.multi_assigned_nodes += 1;
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub cluster_id: u32,
    pub size_before: usize,
    pub size_after: usize,
    pub percent_increase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    pub unchanged: usize,
    pub increased: usize,
}

pub fn cluster_growth_report(before: &Clustering, after: &Clustering) -> Result<GrowthReport> {
    let ids = |c: &Clustering| c.clusters.iter().map(|c| c.id).collect::<Vec<_>>();
    if ids(before) != ids(after) {
        return Err(Error::InvalidInput("clusterings do not share cluster ids".into()));
    }
    let rows: Vec<GrowthRow> = before
        .clusters
        .iter()
        .zip(&after.clusters)
        .map(|(b, a)| GrowthRow {
            cluster_id: b.id,
            size_before: b.members.len(),
            size_after: a.members.len(),
            percent_increase: if b.members.is_empty() {
                0.0
            } else {
                100.0 * (a.members.len() as f64 - b.members.len() as f64) / b.members.len() as f64
            },
        })
        .collect();
    let unchanged = rows.iter().filter(|r| r.size_after == r.size_before).count();
    Ok(GrowthReport {
        increased: rows.iter().filter(|r| r.size_after > r.size_before).count(),
        unchanged,
        rows,
    })
}
