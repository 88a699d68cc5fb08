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

//! Stand-alone km-validity checks for any clustering.
//!
//! Written against the raw adjacency with hash sets, sharing no code with
//! the clustering algorithms, so it can audit their output.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::graph::{CitationGraph, NodeId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterCheck {
    pub cluster_id: u32,
    pub size: usize,
    pub connected: bool,
    pub min_degree: usize,
    pub modularity: f64,
    pub passed: bool,
    /// Recorded MCD this cluster was compared against, when supplied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_mcd: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub k: u32,
    pub clusters: Vec<ClusterCheck>,
    pub failed: usize,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub fn check_cluster(graph: &CitationGraph, cluster_id: u32, members: &[NodeId], k: u32) -> ClusterCheck {
    let set: HashSet<NodeId> = members.iter().copied().collect();

    let min_degree = set
        .iter()
        .map(|&v| graph.neighbors(v).iter().filter(|u| set.contains(u)).count())
        .min()
        .unwrap_or(0);

    let connected = match set.iter().next() {
        None => false,
        Some(&start) => {
            let mut seen = HashSet::from([start]);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for u in graph.neighbors(v) {
                    if set.contains(u) && seen.insert(*u) {
                        queue.push_back(*u);
                    }
                }
            }
            seen.len() == set.len()
        }
    };

    let m = graph.undirected_edge_count() as f64;
    let mut internal = 0usize;
    let mut degree_sum = 0usize;
    for &v in &set {
        degree_sum += graph.neighbors(v).len();
        internal += graph
            .neighbors(v)
            .iter()
            .filter(|&&u| u > v && set.contains(&u))
            .count();
    }
    let modularity = if m == 0.0 {
        f64::NAN
    } else {
        internal as f64 / m - (degree_sum as f64 / (2.0 * m)).powi(2)
    };

    ClusterCheck {
        cluster_id,
        size: set.len(),
        connected,
        min_degree,
        modularity,
        passed: connected && min_degree >= k as usize && modularity > 0.0,
        expected_mcd: None,
    }
}

/// Checks every cluster for connectivity, minimum induced degree `>= k` and
/// positive modularity. When `expected_mcd` is given (cluster id, MCD), a
/// cluster whose recomputed minimum degree differs also fails.
pub fn validate(
    graph: &CitationGraph,
    clustering: &Clustering,
    k: u32,
    expected_mcd: Option<&[(u32, usize)]>,
) -> ValidationReport {
    let clusters: Vec<ClusterCheck> = clustering
        .clusters
        .iter()
        .map(|c| {
            let mut check = check_cluster(graph, c.id, &c.members, k);
            if let Some(expected) = expected_mcd {
                let want = expected.iter().find(|(id, _)| *id == c.id).map(|&(_, m)| m);
                check.expected_mcd = want;
                if want != Some(check.min_degree) {
                    check.passed = false;
                }
            }
            check
        })
        .collect();
    let failed = clusters.iter().filter(|c| !c.passed).count();
    ValidationReport { k, clusters, failed }
}
