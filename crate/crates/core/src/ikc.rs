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

//! Iterative k-core clustering.
//!
//! Each round takes the nodes still unassigned, finds the degeneracy `d` of
//! the subgraph they induce, and splits its `d`-core into connected
//! components. Components with positive modularity against the full input
//! graph become clusters; the others are logged as rejected. All `d`-core
//! nodes leave the working set either way, and rounds continue until the
//! working set's degeneracy drops below the requested `k`.

use serde::{Deserialize, Serialize};

use crate::clustering::{describe, Cluster, Clustering, Provenance};
use crate::error::{Error, Result};
use crate::graph::{CitationGraph, NodeId};
use crate::kcore::{connected_components, subset_core_numbers};
use crate::modularity::{cluster_counts, modularity_from_counts};
use crate::parallel::map_ordered;

/// A `d`-core component discarded for non-positive modularity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RejectedComponent {
    pub round: usize,
    pub extraction_k: u32,
    pub modularity: f64,
    pub members: Vec<NodeId>,
}

#[derive(Clone, Debug)]
pub struct IkcOutput {
    pub clustering: Clustering,
    pub rejected: Vec<RejectedComponent>,
    pub rounds: usize,
}

pub fn ikc(graph: &CitationGraph, k: u32) -> Result<IkcOutput> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut clustering = Clustering::empty(graph, Some(k));
    let mut rejected = Vec::new();
    let total_edges = graph.undirected_edge_count();
    let mut working: Vec<NodeId> = graph.nodes().collect();
    let mut removed = vec![false; graph.node_count()];
    let mut rounds = 0;

    while !working.is_empty() {
        let cores = subset_core_numbers(graph, &working);
        let degeneracy = cores.iter().map(|&(_, c)| c).max().unwrap_or(0);
        if degeneracy < k {
            break;
        }
        rounds += 1;
        let top: Vec<NodeId> = cores
            .iter()
            .filter(|&&(_, c)| c == degeneracy)
            .map(|&(v, _)| v)
            .collect();
        let components = connected_components(graph, &top);
        let scores = map_ordered(&components, |members| {
            let (l, d) = cluster_counts(graph, members);
            modularity_from_counts(l, d, total_edges)
        });

        for (members, q) in components.into_iter().zip(scores) {
            if q > 0.0 {
                let id = clustering.clusters.len() as u32;
                let meta = describe(graph, &members, Some(degeneracy), Provenance::Ikc);
                clustering.clusters.push(Cluster {
                    id,
                    members,
                    added: Vec::new(),
                    meta,
                });
            } else {
                rejected.push(RejectedComponent {
                    round: rounds,
                    extraction_k: degeneracy,
                    modularity: q,
                    members,
                });
            }
        }

        for v in &top {
            removed[v.index()] = true;
        }
        working.retain(|v| !removed[v.index()]);
    }

    Ok(IkcOutput {
        clustering,
        rejected,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clique(v: &[u32], e: &mut Vec<(u32, u32)>) {
        for (i, &a) in v.iter().enumerate() {
            for &b in &v[i + 1..] {
                e.push((a, b));
            }
        }
    }

    fn ids(r: std::ops::Range<u32>) -> Vec<NodeId> {
        r.map(NodeId).collect()
    }

    #[test]
    fn k5_bridge_k4() {
        let mut e = Vec::new();
        clique(&[0, 1, 2, 3, 4], &mut e);
        clique(&[5, 6, 7, 8], &mut e);
        e.push((4, 5));
        let g = CitationGraph::from_edges(9, e);
        let out = ikc(&g, 3).unwrap();
        let c = &out.clustering.clusters;
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].members, ids(0..5));
        assert_eq!((c[0].meta.extraction_k, c[0].meta.mcd), (Some(4), 4));
        assert_eq!(c[1].members, ids(5..9));
        assert_eq!((c[1].meta.extraction_k, c[1].meta.mcd), (Some(3), 3));
        assert!(c.iter().all(|c| c.meta.modularity > 0.0));
        assert!(out.rejected.is_empty());
    }

    #[test]
    fn below_degeneracy_gives_singletons() {
        let mut e = Vec::new();
        clique(&[0, 1, 2, 3, 4], &mut e);
        let g = CitationGraph::from_edges(5, e);
        let out = ikc(&g, 5).unwrap();
        assert!(out.clustering.is_empty());
        assert_eq!(out.clustering.singletons().len(), 5);

        let empty = CitationGraph::from_edges(0, []);
        assert!(ikc(&empty, 1).unwrap().clustering.is_empty());
        assert!(ikc(&g, 0).is_err());
    }

    #[test]
    fn whole_graph_core_is_rejected() {
        // A lone K4 is its own whole graph: modularity 0, so it is rejected.
        let mut e = Vec::new();
        clique(&[0, 1, 2, 3], &mut e);
        let g = CitationGraph::from_edges(4, e);
        let out = ikc(&g, 2).unwrap();
        assert!(out.clustering.is_empty());
        assert_eq!(out.rejected.len(), 1);
        assert!(out.rejected[0].modularity.abs() < 1e-12);
    }

    #[test]
    fn ties_in_one_round_order_by_size_then_id() {
        let mut e = Vec::new();
        clique(&[10, 11, 12, 13], &mut e);
        clique(&[0, 1, 2, 3], &mut e);
        clique(&[20, 21, 22, 23], &mut e);
        e.extend([(3, 4), (4, 5), (5, 10)]);
        let g = CitationGraph::from_edges(24, e);
        let out = ikc(&g, 3).unwrap();
        let firsts: Vec<u32> = out.clustering.clusters.iter().map(|c| c.members[0].0).collect();
        assert_eq!(firsts, vec![0, 10, 20]);
        assert_eq!(out.rounds, 1);
    }
}
