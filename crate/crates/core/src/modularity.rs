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

//! Per-cluster Newman modularity on the undirected view.
//!
//! For a member set `C` in a graph with `m` undirected edges,
//! `Q(C) = l_C / m - (d_C / 2m)^2` where `l_C` counts edges with both
//! endpoints in `C` and `d_C` sums the undirected degrees of the members.

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, NodeId};

/// Evaluates `Q` from precomputed counts.
#[inline]
pub fn modularity_from_counts(internal_edges: usize, degree_sum: usize, total_edges: usize) -> f64 {
    let m = total_edges as f64;
    let frac = degree_sum as f64 / (2.0 * m);
    internal_edges as f64 / m - frac * frac
}

/// Internal undirected edges and degree sum of `members` (sorted or not,
/// duplicates ignored).
pub fn cluster_counts(graph: &CitationGraph, members: &[NodeId]) -> (usize, usize) {
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut degree_sum = 0;
    let mut twice_internal = 0;
    for &v in &sorted {
        let nbrs = graph.neighbors(v);
        degree_sum += nbrs.len();
        twice_internal += nbrs.iter().filter(|u| sorted.binary_search(u).is_ok()).count();
    }
    (twice_internal / 2, degree_sum)
}

pub fn cluster_modularity(graph: &CitationGraph, members: &[NodeId]) -> Result<f64> {
    let m = graph.undirected_edge_count();
    if m == 0 {
        return Err(Error::UndefinedModularity);
    }
    if members.is_empty() {
        return Err(Error::InvalidArgument("modularity of an empty member set".into()));
    }
    let (l, d) = cluster_counts(graph, members);
    Ok(modularity_from_counts(l, d, m))
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

    #[test]
    fn whole_graph_is_zero() {
        let g = CitationGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let all: Vec<NodeId> = g.nodes().collect();
        assert!(cluster_modularity(&g, &all).unwrap().abs() < 1e-15);
    }

    #[test]
    fn single_node_is_negative() {
        let g = CitationGraph::from_edges(4, [(0, 1), (0, 2), (2, 3)]);
        let q = cluster_modularity(&g, &[NodeId(0)]).unwrap();
        assert!((q + (2.0f64 / 6.0).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn k5_in_k5_bridge_k4() {
        let mut e = Vec::new();
        clique(&[0, 1, 2, 3, 4], &mut e);
        clique(&[5, 6, 7, 8], &mut e);
        e.push((4, 5));
        let g = CitationGraph::from_edges(9, e);
        let k5: Vec<NodeId> = (0..5).map(NodeId).collect();
        let q = cluster_modularity(&g, &k5).unwrap();
        assert!((q - (10.0 / 17.0 - (21.0f64 / 34.0).powi(2))).abs() < 1e-12);
        assert!((q - 0.2068).abs() < 1e-4);
    }

    #[test]
    fn edgeless_graph_is_an_error() {
        let g = CitationGraph::from_edges(2, []);
        assert!(matches!(
            cluster_modularity(&g, &[NodeId(0)]),
            Err(Error::UndefinedModularity)
        ));
    }
}
