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

//! Core decomposition by bucket peeling on the undirected view, plus
//! k-core extraction and connected components on induced subgraphs.
//!
//! Every function here works on an arbitrary node subset. Degrees are the
//! induced degrees within that subset, recomputed on each call.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::{CitationGraph, NodeId};

const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreDecomposition {
    core: Vec<u32>,
    degeneracy: u32,
}

impl CoreDecomposition {
    pub fn core_number(&self, v: NodeId) -> u32 {
        self.core[v.index()]
    }

    pub fn core_numbers(&self) -> &[u32] {
        &self.core
    }

    pub fn degeneracy(&self) -> u32 {
        self.degeneracy
    }
}

/// A sorted, deduplicated node subset with a dense local index.
struct Subset {
    nodes: Vec<NodeId>,
    local: Vec<u32>,
}

impl Subset {
    fn new(graph: &CitationGraph, nodes: &[NodeId]) -> Self {
        let mut nodes = nodes.to_vec();
        if !nodes.windows(2).all(|w| w[0] < w[1]) {
            nodes.sort_unstable();
            nodes.dedup();
        }
        let mut local = vec![ABSENT; graph.node_count()];
        for (i, v) in nodes.iter().enumerate() {
            local[v.index()] = i as u32;
        }
        Subset { nodes, local }
    }

    fn full(graph: &CitationGraph) -> Self {
        let n = graph.node_count();
        Subset {
            nodes: graph.nodes().collect(),
            local: (0..n as u32).collect(),
        }
    }

    #[inline]
    fn local_neighbors<'g>(&'g self, graph: &'g CitationGraph, i: usize) -> impl Iterator<Item = usize> + 'g {
        graph
            .neighbors(self.nodes[i])
            .iter()
            .map(move |u| self.local[u.index()])
            .filter(|&j| j != ABSENT)
            .map(|j| j as usize)
    }
}

/// Batagelj-Zaversnik peeling over local indices. Nodes inside a degree bin
/// are visited in ascending id order.
fn peel(graph: &CitationGraph, sub: &Subset) -> Vec<u32> {
    let s = sub.nodes.len();
    if s == 0 {
        return Vec::new();
    }
    let mut deg: Vec<u32> = (0..s).map(|i| sub.local_neighbors(graph, i).count() as u32).collect();
    let max_deg = *deg.iter().max().unwrap() as usize;

    // bin[d] = start of degree-d block in `vert`
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin[d as usize + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut vert = vec![0u32; s];
    let mut pos = vec![0usize; s];
    {
        let mut next = bin.clone();
        for i in 0..s {
            let d = deg[i] as usize;
            pos[i] = next[d];
            vert[next[d]] = i as u32;
            next[d] += 1;
        }
    }

    for idx in 0..s {
        let v = vert[idx] as usize;
        let dv = deg[v];
        for u in sub.local_neighbors(graph, v) {
            let du = deg[u];
            if du > dv {
                let du = du as usize;
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw] as usize;
                if u != w {
                    vert.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

/// Core number of every node on the undirected view, in O(n + m).
pub fn core_numbers(graph: &CitationGraph) -> CoreDecomposition {
    let core = peel(graph, &Subset::full(graph));
    let degeneracy = core.iter().copied().max().unwrap_or(0);
    CoreDecomposition { core, degeneracy }
}

/// Core numbers of the subgraph induced by `subset`, returned as
/// `(node, core_number)` pairs in ascending node order.
pub fn subset_core_numbers(graph: &CitationGraph, subset: &[NodeId]) -> Vec<(NodeId, u32)> {
    let sub = Subset::new(graph, subset);
    let core = peel(graph, &sub);
    sub.nodes.into_iter().zip(core).collect()
}

/// Components of the maximal subset of `subset` whose induced minimum
/// degree is at least `k`. Ordered by decreasing size, then smallest id.
pub fn k_core_components(graph: &CitationGraph, subset: &[NodeId], k: usize) -> Vec<Vec<NodeId>> {
    let sub = Subset::new(graph, subset);
    let s = sub.nodes.len();
    let mut deg: Vec<usize> = (0..s).map(|i| sub.local_neighbors(graph, i).count()).collect();
    let mut alive = vec![true; s];
    let mut queue: VecDeque<usize> = (0..s).filter(|&i| deg[i] < k).collect();
    for &i in &queue {
        alive[i] = false;
    }
    while let Some(v) = queue.pop_front() {
        for u in sub.local_neighbors(graph, v) {
            if alive[u] {
                deg[u] -= 1;
                if deg[u] < k {
                    alive[u] = false;
                    queue.push_back(u);
                }
            }
        }
    }
    let survivors: Vec<NodeId> = (0..s).filter(|&i| alive[i]).map(|i| sub.nodes[i]).collect();
    components_of(graph, &Subset::new(graph, &survivors))
}

/// Weakly connected components of the subgraph induced by `subset`.
/// Ordered by decreasing size, then smallest id; each component sorted.
pub fn connected_components(graph: &CitationGraph, subset: &[NodeId]) -> Vec<Vec<NodeId>> {
    components_of(graph, &Subset::new(graph, subset))
}

fn components_of(graph: &CitationGraph, sub: &Subset) -> Vec<Vec<NodeId>> {
    let s = sub.nodes.len();
    let mut seen = vec![false; s];
    let mut comps = Vec::new();
    let mut queue = VecDeque::new();
    // Seeds go in ascending id order, so comps[i][0] is its minimum id once sorted.
    for start in 0..s {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(sub.nodes[v]);
            for u in sub.local_neighbors(graph, v) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    comps
}

/// Minimum induced undirected degree over `members` (0 for an empty set).
pub fn min_induced_degree(graph: &CitationGraph, members: &[NodeId]) -> usize {
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted
        .iter()
        .map(|&v| {
            graph
                .neighbors(v)
                .iter()
                .filter(|u| sorted.binary_search(u).is_ok())
                .count()
        })
        .min()
        .unwrap_or(0)
}
