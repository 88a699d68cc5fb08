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

//! Immutable citation graph with directed and undirected adjacency views.
//!
//! Nodes carry dense internal ids `0..n` and an opaque external key. Edges
//! are simple: duplicates collapse and self-loops are dropped when the graph
//! is built. Three compressed adjacency arrays are kept: out-neighbors,
//! in-neighbors and the undirected union of both, each sorted by id.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Dense internal node id.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[repr(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    #[inline]
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug)]
enum Keys {
    /// Key of node `i` is its decimal id. Used by generated graphs.
    Implicit,
    Explicit {
        keys: Vec<String>,
        index: HashMap<String, NodeId>,
    },
}

#[derive(Clone, Debug)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Csr {
    #[inline]
    fn row(&self, v: NodeId) -> &[NodeId] {
        let i = v.index();
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    fn len_of(&self, v: NodeId) -> usize {
        let i = v.index();
        self.offsets[i + 1] - self.offsets[i]
    }
}

/// A simple directed graph with a cached undirected view.
#[derive(Clone, Debug)]
pub struct CitationGraph {
    n: usize,
    out: Csr,
    inc: Csr,
    und: Csr,
    keys: Keys,
}

impl CitationGraph {
    /// Builds a graph on nodes `0..n` whose keys are the decimal ids.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let packed = edges
            .into_iter()
            .map(|(a, b)| {
                assert!(
                    (a as usize) < n && (b as usize) < n,
                    "edge ({a}, {b}) out of range for n={n}"
                );
                pack(a, b)
            })
            .collect();
        Self::from_packed(n, packed, Keys::Implicit)
    }

    /// Builds from packed `(source << 32) | target` codes. Sorts and dedups
    /// in place; loops are removed.
    fn from_packed(n: usize, mut packed: Vec<u64>, keys: Keys) -> Self {
        packed.sort_unstable();
        packed.dedup();
        packed.retain(|&e| {
            let (a, b) = unpack(e);
            a != b
        });

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &e in &packed {
            let (a, b) = unpack(e);
            out_offsets[a as usize + 1] += 1;
            in_offsets[b as usize + 1] += 1;
        }
        prefix_sum(&mut out_offsets);
        prefix_sum(&mut in_offsets);

        let m = packed.len();
        let mut out_targets = Vec::with_capacity(m);
        let mut in_sources = vec![NodeId(0); m];
        let mut cursor = in_offsets.clone();
        // Edges are in (source, target) order, so each in-row fills in
        // ascending source order.
        for &e in &packed {
            let (a, b) = unpack(e);
            out_targets.push(NodeId(b));
            let slot = &mut cursor[b as usize];
            in_sources[*slot] = NodeId(a);
            *slot += 1;
        }
        drop(packed);

        let out = Csr {
            offsets: out_offsets,
            targets: out_targets,
        };
        let inc = Csr {
            offsets: in_offsets,
            targets: in_sources,
        };
        let und = merge_views(n, &out, &inc);

        CitationGraph { n, out, inc, und, keys }
    }

    pub(crate) fn from_packed_codes(n: usize, packed: Vec<u64>) -> Self {
        Self::from_packed(n, packed, Keys::Implicit)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of distinct directed edges.
    pub fn edge_count(&self) -> usize {
        self.out.targets.len()
    }

    /// Number of unordered adjacent pairs; a reciprocal pair counts once.
    pub fn undirected_edge_count(&self) -> usize {
        self.und.targets.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.n as u32).map(NodeId)
    }

    #[inline]
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        self.out.row(v)
    }

    #[inline]
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        self.inc.row(v)
    }

    /// Distinct undirected neighbors, sorted.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        self.und.row(v)
    }

    #[inline]
    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out.len_of(v)
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        self.inc.len_of(v)
    }

    /// Total degree, `in_degree + out_degree`.
    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.out.len_of(v) + self.inc.len_of(v)
    }

    /// Number of distinct undirected neighbors.
    #[inline]
    pub fn undirected_degree(&self, v: NodeId) -> usize {
        self.und.len_of(v)
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.out_neighbors(from).binary_search(&to).is_ok()
    }

    /// Directed edges in (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    pub fn key(&self, v: NodeId) -> Cow<'_, str> {
        match &self.keys {
            Keys::Implicit => Cow::Owned(v.0.to_string()),
            Keys::Explicit { keys, .. } => Cow::Borrowed(&keys[v.index()]),
        }
    }

    pub fn id_of(&self, key: &str) -> Option<NodeId> {
        match &self.keys {
            Keys::Implicit => key.parse::<u32>().ok().filter(|&i| (i as usize) < self.n).map(NodeId),
            Keys::Explicit { index, .. } => index.get(key).copied(),
        }
    }

    /// Builds a graph with the same keys as `self` on the given edges.
    pub fn with_edges<I>(&self, edges: I) -> CitationGraph
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let packed = edges.into_iter().map(|(a, b)| pack(a.0, b.0)).collect();
        Self::from_packed(self.n, packed, self.keys.clone())
    }

    /// Induced subgraph on `keep` (sorted, distinct). Node keys are kept and
    /// ids are reassigned densely in ascending old-id order.
    pub fn induced(&self, keep: &[NodeId]) -> CitationGraph {
        let mut new_id = vec![u32::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v.index()] = i as u32;
        }
        let mut packed = Vec::new();
        for &u in keep {
            let nu = new_id[u.index()];
            for &v in self.out_neighbors(u) {
                let nv = new_id[v.index()];
                if nv != u32::MAX {
                    packed.push(pack(nu, nv));
                }
            }
        }
        let keys = {
            let keys: Vec<String> = keep.iter().map(|&v| self.key(v).into_owned()).collect();
            let index = keys
                .iter()
                .enumerate()
                .map(|(i, k)| (k.clone(), NodeId(i as u32)))
                .collect();
            Keys::Explicit { keys, index }
        };
        Self::from_packed(keep.len(), packed, keys)
    }

    /// Hex digest over the node count, keys and directed edge list.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.n as u64).to_le_bytes());
        for v in self.nodes() {
            let k = self.key(v);
            hasher.update((k.len() as u64).to_le_bytes());
            hasher.update(k.as_bytes());
        }
        for &o in &self.out.offsets {
            hasher.update((o as u64).to_le_bytes());
        }
        for t in &self.out.targets {
            hasher.update(t.0.to_le_bytes());
        }
        let digest = hasher.finalize();
        digest[..16].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Approximate heap footprint of the adjacency and key storage in bytes.
    pub fn heap_size(&self) -> usize {
        let csr = |c: &Csr| {
            c.offsets.capacity() * std::mem::size_of::<usize>() + c.targets.capacity() * std::mem::size_of::<NodeId>()
        };
        let keys = match &self.keys {
            Keys::Implicit => 0,
            Keys::Explicit { keys, index } => {
                keys.iter().map(|k| k.capacity() + 24).sum::<usize>()
                    + index.capacity() * (24 + 4 + 8)
                    + keys.iter().map(|k| k.len()).sum::<usize>()
            }
        };
        csr(&self.out) + csr(&self.inc) + csr(&self.und) + keys
    }
}

/// Incremental construction from keyed edges. Ids are assigned in
/// first-seen order.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    keys: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: Vec<u64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, key: &str) -> NodeId {
        if let Some(&id) = self.index.get(key) {
            return id;
        }
        let id = NodeId(self.keys.len() as u32);
        self.keys.push(key.to_string());
        self.index.insert(key.to_string(), id);
        id
    }

    pub fn add_edge(&mut self, citing: &str, cited: &str) {
        let a = self.intern(citing);
        let b = self.intern(cited);
        self.edges.push(pack(a.0, b.0));
    }

    pub fn node_count(&self) -> usize {
        self.keys.len()
    }

    pub fn build(self) -> CitationGraph {
        let n = self.keys.len();
        CitationGraph::from_packed(
            n,
            self.edges,
            Keys::Explicit {
                keys: self.keys,
                index: self.index,
            },
        )
    }
}

/// Per-node publication metadata, indexed by internal id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodeMetadata {
    years: Vec<Option<i32>>,
    dois: Vec<Option<String>>,
}

impl NodeMetadata {
    pub fn new(n: usize) -> Self {
        NodeMetadata {
            years: vec![None; n],
            dois: vec![None; n],
        }
    }

    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    pub fn year(&self, v: NodeId) -> Option<i32> {
        self.years.get(v.index()).copied().flatten()
    }

    pub fn doi(&self, v: NodeId) -> Option<&str> {
        self.dois.get(v.index()).and_then(|d| d.as_deref())
    }

    pub fn set_year(&mut self, v: NodeId, year: Option<i32>) {
        self.years[v.index()] = year;
    }

    pub fn set_doi(&mut self, v: NodeId, doi: Option<String>) {
        self.dois[v.index()] = doi;
    }

    /// Restricts to `keep` (sorted old ids), renumbering densely.
    pub fn restrict(&self, keep: &[NodeId]) -> NodeMetadata {
        NodeMetadata {
            years: keep.iter().map(|&v| self.year(v)).collect(),
            dois: keep.iter().map(|&v| self.doi(v).map(str::to_string)).collect(),
        }
    }
}

/// Lower bounds of the total-degree groups; the last group is unbounded.
pub const DEGREE_GROUP_BOUNDS: [usize; 5] = [0, 100, 1_000, 10_000, 100_000];

/// Zero-based degree group of a total degree.
pub fn degree_group_of(degree: usize) -> usize {
    DEGREE_GROUP_BOUNDS.iter().rposition(|&lo| degree >= lo).unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeGroupReport {
    /// Node counts for groups 1..=5.
    pub counts: [usize; 5],
}

/// Partitions nodes by total degree into `[0,100)`, `[100,1000)`,
/// `[1000,10000)`, `[10000,100000)` and `[100000, inf)`.
pub fn degree_groups(graph: &CitationGraph) -> DegreeGroupReport {
    let mut counts = [0usize; 5];
    for v in graph.nodes() {
        counts[degree_group_of(graph.degree(v))] += 1;
    }
    DegreeGroupReport { counts }
}

/// Nodes of the largest weakly connected component; ties go to the
/// component holding the smallest id.
pub fn largest_connected_component(graph: &CitationGraph) -> Vec<NodeId> {
    let all: Vec<NodeId> = graph.nodes().collect();
    crate::kcore::connected_components(graph, &all)
        .into_iter()
        .next()
        .unwrap_or_default()
}

#[inline]
pub(crate) fn pack(a: u32, b: u32) -> u64 {
    ((a as u64) << 32) | b as u64
}

#[inline]
pub(crate) fn unpack(e: u64) -> (u32, u32) {
    ((e >> 32) as u32, e as u32)
}

fn prefix_sum(v: &mut [usize]) {
    for i in 1..v.len() {
        v[i] += v[i - 1];
    }
}

fn merge_views(n: usize, out: &Csr, inc: &Csr) -> Csr {
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::with_capacity(out.targets.len() * 2);
    offsets.push(0);
    for v in 0..n {
        let v = NodeId(v as u32);
        let (a, b) = (out.row(v), inc.row(v));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    targets.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    targets.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    targets.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        targets.extend_from_slice(&a[i..]);
        targets.extend_from_slice(&b[j..]);
        offsets.push(targets.len());
    }
    targets.shrink_to_fit();
    Csr { offsets, targets }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keyed(rows: &[(&str, &str)]) -> CitationGraph {
        let mut b = GraphBuilder::new();
        for (x, y) in rows {
            b.add_edge(x, y);
        }
        b.build()
    }

    #[test]
    fn dedup_and_loops() {
        let g = keyed(&[("a", "b"), ("b", "c"), ("a", "b")]);
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        let g = keyed(&[("a", "a")]);
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
    }

    #[test]
    fn reciprocal_pair_is_one_undirected_edge() {
        let g = keyed(&[("a", "b"), ("b", "a")]);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.undirected_edge_count(), 1);
        let a = g.id_of("a").unwrap();
        assert_eq!(g.degree(a), 2);
        assert_eq!(g.undirected_degree(a), 1);
    }

    #[test]
    fn first_seen_ids_and_keys() {
        let g = keyed(&[("x", "y"), ("z", "x")]);
        assert_eq!(g.id_of("x"), Some(NodeId(0)));
        assert_eq!(g.id_of("z"), Some(NodeId(2)));
        assert_eq!(g.key(NodeId(1)), "y");
        assert_eq!(g.id_of("missing"), None);
    }

    #[test]
    fn degree_group_boundaries() {
        assert_eq!(degree_group_of(99), 0);
        assert_eq!(degree_group_of(100), 1);
        assert_eq!(degree_group_of(999), 1);
        assert_eq!(degree_group_of(1000), 2);
        assert_eq!(degree_group_of(99_999), 3);
        assert_eq!(degree_group_of(100_000), 4);
        assert_eq!(degree_group_of(usize::MAX), 4);
        let empty = CitationGraph::from_edges(0, []);
        assert_eq!(degree_groups(&empty).counts, [0; 5]);
    }

    #[test]
    fn degree_groups_five_150_2000() {
        // A hub with 5, 150 and 2000 leaves: the leaves are in group 1 too,
        // so only check the three hub nodes.
        let mut edges = Vec::new();
        let mut next = 3u32;
        for (hub, d) in [(0u32, 5u32), (1, 150), (2, 2000)] {
            for _ in 0..d {
                edges.push((hub, next));
                next += 1;
            }
        }
        let g = CitationGraph::from_edges(next as usize, edges);
        let groups: Vec<usize> = (0..3).map(|v| degree_group_of(g.degree(NodeId(v)))).collect();
        assert_eq!(groups, vec![0, 1, 2]);
    }

    #[test]
    fn lcc_tie_break_and_sizes() {
        // two triangles 0-1-2, 3-4-5 and isolated 6
        let g = CitationGraph::from_edges(7, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert_eq!(largest_connected_component(&g), vec![NodeId(0), NodeId(1), NodeId(2)]);

        let path = CitationGraph::from_edges(4, [(0, 1), (2, 1), (2, 3)]);
        assert_eq!(largest_connected_component(&path).len(), 4);

        let mut edges = Vec::new();
        for a in 0..4u32 {
            for b in a + 1..4 {
                edges.push((a, b));
            }
        }
        for a in 4..9u32 {
            for b in a + 1..9 {
                edges.push((a, b));
            }
        }
        let g = CitationGraph::from_edges(9, edges);
        let lcc = largest_connected_component(&g);
        assert_eq!(lcc, (4..9).map(NodeId).collect::<Vec<_>>());

        assert!(largest_connected_component(&CitationGraph::from_edges(0, [])).is_empty());
    }

    #[test]
    fn induced_keeps_keys() {
        let g = keyed(&[("a", "b"), ("b", "c"), ("c", "a")]);
        let sub = g.induced(&[NodeId(0), NodeId(2)]);
        assert_eq!(sub.node_count(), 2);
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(sub.key(NodeId(1)), "c");
        assert!(sub.has_edge(sub.id_of("c").unwrap(), sub.id_of("a").unwrap()));
    }

    #[test]
    fn fingerprint_tracks_structure() {
        let a = CitationGraph::from_edges(3, [(0, 1), (1, 2)]);
        let b = CitationGraph::from_edges(3, [(1, 2), (0, 1), (0, 1)]);
        let c = CitationGraph::from_edges(3, [(0, 1), (2, 1)]);
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
    }
}
