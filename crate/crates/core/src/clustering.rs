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

//! Cluster collections shared by IKC and AOC, their CSV/JSON formats, and
//! summary statistics.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, NodeId};
use crate::kcore::min_induced_degree;
use crate::modularity::{cluster_counts, modularity_from_counts};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Ikc,
    AocM,
    AocK,
    /// Read from a cluster file of unknown origin.
    Imported,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterMeta {
    pub size: usize,
    /// Minimum induced undirected degree over the members.
    pub mcd: usize,
    pub modularity: f64,
    /// Degeneracy of the working set when the core was extracted.
    pub extraction_k: Option<u32>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub id: u32,
    /// Sorted, distinct.
    pub members: Vec<NodeId>,
    /// Members admitted by expansion; sorted subset of `members`.
    pub added: Vec<NodeId>,
    pub meta: ClusterMeta,
}

impl Cluster {
    /// Builds a cluster and computes its size, MCD and modularity.
    /// Modularity is NaN when the graph has no edges.
    pub fn new(
        graph: &CitationGraph,
        id: u32,
        mut members: Vec<NodeId>,
        extraction_k: Option<u32>,
        provenance: Provenance,
    ) -> Self {
        members.sort_unstable();
        members.dedup();
        let meta = describe(graph, &members, extraction_k, provenance);
        Cluster {
            id,
            members,
            added: Vec::new(),
            meta,
        }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Members that were not added by expansion.
    pub fn core_members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members
            .iter()
            .copied()
            .filter(move |v| self.added.binary_search(v).is_err())
    }
}

pub(crate) fn describe(
    graph: &CitationGraph,
    members: &[NodeId],
    extraction_k: Option<u32>,
    provenance: Provenance,
) -> ClusterMeta {
    let m = graph.undirected_edge_count();
    let modularity = if m == 0 || members.is_empty() {
        f64::NAN
    } else {
        let (l, d) = cluster_counts(graph, members);
        modularity_from_counts(l, d, m)
    };
    ClusterMeta {
        size: members.len(),
        mcd: min_induced_degree(graph, members),
        modularity,
        extraction_k,
        provenance,
    }
}

/// A set of possibly overlapping clusters over one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    /// Ascending by id.
    pub clusters: Vec<Cluster>,
    /// The `k` the clustering was built with, when known.
    pub k: Option<u32>,
    pub node_count: usize,
    pub graph_fingerprint: String,
}

impl Clustering {
    pub fn empty(graph: &CitationGraph, k: Option<u32>) -> Self {
        Clustering {
            clusters: Vec::new(),
            k,
            node_count: graph.node_count(),
            graph_fingerprint: graph.fingerprint(),
        }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&Cluster> {
        self.clusters
            .binary_search_by_key(&id, |c| c.id)
            .ok()
            .map(|i| &self.clusters[i])
    }

    /// Number of clusters containing each node.
    pub fn membership_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.node_count];
        for c in &self.clusters {
            for v in &c.members {
                counts[v.index()] += 1;
            }
        }
        counts
    }

    /// Cluster ids containing each node, ascending.
    pub fn assignment(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.node_count];
        for c in &self.clusters {
            for v in &c.members {
                out[v.index()].push(c.id);
            }
        }
        out
    }

    pub fn singletons(&self) -> Vec<NodeId> {
        self.membership_counts()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0)
            .map(|(i, _)| NodeId(i as u32))
            .collect()
    }

    pub fn is_disjoint(&self) -> bool {
        self.membership_counts().iter().all(|&c| c <= 1)
    }

    pub fn covered_nodes(&self) -> usize {
        self.membership_counts().iter().filter(|&&c| c > 0).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub cluster_id: u32,
    pub size: usize,
    pub mcd: usize,
    pub modularity: f64,
    pub extraction_k: Option<u32>,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub added: Option<usize>,
}

pub fn summaries(clustering: &Clustering) -> Vec<ClusterSummary> {
    clustering
        .clusters
        .iter()
        .map(|c| {
            let expanded = matches!(c.meta.provenance, Provenance::AocM | Provenance::AocK);
            ClusterSummary {
                cluster_id: c.id,
                size: c.meta.size,
                mcd: c.meta.mcd,
                modularity: c.meta.modularity,
                extraction_k: c.meta.extraction_k,
                provenance: c.meta.provenance,
                core_size: expanded.then(|| c.members.len() - c.added.len()),
                added: expanded.then_some(c.added.len()),
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(clustering: &Clustering, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &summaries(clustering)).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

/// Writes `cluster_id,node_key` rows (plus `,origin` with `core|added` when
/// `with_origin`). Clusters ascend by id, members by internal id.
pub fn write_clusters<W: Write>(
    clustering: &Clustering,
    graph: &CitationGraph,
    mut out: W,
    with_origin: bool,
    comment: Option<&str>,
) -> Result<()> {
    if let Some(c) = comment {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    if with_origin {
        writeln!(out, "cluster_id,node_key,origin")?;
    } else {
        writeln!(out, "cluster_id,node_key")?;
    }
    for c in &clustering.clusters {
        for &v in &c.members {
            if with_origin {
                let origin = if c.added.binary_search(&v).is_ok() {
                    "added"
                } else {
                    "core"
                };
                writeln!(out, "{},{},{}", c.id, graph.key(v), origin)?;
            } else {
                writeln!(out, "{},{}", c.id, graph.key(v))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a cluster file written by [`write_clusters`] or any file with
/// `cluster_id,node_key[,origin]` rows. Metadata is recomputed against
/// `graph`; provenance is [`Provenance::Imported`].
pub fn read_clusters<R: BufRead>(reader: R, graph: &CitationGraph, origin: &str) -> Result<Clustering> {
    let mut rows: BTreeMap<u32, (Vec<NodeId>, Vec<NodeId>)> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with("cluster_id") {
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::parse(origin, line_no, "expected `cluster_id,node_key[,origin]`"));
        }
        let id: u32 = fields[0]
            .parse()
            .map_err(|_| Error::parse(origin, line_no, format!("bad cluster id `{}`", fields[0])))?;
        let v = graph
            .id_of(fields[1])
            .ok_or_else(|| Error::parse(origin, line_no, format!("node `{}` is not in the graph", fields[1])))?;
        let added = match fields.get(2).copied() {
            None | Some("core") => false,
            Some("added") => true,
            Some(other) => return Err(Error::parse(origin, line_no, format!("bad origin `{other}`"))),
        };
        let entry = rows.entry(id).or_default();
        entry.0.push(v);
        if added {
            entry.1.push(v);
        }
    }
    let clusters = rows
        .into_iter()
        .map(|(id, (members, mut added))| {
            let mut c = Cluster::new(graph, id, members, None, Provenance::Imported);
            added.sort_unstable();
            added.dedup();
            c.added = added;
            c
        })
        .collect();
    Ok(Clustering {
        clusters,
        k: None,
        node_count: graph.node_count(),
        graph_fingerprint: graph.fingerprint(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub min: usize,
    pub median: f64,
    pub max: usize,
}

fn spread(mut values: Vec<usize>) -> Option<Spread> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let n = values.len();
    let median = if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    };
    Some(Spread {
        min: values[0],
        median,
        max: values[n - 1],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteringStats {
    pub cluster_count: usize,
    pub node_count: usize,
    pub covered_nodes: usize,
    pub coverage: f64,
    pub size: Option<Spread>,
    pub mcd: Option<Spread>,
    pub clusters: Vec<ClusterSummary>,
}

pub fn clustering_stats(clustering: &Clustering, graph: &CitationGraph) -> ClusteringStats {
    let covered = clustering.covered_nodes();
    let n = graph.node_count();
    ClusteringStats {
        cluster_count: clustering.len(),
        node_count: n,
        covered_nodes: covered,
        coverage: if n == 0 { 0.0 } else { covered as f64 / n as f64 },
        size: spread(clustering.clusters.iter().map(|c| c.meta.size).collect()),
        mcd: spread(clustering.clusters.iter().map(|c| c.meta.mcd).collect()),
        clusters: summaries(clustering),
    }
}
