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

//! Removal of retracted and high-referencing publications.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::graph::{CitationGraph, NodeId, NodeMetadata};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurationReport {
    pub nodes_removed: usize,
    /// Directed edges with at least one removed endpoint.
    pub edges_removed: usize,
    pub retracted_matched: usize,
    pub high_referencing_matched: usize,
}

#[derive(Clone, Debug)]
pub struct Curated {
    pub graph: CitationGraph,
    pub metadata: NodeMetadata,
    /// Old id of each surviving node, indexed by new id.
    pub kept: Vec<NodeId>,
    pub report: CurationReport,
}

/// Removes every node whose DOI is in `retracted_dois` (case-insensitive
/// exact match) and every node with out-degree `>= max_references`.
///
/// Both filters are evaluated against the input degrees in a single pass.
/// Pass `None` to disable the reference filter.
pub fn curate(
    graph: &CitationGraph,
    metadata: &NodeMetadata,
    retracted_dois: &[String],
    max_references: Option<usize>,
) -> Curated {
    let retracted: HashSet<String> = retracted_dois.iter().map(|d| d.trim().to_lowercase()).collect();
    let mut removed = vec![false; graph.node_count()];
    let mut report = CurationReport::default();

    for v in graph.nodes() {
        let is_retracted = metadata
            .doi(v)
            .map(|d| retracted.contains(&d.trim().to_lowercase()))
            .unwrap_or(false);
        let is_heavy = max_references.is_some_and(|cap| graph.out_degree(v) >= cap);
        if is_retracted {
            report.retracted_matched += 1;
        }
        if is_heavy {
            report.high_referencing_matched += 1;
        }
        if is_retracted || is_heavy {
            removed[v.index()] = true;
            report.nodes_removed += 1;
        }
    }

    report.edges_removed = graph
        .edges()
        .filter(|(u, v)| removed[u.index()] || removed[v.index()])
        .count();

    let kept: Vec<NodeId> = graph.nodes().filter(|v| !removed[v.index()]).collect();
    Curated {
        graph: graph.induced(&kept),
        metadata: metadata.restrict(&kept),
        kept,
        report,
    }
}
