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

//! Writers for every file the CLI produces. Each one carries the manifest
//! digest: a `#` comment line for CSV and TSV, a `manifest_digest` field for
//! JSON and a `//` comment for DOT.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use corecrest::analysis::{overlap_to_dot, MarkerReport, OverlapGraph, TierAssignment};
use corecrest::aoc::Decision;
use corecrest::clustering::{summaries, write_clusters, Clustering};
use corecrest::ikc::RejectedComponent;
use corecrest::ingest::write_edges;
use corecrest::kcore::CoreDecomposition;
use corecrest::CitationGraph;

use crate::manifest::ManifestBuilder;
use crate::CliError;

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn with_file<F>(mb: &mut ManifestBuilder, path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>, &str) -> Result<(), CliError>,
{
    let mut out = create(path)?;
    let stamp = mb.stamp();
    body(&mut out, &stamp)?;
    out.flush().map_err(|e| CliError::io(path, e))?;
    mb.output(path);
    Ok(())
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::io(path, e)
}

pub fn json<T: Serialize>(mb: &mut ManifestBuilder, path: &Path, value: &T) -> Result<(), CliError> {
    let digest = mb.digest();
    let value = serde_json::to_value(value).map_err(|e| CliError::Failed(e.to_string()))?;
    let doc = match value {
        Value::Object(mut map) => {
            map.insert("manifest_digest".into(), Value::String(digest));
            Value::Object(map)
        }
        other => serde_json::json!({ "manifest_digest": digest, "data": other }),
    };
    with_file(mb, path, |out, _| {
        serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::Failed(e.to_string()))?;
        writeln!(out).map_err(io_err(path))
    })
}

pub fn edges(mb: &mut ManifestBuilder, path: &Path, graph: &CitationGraph) -> Result<(), CliError> {
    with_file(mb, path, |out, stamp| {
        writeln!(out, "# {stamp}").map_err(io_err(path))?;
        Ok(write_edges(graph, out)?)
    })
}

pub fn clusters(
    mb: &mut ManifestBuilder,
    path: &Path,
    clustering: &Clustering,
    graph: &CitationGraph,
    with_origin: bool,
) -> Result<(), CliError> {
    with_file(mb, path, |out, stamp| {
        Ok(write_clusters(clustering, graph, out, with_origin, Some(stamp))?)
    })
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    k: Option<u32>,
    graph_fingerprint: &'a str,
    clusters: Vec<corecrest::clustering::ClusterSummary>,
}

pub fn summary(mb: &mut ManifestBuilder, path: &Path, clustering: &Clustering) -> Result<(), CliError> {
    let doc = SummaryDoc {
        k: clustering.k,
        graph_fingerprint: &clustering.graph_fingerprint,
        clusters: summaries(clustering),
    };
    json(mb, path, &doc)
}

pub fn rejected(
    mb: &mut ManifestBuilder,
    path: &Path,
    graph: &CitationGraph,
    rejected: &[RejectedComponent],
) -> Result<(), CliError> {
    with_file(mb, path, |out, stamp| {
        let e = io_err(path);
        writeln!(out, "# {stamp}").map_err(&e)?;
        writeln!(out, "component,round,extraction_k,modularity,node_key").map_err(&e)?;
        for (i, r) in rejected.iter().enumerate() {
            for &v in &r.members {
                writeln!(
                    out,
                    "{i},{},{},{},{}",
                    r.round,
                    r.extraction_k,
                    r.modularity,
                    graph.key(v)
                )
                .map_err(&e)?;
            }
        }
        Ok(())
    })
}

pub fn core_numbers(
    mb: &mut ManifestBuilder,
    path: &Path,
    graph: &CitationGraph,
    cores: &CoreDecomposition,
) -> Result<(), CliError> {
    with_file(mb, path, |out, stamp| {
        let e = io_err(path);
        writeln!(out, "# {stamp}").map_err(&e)?;
        writeln!(out, "node_key,core_number").map_err(&e)?;
        for v in graph.nodes() {
            writeln!(out, "{},{}", graph.key(v), cores.core_number(v)).map_err(&e)?;
        }
        Ok(())
    })
}

pub fn tiers(
    mb: &mut ManifestBuilder,
    path: &Path,
    graph: &CitationGraph,
    tiers: &TierAssignment,
) -> Result<(), CliError> {
    with_file(mb, path, |out, stamp| {
        let e = io_err(path);
        writeln!(out, "# {stamp}").map_err(&e)?;
        writeln!(out, "cluster_id,node_key,intra_in_degree,tier").map_err(&e)?;
        for r in &tiers.rows {
            let tier = if r.tier1 { 1 } else { 2 };
            writeln!(
                out,
                "{},{},{},{tier}",
                r.cluster_id,
                graph.key(r.node),
                r.intra_in_degree
            )
            .map_err(&e)?;
        }
        Ok(())
    })
}

pub fn tier_counts(
    mb: &mut ManifestBuilder,
    path: &Path,
    graph: &CitationGraph,
    tiers: &TierAssignment,
) -> Result<(), CliError> {
    with_file(mb, path, |out, stamp| {
        let e = io_err(path);
        writeln!(out, "# {stamp}").map_err(&e)?;
        writeln!(out, "node_key,clusters,tier1_clusters").map_err(&e)?;
        for r in &tiers.per_node {
            writeln!(out, "{},{},{}", graph.key(r.node), r.clusters, r.tier1_clusters).map_err(&e)?;
        }
        Ok(())
    })
}

pub fn markers(
    mb: &mut ManifestBuilder,
    path: &Path,
    clustering: &Clustering,
    report: &MarkerReport,
) -> Result<(), CliError> {
    with_file(mb, path, |out, stamp| {
        let e = io_err(path);
        writeln!(out, "# {stamp}").map_err(&e)?;
        writeln!(out, "# resolved_markers={} covered={}", report.resolved, report.covered).map_err(&e)?;
        writeln!(out, "cluster_id,size,markers,percent").map_err(&e)?;
        for (row, c) in report.rows.iter().zip(&clustering.clusters) {
            let pct = row.percent.map(|p| p.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{pct}", row.cluster_id, c.members.len(), row.markers).map_err(&e)?;
        }
        Ok(())
    })
}

pub fn decisions(
    mb: &mut ManifestBuilder,
    path: &Path,
    graph: &CitationGraph,
    decisions: &[Decision],
) -> Result<(), CliError> {
    with_file(mb, path, |out, stamp| {
        let e = io_err(path);
        writeln!(out, "# {stamp}").map_err(&e)?;
        writeln!(
            out,
            "cluster_id,node_key,reference_neighbors,expansion_neighbors,mcd,k,degree_test,modularity_after,admitted"
        )
        .map_err(&e)?;
        for d in decisions {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                d.cluster_id,
                graph.key(d.node),
                d.reference_neighbors,
                d.expansion_neighbors,
                d.mcd,
                d.k,
                d.degree_test,
                d.modularity_after,
                d.admitted
            )
            .map_err(&e)?;
        }
        Ok(())
    })
}

pub fn dot(mb: &mut ManifestBuilder, path: &Path, overlap: &OverlapGraph) -> Result<(), CliError> {
    with_file(mb, path, |out, stamp| {
        let e = io_err(path);
        writeln!(out, "// {stamp}").map_err(&e)?;
        out.write_all(overlap_to_dot(overlap).as_bytes()).map_err(&e)
    })
}
