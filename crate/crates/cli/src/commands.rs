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

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::Serialize;

use corecrest::analysis::{marker_report, overlap_graph, tier_classify, MarkerSet};
use corecrest::aoc::{
    aoc, cluster_growth_report, multi_assignment_report, select_candidates, AocOptions, CandidateStrategy,
    CriterionKind, MembershipCriterion,
};
use corecrest::clustering::{clustering_stats, read_clusters, Clustering};
use corecrest::curate::{curate, CurationReport};
use corecrest::graph::{degree_groups, largest_connected_component, GraphBuilder, NodeMetadata, DEGREE_GROUP_BOUNDS};
use corecrest::ingest::{load_edges, load_key_list, load_metadata, write_id_map, Delimiter, MetadataLoadReport};
use corecrest::kcore::core_numbers;
use corecrest::null_models::{er_generate, shuffle_configuration, ShuffleConfig};
use corecrest::validate::{validate, ValidationReport};
use corecrest::{ikc, CitationGraph};

use crate::manifest::ManifestBuilder;
use crate::{output, pipeline, CandidateSpec, CliError, Command, GraphArgs};

pub(crate) fn require(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{}: file not found", path.display())))
    }
}

pub(crate) fn delimiter(comma: bool) -> Delimiter {
    if comma {
        Delimiter::Comma
    } else {
        Delimiter::Tab
    }
}

pub(crate) fn load_graph(mb: &mut ManifestBuilder, path: &Path, delim: Delimiter) -> Result<CitationGraph, CliError> {
    require(path)?;
    mb.input(path)?;
    Ok(load_edges(path, delim)?)
}

fn load_graph_args(mb: &mut ManifestBuilder, g: &GraphArgs) -> Result<CitationGraph, CliError> {
    mb.param("delimiter", if g.comma { "comma" } else { "tab" });
    load_graph(mb, &g.input, delimiter(g.comma))
}

pub(crate) fn load_clusters(
    mb: &mut ManifestBuilder,
    path: &Path,
    graph: &CitationGraph,
) -> Result<Clustering, CliError> {
    require(path)?;
    mb.input(path)?;
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(read_clusters(BufReader::new(file), graph, &path.display().to_string())?)
}

pub(crate) fn load_keys(mb: &mut ManifestBuilder, path: &Path) -> Result<Vec<String>, CliError> {
    require(path)?;
    mb.input(path)?;
    Ok(load_key_list(path)?)
}

pub(crate) fn load_meta(
    mb: &mut ManifestBuilder,
    path: &Path,
    graph: &CitationGraph,
) -> Result<(NodeMetadata, MetadataLoadReport), CliError> {
    require(path)?;
    mb.input(path)?;
    Ok(load_metadata(path, graph)?)
}

pub(crate) fn parse_criterion(s: &str) -> Result<CriterionKind, CliError> {
    s.parse::<CriterionKind>().map_err(|e| CliError::Config(e.to_string()))
}

pub(crate) fn candidate_strategy(
    mb: &mut ManifestBuilder,
    spec: &CandidateSpec,
) -> Result<CandidateStrategy, CliError> {
    Ok(match spec {
        CandidateSpec::NonSingleton => CandidateStrategy::NonSingletonMembers,
        CandidateSpec::Singletons(p) => CandidateStrategy::TopPercentSingletons(*p),
        CandidateSpec::File(path) => CandidateStrategy::ExplicitFile(load_keys(mb, path)?),
    })
}

/// Node keys only, in first-seen order of a cluster file.
fn keys_only_graph(path: &Path) -> Result<CitationGraph, CliError> {
    require(path)?;
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut builder = GraphBuilder::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with("cluster_id") {
            continue;
        }
        if let Some(key) = t.split(',').nth(1) {
            builder.intern(key.trim());
        }
    }
    Ok(builder.build())
}

/// Reads `(cluster_id, mcd)` pairs from a summary file.
pub(crate) fn read_expected_mcd(path: &Path) -> Result<Vec<(u32, usize)>, CliError> {
    require(path)?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let list = doc.get("clusters").unwrap_or(&doc);
    let bad = || CliError::Parse(format!("{}: expected a list of cluster summaries", path.display()));
    list.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|row| {
            let id = row.get("cluster_id").and_then(|v| v.as_u64()).ok_or_else(bad)?;
            let mcd = row.get("mcd").and_then(|v| v.as_u64()).ok_or_else(bad)?;
            Ok((id as u32, mcd as usize))
        })
        .collect()
}

pub(crate) fn print_validation(report: &ValidationReport) {
    for c in &report.clusters {
        let expected = c.expected_mcd.map(|m| format!(" expected_mcd={m}")).unwrap_or_default();
        println!(
            "cluster {}: {} size={} connected={} min_degree={} modularity={:.6}{expected}",
            c.cluster_id,
            if c.passed { "PASS" } else { "FAIL" },
            c.size,
            c.connected,
            c.min_degree,
            c.modularity
        );
    }
    println!(
        "{} of {} clusters passed at k={}",
        report.clusters.len() - report.failed,
        report.clusters.len(),
        report.k
    );
}

#[derive(Serialize)]
pub(crate) struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub undirected_edges: usize,
    pub degree_group_bounds: Vec<usize>,
    pub degree_groups: [usize; 5],
    pub largest_component_nodes: usize,
    pub fingerprint: String,
}

pub(crate) fn graph_stats(graph: &CitationGraph) -> GraphStats {
    GraphStats {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        undirected_edges: graph.undirected_edge_count(),
        degree_group_bounds: DEGREE_GROUP_BOUNDS.to_vec(),
        degree_groups: degree_groups(graph).counts,
        largest_component_nodes: largest_connected_component(graph).len(),
        fingerprint: graph.fingerprint(),
    }
}

#[derive(Serialize)]
pub(crate) struct CurationDoc<'a> {
    pub report: &'a CurationReport,
    pub metadata: Option<&'a MetadataLoadReport>,
    pub retracted_listed: usize,
    pub max_references: Option<usize>,
    pub nodes_remaining: usize,
    pub edges_remaining: usize,
}

#[derive(Serialize)]
struct CoreSummary {
    nodes: usize,
    degeneracy: u32,
    /// Node count per core number, index = core number.
    histogram: Vec<usize>,
}

pub fn dispatch(command: Command, threads: usize, manifest: Option<&Path>) -> Result<(), CliError> {
    if let Command::Pipeline {
        config,
        output_dir,
        k,
        criterion,
        candidates,
    } = command
    {
        let overrides = pipeline::Overrides {
            output_dir,
            k,
            criterion,
            candidates,
        };
        return pipeline::run(&config, overrides, threads, manifest);
    }
    let name = command_name(&command);
    let mut mb = ManifestBuilder::new(name, threads);
    let result = execute(command, &mut mb);
    if let Some(path) = manifest {
        let status = if result.is_ok() { "ok" } else { "failed" };
        mb.write(path, status)?;
    }
    result
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Ingest { .. } => "ingest",
        Command::Curate { .. } => "curate",
        Command::Cores { .. } => "cores",
        Command::Ikc { .. } => "ikc",
        Command::Aoc { .. } => "aoc",
        Command::Tiers { .. } => "tiers",
        Command::Markers { .. } => "markers",
        Command::Overlap { .. } => "overlap",
        Command::Er { .. } => "er",
        Command::Shuffle { .. } => "shuffle",
        Command::Validate { .. } => "validate",
        Command::Pipeline { .. } => "pipeline",
    }
}

fn execute(command: Command, mb: &mut ManifestBuilder) -> Result<(), CliError> {
    match command {
        Command::Ingest { graph, output, id_map } => {
            let g = load_graph_args(mb, &graph)?;
            output::json(mb, &output, &graph_stats(&g))?;
            if let Some(path) = id_map {
                let mut out = output::create(&path)?;
                writeln!(out, "# {}", mb.stamp()).map_err(|e| CliError::io(&path, e))?;
                write_id_map(&g, &mut out)?;
                mb.output(&path);
            }
            Ok(())
        }
        Command::Curate {
            graph,
            metadata,
            retracted,
            max_references,
            no_reference_cap,
            output,
            report,
        } => {
            let g = load_graph_args(mb, &graph)?;
            let cap = (!no_reference_cap).then_some(max_references);
            mb.param("max_references", cap.map_or("none".to_string(), |c| c.to_string()));
            let (meta, meta_report) = match &metadata {
                Some(path) => {
                    let (m, r) = load_meta(mb, path, &g)?;
                    (m, Some(r))
                }
                None => (NodeMetadata::new(g.node_count()), None),
            };
            let dois = match &retracted {
                Some(path) => load_keys(mb, path)?,
                None => Vec::new(),
            };
            if !dois.is_empty() && metadata.is_none() {
                return Err(CliError::Config("--retracted needs --metadata to match DOIs".into()));
            }
            let curated = curate(&g, &meta, &dois, cap);
            output::edges(mb, &output, &curated.graph)?;
            if let Some(path) = report {
                let doc = CurationDoc {
                    report: &curated.report,
                    metadata: meta_report.as_ref(),
                    retracted_listed: dois.len(),
                    max_references: cap,
                    nodes_remaining: curated.graph.node_count(),
                    edges_remaining: curated.graph.edge_count(),
                };
                output::json(mb, &path, &doc)?;
            }
            Ok(())
        }
        Command::Cores { graph, output, summary } => {
            let g = load_graph_args(mb, &graph)?;
            let cores = core_numbers(&g);
            output::core_numbers(mb, &output, &g, &cores)?;
            if let Some(path) = summary {
                let mut histogram = vec![0usize; cores.degeneracy() as usize + 1];
                for &c in cores.core_numbers() {
                    histogram[c as usize] += 1;
                }
                let doc = CoreSummary {
                    nodes: g.node_count(),
                    degeneracy: cores.degeneracy(),
                    histogram,
                };
                output::json(mb, &path, &doc)?;
            }
            Ok(())
        }
        Command::Ikc {
            graph,
            k,
            output,
            summary,
            rejected,
            stats,
        } => {
            let g = load_graph_args(mb, &graph)?;
            mb.param("k", k);
            let out = ikc(&g, k)?;
            output::clusters(mb, &output, &out.clustering, &g, false)?;
            if let Some(path) = summary {
                output::summary(mb, &path, &out.clustering)?;
            }
            if let Some(path) = rejected {
                output::rejected(mb, &path, &g, &out.rejected)?;
            }
            if let Some(path) = stats {
                output::json(mb, &path, &clustering_stats(&out.clustering, &g))?;
            }
            Ok(())
        }
        Command::Aoc {
            graph,
            clusters,
            criterion,
            k,
            candidates,
            output,
            summary,
            frozen_reference,
            growth,
            multi,
            decisions,
        } => {
            let g = load_graph_args(mb, &graph)?;
            let kind = parse_criterion(&criterion)?;
            mb.param("criterion", format!("{kind:?}"))
                .param("k", k)
                .param("frozen_reference", frozen_reference);
            let base = load_clusters(mb, &clusters, &g)?;
            let strategy = candidate_strategy(mb, &candidates)?;
            mb.param("candidates", &strategy);
            let cands = select_candidates(&g, &base, &strategy)?;
            if cands.unknown_keys > 0 {
                eprintln!(
                    "corecrest: {} candidate key(s) are not in the graph",
                    cands.unknown_keys
                );
            }
            let options = AocOptions {
                frozen_reference,
                record_decisions: decisions.is_some(),
            };
            let out = aoc(&g, &base, &cands, MembershipCriterion { kind, k }, options)?;
            output::clusters(mb, &output, &out.clustering, &g, true)?;
            if let Some(path) = summary {
                output::summary(mb, &path, &out.clustering)?;
            }
            if let Some(path) = growth {
                output::json(mb, &path, &cluster_growth_report(&base, &out.clustering)?)?;
            }
            if let Some(path) = multi {
                output::json(mb, &path, &multi_assignment_report(&g, &out.clustering))?;
            }
            if let Some(path) = decisions {
                output::decisions(mb, &path, &g, &out.decisions)?;
            }
            Ok(())
        }
        Command::Tiers {
            graph,
            clusters,
            output,
            node_counts,
        } => {
            let g = load_graph_args(mb, &graph)?;
            let c = load_clusters(mb, &clusters, &g)?;
            let t = tier_classify(&g, &c);
            output::tiers(mb, &output, &g, &t)?;
            if let Some(path) = node_counts {
                output::tier_counts(mb, &path, &g, &t)?;
            }
            Ok(())
        }
        Command::Markers {
            graph,
            clusters,
            markers,
            output,
            json,
        } => {
            let g = load_graph_args(mb, &graph)?;
            let c = load_clusters(mb, &clusters, &g)?;
            let keys = load_keys(mb, &markers)?;
            let set = MarkerSet::resolve(&g, &keys);
            if set.unresolved > 0 {
                eprintln!("corecrest: {} marker key(s) are not in the graph", set.unresolved);
            }
            let report = marker_report(&c, &set);
            output::markers(mb, &output, &c, &report)?;
            if let Some(path) = json {
                output::json(mb, &path, &report)?;
            }
            Ok(())
        }
        Command::Overlap {
            input,
            comma,
            clusters,
            output,
            dot,
            median_includes_zeros,
        } => {
            let g = match &input {
                Some(path) => load_graph(mb, path, delimiter(comma))?,
                None => keys_only_graph(&clusters)?,
            };
            mb.param("median_includes_zeros", median_includes_zeros);
            let c = load_clusters(mb, &clusters, &g)?;
            let o = overlap_graph(&c, median_includes_zeros);
            output::json(mb, &output, &o)?;
            if let Some(path) = dot {
                output::dot(mb, &path, &o)?;
            }
            Ok(())
        }
        Command::Er {
            n,
            m,
            seed,
            directed,
            output,
        } => {
            mb.param("n", n).param("m", m).param("directed", directed).seed(seed);
            let g = er_generate(n, m, seed, directed)?;
            output::edges(mb, &output, &g)
        }
        Command::Shuffle {
            graph,
            metadata,
            seed,
            swaps_per_edge,
            output,
            report,
        } => {
            let g = load_graph_args(mb, &graph)?;
            let (meta, _) = load_meta(mb, &metadata, &g)?;
            mb.param("swaps_per_edge", swaps_per_edge).seed(seed);
            let config = ShuffleConfig {
                seed,
                swap_multiplier: swaps_per_edge,
            };
            let (shuffled, rep) = shuffle_configuration(&g, &meta, &config)?;
            output::edges(mb, &output, &shuffled)?;
            if let Some(path) = report {
                output::json(mb, &path, &rep)?;
            }
            Ok(())
        }
        Command::Validate {
            graph,
            clusters,
            k,
            expect_mcd,
            report,
        } => {
            let g = load_graph_args(mb, &graph)?;
            mb.param("k", k);
            let c = load_clusters(mb, &clusters, &g)?;
            let expected = match &expect_mcd {
                Some(path) => {
                    mb.input(path)?;
                    Some(read_expected_mcd(path)?)
                }
                None => None,
            };
            let rep = validate(&g, &c, k, expected.as_deref());
            print_validation(&rep);
            if let Some(path) = report {
                output::json(mb, &path, &rep)?;
            }
            if rep.all_passed() {
                Ok(())
            } else {
                Err(CliError::Failed(format!("{} cluster(s) failed validation", rep.failed)))
            }
        }
        Command::Pipeline { .. } => unreachable!("handled by dispatch"),
    }
}
