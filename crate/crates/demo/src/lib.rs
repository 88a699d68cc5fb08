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

//! Browser bindings for the static demo page in `www/`.
//!
//! Every export takes plain values and returns a JSON string, so the page
//! needs no generated TypeScript glue beyond `wasm-bindgen --target web`.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use corecrest::analysis::overlap_graph;
use corecrest::aoc::{aoc, select_candidates, AocOptions, CandidateStrategy, CriterionKind, MembershipCriterion};
use corecrest::clustering::Clustering;
use corecrest::ingest::{read_edges, Delimiter};
use corecrest::kcore::core_numbers;
use corecrest::synth::{planted_graph, PlantedConfig};
use corecrest::{ikc, CitationGraph};

/// Controls exposed on the page.
#[derive(Clone, Debug, Deserialize)]
pub struct DemoParams {
    pub nodes: usize,
    pub communities: usize,
    pub density: f64,
    pub noise_edges: usize,
    pub k: u32,
    pub criterion: String,
    #[serde(default)]
    pub frozen_reference: bool,
    pub seed: u64,
}

#[derive(Serialize)]
struct ClusterView {
    id: u32,
    members: Vec<u32>,
    added: Vec<u32>,
    mcd: usize,
    modularity: f64,
    extraction_k: Option<u32>,
}

#[derive(Serialize)]
struct PlantedView {
    nodes: usize,
    edges: Vec<(u32, u32)>,
    planted: Vec<Vec<u32>>,
    core_numbers: Vec<u32>,
    degeneracy: u32,
    ikc: Vec<ClusterView>,
    aoc: Vec<ClusterView>,
    multi_assigned: usize,
}

fn planted_config(p: &DemoParams) -> Result<PlantedConfig, String> {
    if p.nodes == 0 || p.nodes > 5000 {
        return Err("nodes must be between 1 and 5000".into());
    }
    Ok(PlantedConfig {
        nodes: p.nodes,
        communities: p.communities,
        density: p.density,
        noise_edges: p.noise_edges,
        bridges: p.nodes / 20,
        seed: p.seed,
        ..PlantedConfig::default()
    })
}

fn views(c: &Clustering) -> Vec<ClusterView> {
    c.clusters
        .iter()
        .map(|cl| ClusterView {
            id: cl.id,
            members: cl.members.iter().map(|v| v.0).collect(),
            added: cl.added.iter().map(|v| v.0).collect(),
            mcd: cl.meta.mcd,
            modularity: cl.meta.modularity,
            extraction_k: cl.meta.extraction_k,
        })
        .collect()
}

fn expand(graph: &CitationGraph, base: &Clustering, p: &DemoParams) -> Result<Clustering, String> {
    let kind: CriterionKind = p.criterion.parse().map_err(|e: corecrest::Error| e.to_string())?;
    let cands = select_candidates(graph, base, &CandidateStrategy::NonSingletonMembers).map_err(|e| e.to_string())?;
    let options = AocOptions {
        frozen_reference: p.frozen_reference,
        record_decisions: false,
    };
    aoc(graph, base, &cands, MembershipCriterion { kind, k: p.k }, options)
        .map(|o| o.clustering)
        .map_err(|e| e.to_string())
}

fn parse_params(json: &str) -> Result<DemoParams, String> {
    serde_json::from_str(json).map_err(|e| format!("bad parameters: {e}"))
}

/// Planted graph plus its IKC and AOC clusterings.
pub fn planted_run(params_json: &str) -> Result<String, String> {
    let p = parse_params(params_json)?;
    let planted = planted_graph(&planted_config(&p)?);
    let g = &planted.graph;
    let cores = core_numbers(g);
    let base = ikc(g, p.k).map_err(|e| e.to_string())?.clustering;
    let expanded = expand(g, &base, &p)?;
    let view = PlantedView {
        nodes: g.node_count(),
        edges: g.edges().map(|(u, v)| (u.0, v.0)).collect(),
        planted: planted
            .communities
            .iter()
            .map(|c| c.iter().map(|v| v.0).collect())
            .collect(),
        core_numbers: cores.core_numbers().to_vec(),
        degeneracy: cores.degeneracy(),
        ikc: views(&base),
        multi_assigned: expanded.membership_counts().iter().filter(|&&c| c >= 2).count(),
        aoc: views(&expanded),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CoreProfile {
    nodes: usize,
    edges: usize,
    degeneracy: u32,
    /// Node count per core number.
    histogram: Vec<usize>,
    ikc_clusters: usize,
    ikc_sizes: Vec<usize>,
}

/// Core-number histogram and IKC cluster sizes for a pasted edge list.
pub fn edge_list_profile(text: &str, k: u32) -> Result<String, String> {
    let delim = if text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.contains('\t'))
    {
        Delimiter::Tab
    } else {
        Delimiter::Comma
    };
    let g = read_edges(text.as_bytes(), delim, "pasted edges").map_err(|e| e.to_string())?;
    let cores = core_numbers(&g);
    let mut histogram = vec![0; cores.degeneracy() as usize + 1];
    for &c in cores.core_numbers() {
        histogram[c as usize] += 1;
    }
    let clusters = ikc(&g, k.max(1)).map_err(|e| e.to_string())?.clustering;
    let profile = CoreProfile {
        nodes: g.node_count(),
        edges: g.edge_count(),
        degeneracy: cores.degeneracy(),
        histogram,
        ikc_clusters: clusters.len(),
        ikc_sizes: clusters.clusters.iter().map(|c| c.members.len()).collect(),
    };
    serde_json::to_string(&profile).map_err(|e| e.to_string())
}

/// Jaccard overlap graph of the AOC clusters for the same parameters.
pub fn planted_overlap(params_json: &str, median_includes_zeros: bool) -> Result<String, String> {
    let p = parse_params(params_json)?;
    let g = planted_graph(&planted_config(&p)?).graph;
    let base = ikc(&g, p.k).map_err(|e| e.to_string())?.clustering;
    let expanded = expand(&g, &base, &p)?;
    serde_json::to_string(&overlap_graph(&expanded, median_includes_zeros)).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = plantedRun)]
pub fn planted_run_js(params_json: &str) -> Result<String, JsValue> {
    js(planted_run(params_json))
}

#[wasm_bindgen(js_name = edgeListProfile)]
pub fn edge_list_profile_js(text: &str, k: u32) -> Result<String, JsValue> {
    js(edge_list_profile(text, k))
}

#[wasm_bindgen(js_name = plantedOverlap)]
pub fn planted_overlap_js(params_json: &str, median_includes_zeros: bool) -> Result<String, JsValue> {
    js(planted_overlap(params_json, median_includes_zeros))
}
