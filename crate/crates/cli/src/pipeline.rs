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

//! `corecrest pipeline`: ingest, curate, ikc, aoc and the analyses driven
//! by one flat TOML file.
//!
//! ```toml
//! input = "edges.tsv"
//! stages = ["ingest", "ikc", "aoc", "tiers"]
//! k = 10
//! criterion = "m"
//! candidates = "nonsingleton"
//! output_dir = "out"
//! ```
//!
//! Relative paths resolve against the directory holding the config file.
//! Stages always run in the order ingest, curate, cores, ikc, aoc, tiers,
//! markers, overlap, validate, whatever order the list is written in.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use corecrest::analysis::{marker_report, overlap_graph, tier_classify, MarkerSet};
use corecrest::aoc::{
    aoc, cluster_growth_report, multi_assignment_report, select_candidates, AocOptions, CandidateStrategy,
    CriterionKind, MembershipCriterion,
};
use corecrest::clustering::{clustering_stats, Clustering};
use corecrest::curate::curate;
use corecrest::ingest::{load_edges, load_key_list, load_metadata};
use corecrest::kcore::core_numbers;
use corecrest::validate::validate;
use corecrest::{ikc, CitationGraph};

use crate::commands::{delimiter, graph_stats, parse_criterion, print_validation, require, CurationDoc};
use crate::manifest::ManifestBuilder;
use crate::{output, CandidateSpec, CliError};

pub const STAGES: [&str; 9] = [
    "ingest", "curate", "cores", "ikc", "aoc", "tiers", "markers", "overlap", "validate",
];

/// Marker file left in the output directory when a stage fails.
pub const FAILURE_MARKER: &str = "FAILED";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: PathBuf,
    #[serde(default)]
    pub comma: bool,
    pub output_dir: Option<PathBuf>,
    pub stages: Vec<String>,
    pub k: Option<u32>,
    pub criterion: Option<String>,
    pub candidates: Option<String>,
    pub metadata: Option<PathBuf>,
    pub retracted: Option<PathBuf>,
    pub max_references: Option<usize>,
    #[serde(default)]
    pub no_reference_cap: bool,
    pub markers: Option<PathBuf>,
    #[serde(default)]
    pub frozen_reference: bool,
    #[serde(default)]
    pub record_decisions: bool,
    #[serde(default)]
    pub median_includes_zeros: bool,
}

/// Command-line values that replace their config counterparts.
#[derive(Debug, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub k: Option<u32>,
    pub criterion: Option<String>,
    pub candidates: Option<String>,
}

struct Plan {
    cfg: PipelineConfig,
    stages: Vec<&'static str>,
    out_dir: PathBuf,
    criterion: Option<CriterionKind>,
    candidates: CandidateSpec,
}

impl Plan {
    fn has(&self, stage: &str) -> bool {
        self.stages.contains(&stage)
    }

    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn load_config(path: &Path) -> Result<PipelineConfig, CliError> {
    require(path)?;
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg: PipelineConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    cfg.input = resolve(base, &cfg.input);
    for p in [
        &mut cfg.output_dir,
        &mut cfg.metadata,
        &mut cfg.retracted,
        &mut cfg.markers,
    ]
    .into_iter()
    .flatten()
    {
        *p = resolve(base, p);
    }
    if let Some(spec) = cfg.candidates.as_mut() {
        if let Some(file) = spec.strip_prefix("file:") {
            *spec = format!("file:{}", resolve(base, Path::new(file)).display());
        }
    }
    Ok(cfg)
}

fn plan(mut cfg: PipelineConfig, overrides: Overrides) -> Result<Plan, CliError> {
    if overrides.output_dir.is_some() {
        cfg.output_dir = overrides.output_dir;
    }
    cfg.k = overrides.k.or(cfg.k);
    cfg.criterion = overrides.criterion.or(cfg.criterion);
    cfg.candidates = overrides.candidates.or(cfg.candidates);

    let mut stages = Vec::new();
    for s in &cfg.stages {
        let known = STAGES
            .iter()
            .find(|k| **k == s.as_str())
            .ok_or_else(|| CliError::Config(format!("unknown stage `{s}`; expected one of {}", STAGES.join(", "))))?;
        stages.push(*known);
    }
    stages.sort_by_key(|s| STAGES.iter().position(|k| k == s));
    stages.dedup();
    if stages.is_empty() {
        return Err(CliError::Config("no stages requested".into()));
    }
    let out_dir = cfg
        .output_dir
        .clone()
        .ok_or_else(|| CliError::Config("output_dir is not set".into()))?;

    let needs_clusters = ["aoc", "tiers", "markers", "overlap", "validate"];
    if !stages.contains(&"ikc") {
        if let Some(s) = stages.iter().find(|s| needs_clusters.contains(s)) {
            return Err(CliError::Config(format!("stage `{s}` needs the `ikc` stage")));
        }
    }
    if stages.contains(&"ikc") && cfg.k.is_none() {
        return Err(CliError::Config("stage `ikc` needs `k`".into()));
    }
    let criterion = if stages.contains(&"aoc") {
        let c = cfg
            .criterion
            .as_deref()
            .ok_or_else(|| CliError::Config("stage `aoc` needs `criterion`".into()))?;
        Some(parse_criterion(c)?)
    } else {
        None
    };
    let candidates: CandidateSpec = cfg
        .candidates
        .as_deref()
        .unwrap_or("nonsingleton")
        .parse()
        .map_err(CliError::Config)?;

    // Every input must exist before any output is written.
    require(&cfg.input)?;
    if stages.contains(&"curate") {
        if let Some(p) = &cfg.metadata {
            require(p)?;
        }
        if let Some(p) = &cfg.retracted {
            if cfg.metadata.is_none() {
                return Err(CliError::Config("`retracted` needs `metadata` to match DOIs".into()));
            }
            require(p)?;
        }
    }
    if stages.contains(&"markers") {
        let p = cfg
            .markers
            .as_ref()
            .ok_or_else(|| CliError::Config("stage `markers` needs `markers`".into()))?;
        require(p)?;
    }
    if let (true, CandidateSpec::File(p)) = (stages.contains(&"aoc"), &candidates) {
        require(p)?;
    }
    Ok(Plan {
        cfg,
        stages,
        out_dir,
        criterion,
        candidates,
    })
}

fn register(plan: &Plan, mb: &mut ManifestBuilder) -> Result<(), CliError> {
    let cfg = &plan.cfg;
    mb.param("stages", plan.stages.join(","));
    mb.param("delimiter", if cfg.comma { "comma" } else { "tab" });
    mb.input(&cfg.input)?;
    if plan.has("curate") {
        let cap = (!cfg.no_reference_cap).then(|| cfg.max_references.unwrap_or(250));
        mb.param("max_references", cap.map_or("none".to_string(), |c| c.to_string()));
        for p in [&cfg.metadata, &cfg.retracted].into_iter().flatten() {
            mb.input(p)?;
        }
    }
    if plan.has("ikc") {
        mb.param("k", cfg.k.unwrap_or_default());
    }
    if let Some(kind) = plan.criterion {
        mb.param("criterion", format!("{kind:?}"));
        mb.param("frozen_reference", cfg.frozen_reference);
        mb.param("candidates", format!("{:?}", plan.candidates));
        if let CandidateSpec::File(p) = &plan.candidates {
            mb.input(p)?;
        }
    }
    if plan.has("markers") {
        if let Some(p) = &cfg.markers {
            mb.input(p)?;
        }
    }
    if plan.has("overlap") {
        mb.param("median_includes_zeros", cfg.median_includes_zeros);
    }
    Ok(())
}

struct State {
    graph: CitationGraph,
    ikc: Option<Clustering>,
    aoc: Option<Clustering>,
}

impl State {
    /// Expanded clusters when AOC ran, IKC clusters otherwise.
    fn final_clusters(&self) -> &Clustering {
        self.aoc.as_ref().or(self.ikc.as_ref()).expect("ikc stage is required")
    }
}

fn run_stage(plan: &Plan, stage: &str, st: &mut State, mb: &mut ManifestBuilder) -> Result<(), CliError> {
    let cfg = &plan.cfg;
    match stage {
        "ingest" => output::json(mb, &plan.out("graph_stats.json"), &graph_stats(&st.graph)),
        "curate" => {
            let meta = match &cfg.metadata {
                Some(p) => load_metadata(p, &st.graph)?,
                None => (corecrest::NodeMetadata::new(st.graph.node_count()), Default::default()),
            };
            let dois = match &cfg.retracted {
                Some(p) => load_key_list(p)?,
                None => Vec::new(),
            };
            let cap = (!cfg.no_reference_cap).then(|| cfg.max_references.unwrap_or(250));
            let curated = curate(&st.graph, &meta.0, &dois, cap);
            output::edges(mb, &plan.out("curated_edges.tsv"), &curated.graph)?;
            let doc = CurationDoc {
                report: &curated.report,
                metadata: cfg.metadata.as_ref().map(|_| &meta.1),
                retracted_listed: dois.len(),
                max_references: cap,
                nodes_remaining: curated.graph.node_count(),
                edges_remaining: curated.graph.edge_count(),
            };
            output::json(mb, &plan.out("curation.json"), &doc)?;
            st.graph = curated.graph;
            Ok(())
        }
        "cores" => {
            let cores = core_numbers(&st.graph);
            output::core_numbers(mb, &plan.out("corenums.csv"), &st.graph, &cores)
        }
        "ikc" => {
            let k = cfg.k.expect("checked by plan");
            let out = ikc(&st.graph, k)?;
            output::clusters(mb, &plan.out("clusters.csv"), &out.clustering, &st.graph, false)?;
            output::summary(mb, &plan.out("summary.json"), &out.clustering)?;
            output::rejected(mb, &plan.out("rejected.csv"), &st.graph, &out.rejected)?;
            output::json(
                mb,
                &plan.out("ikc_stats.json"),
                &clustering_stats(&out.clustering, &st.graph),
            )?;
            st.ikc = Some(out.clustering);
            Ok(())
        }
        "aoc" => {
            let base = st.ikc.as_ref().expect("checked by plan");
            let strategy = match &plan.candidates {
                CandidateSpec::NonSingleton => CandidateStrategy::NonSingletonMembers,
                CandidateSpec::Singletons(p) => CandidateStrategy::TopPercentSingletons(*p),
                CandidateSpec::File(p) => CandidateStrategy::ExplicitFile(load_key_list(p)?),
            };
            let cands = select_candidates(&st.graph, base, &strategy)?;
            let criterion = MembershipCriterion {
                kind: plan.criterion.expect("checked by plan"),
                k: cfg.k.expect("checked by plan"),
            };
            let options = AocOptions {
                frozen_reference: cfg.frozen_reference,
                record_decisions: cfg.record_decisions,
            };
            let out = aoc(&st.graph, base, &cands, criterion, options)?;
            output::clusters(mb, &plan.out("aoc_clusters.csv"), &out.clustering, &st.graph, true)?;
            output::summary(mb, &plan.out("aoc_summary.json"), &out.clustering)?;
            output::json(
                mb,
                &plan.out("growth.json"),
                &cluster_growth_report(base, &out.clustering)?,
            )?;
            output::json(
                mb,
                &plan.out("multi_assignment.json"),
                &multi_assignment_report(&st.graph, &out.clustering),
            )?;
            if cfg.record_decisions {
                output::decisions(mb, &plan.out("decisions.csv"), &st.graph, &out.decisions)?;
            }
            st.aoc = Some(out.clustering);
            Ok(())
        }
        "tiers" => {
            let t = tier_classify(&st.graph, st.final_clusters());
            output::tiers(mb, &plan.out("tiers.csv"), &st.graph, &t)?;
            output::tier_counts(mb, &plan.out("tier_counts.csv"), &st.graph, &t)
        }
        "markers" => {
            let keys = load_key_list(cfg.markers.as_ref().expect("checked by plan"))?;
            let set = MarkerSet::resolve(&st.graph, &keys);
            let report = marker_report(st.final_clusters(), &set);
            output::markers(mb, &plan.out("markers.csv"), st.final_clusters(), &report)?;
            output::json(mb, &plan.out("markers.json"), &report)
        }
        "overlap" => {
            let o = overlap_graph(st.final_clusters(), cfg.median_includes_zeros);
            output::json(mb, &plan.out("overlap.json"), &o)?;
            output::dot(mb, &plan.out("overlap.dot"), &o)
        }
        "validate" => {
            let k = cfg.k.expect("checked by plan");
            let mut failed = 0;
            for (name, c) in [("ikc", &st.ikc), ("aoc", &st.aoc)] {
                if let Some(c) = c {
                    let rep = validate(&st.graph, c, k, None);
                    print_validation(&rep);
                    output::json(mb, &plan.out(&format!("validation_{name}.json")), &rep)?;
                    failed += rep.failed;
                }
            }
            if failed > 0 {
                return Err(CliError::Failed(format!("{failed} cluster(s) failed validation")));
            }
            Ok(())
        }
        other => unreachable!("unknown stage {other}"),
    }
}

pub fn run(config: &Path, overrides: Overrides, threads: usize, manifest: Option<&Path>) -> Result<(), CliError> {
    let plan = plan(load_config(config)?, overrides)?;
    let mut mb = ManifestBuilder::new("pipeline", threads);
    register(&plan, &mut mb)?;

    fs::create_dir_all(&plan.out_dir).map_err(|e| CliError::io(&plan.out_dir, e))?;
    let marker = plan.out(FAILURE_MARKER);
    if marker.exists() {
        fs::remove_file(&marker).map_err(|e| CliError::io(&marker, e))?;
    }
    let manifest_path = manifest
        .map(Path::to_path_buf)
        .unwrap_or_else(|| plan.out("manifest.json"));

    let outcome = load_edges(&plan.cfg.input, delimiter(plan.cfg.comma))
        .map_err(|e| CliError::from(e).in_stage("ingest"))
        .and_then(|graph| {
            let mut st = State {
                graph,
                ikc: None,
                aoc: None,
            };
            plan.stages
                .iter()
                .try_for_each(|stage| run_stage(&plan, stage, &mut st, &mut mb).map_err(|e| e.in_stage(stage)))
        });
    let mut status = String::from("ok");
    if let Err(e) = &outcome {
        let stage = match e {
            CliError::Stage { stage, .. } => stage.as_str(),
            _ => "unknown",
        };
        status = format!("failed:{stage}");
        fs::write(&marker, format!("{e}\n")).map_err(|err| CliError::io(&marker, err))?;
    }
    mb.write(&manifest_path, &status)?;
    outcome
}
