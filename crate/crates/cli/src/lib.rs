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

//! `corecrest` command-line front end.

use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod manifest;
pub mod output;
pub mod pipeline;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage { stage: String, source: Box<CliError> },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 2 config/argument, 3 parse, 4 stage failure. A failed pipeline stage
    /// reports the code of its underlying error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Failed(_) => 4,
            CliError::Stage { source, .. } => source.exit_code(),
        }
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        if err.kind() == io::ErrorKind::NotFound {
            CliError::Config(format!("{}: file not found", path.display()))
        } else {
            CliError::Failed(format!("{}: {err}", path.display()))
        }
    }

    pub fn in_stage(self, stage: &str) -> Self {
        match self {
            CliError::Stage { .. } => self,
            other => CliError::Stage {
                stage: stage.to_string(),
                source: Box::new(other),
            },
        }
    }
}

impl From<corecrest::Error> for CliError {
    fn from(e: corecrest::Error) -> Self {
        use corecrest::Error as E;
        match e {
            E::Parse { .. } => CliError::Parse(e.to_string()),
            E::Config(_) | E::InvalidArgument(_) => CliError::Config(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "corecrest",
    version,
    about = "Iterative k-core clustering and overlapping cluster assembly"
)]
pub struct Cli {
    /// Worker threads; outputs do not depend on this value.
    #[arg(long, global = true, env = "CORECREST_THREADS")]
    pub threads: Option<usize>,
    /// Write a run manifest to this path.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Edge list, one `citing<TAB>cited` row per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Rows are comma separated instead.
    #[arg(long)]
    pub comma: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CandidateSpec {
    NonSingleton,
    Singletons(f64),
    File(PathBuf),
}

impl FromStr for CandidateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "nonsingleton" {
            return Ok(CandidateSpec::NonSingleton);
        }
        if let Some(p) = s.strip_prefix("singletons:") {
            let pct: f64 = p.parse().map_err(|_| format!("bad percent `{p}`"))?;
            return Ok(CandidateSpec::Singletons(pct));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(CandidateSpec::File(PathBuf::from(path)));
        }
        Err(format!("expected nonsingleton, singletons:PCT or file:PATH, got `{s}`"))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load an edge list and report its size, degree groups and largest component.
    Ingest {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        id_map: Option<PathBuf>,
    },
    /// Remove retracted and high-referencing publications.
    Curate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        metadata: Option<PathBuf>,
        /// One DOI per line.
        #[arg(long)]
        retracted: Option<PathBuf>,
        /// Nodes with at least this many references are removed.
        #[arg(long, default_value_t = 250)]
        max_references: usize,
        #[arg(long)]
        no_reference_cap: bool,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Core number of every node.
    Cores {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Iterative k-core clustering.
    Ikc {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        rejected: Option<PathBuf>,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Expand IKC clusters into overlapping clusters.
    Aoc {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        clusters: PathBuf,
        /// `m` (at least MCD neighbours) or `k` (at least k neighbours).
        #[arg(long)]
        criterion: String,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "nonsingleton")]
        candidates: CandidateSpec,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Count neighbours against the original cluster only.
        #[arg(long)]
        frozen_reference: bool,
        #[arg(long)]
        growth: Option<PathBuf>,
        #[arg(long)]
        multi: Option<PathBuf>,
        #[arg(long)]
        decisions: Option<PathBuf>,
    },
    /// Tier 1 classification by intra-cluster citations.
    Tiers {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        clusters: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        node_counts: Option<PathBuf>,
    },
    /// Marker concentration per cluster.
    Markers {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        clusters: PathBuf,
        /// One node key per line.
        #[arg(long)]
        markers: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Jaccard overlap graph between clusters.
    Overlap {
        /// Edge list; when omitted, node keys come from the cluster file.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        comma: bool,
        #[arg(long)]
        clusters: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        median_includes_zeros: bool,
    },
    /// Uniform random G(n, m) graph.
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        directed: bool,
        #[arg(long)]
        output: PathBuf,
    },
    /// Degree- and cited-year-preserving edge shuffle.
    Shuffle {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        metadata: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10.0)]
        swaps_per_edge: f64,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-check km-validity of every cluster in a cluster file.
    Validate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        clusters: PathBuf,
        #[arg(long)]
        k: u32,
        /// Summary JSON whose `mcd` values each cluster must reproduce.
        #[arg(long)]
        expect_mcd: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run ingest, curate, ikc, aoc and analyses from a config file.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        criterion: Option<String>,
        #[arg(long)]
        candidates: Option<String>,
    },
}

fn init_threads(threads: Option<usize>) -> usize {
    let wanted = threads.unwrap_or(0);
    // The global pool can only be configured once per process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(wanted).build_global();
    rayon::current_num_threads()
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let threads = init_threads(cli.threads);
    commands::dispatch(cli.command, threads, cli.manifest.as_deref())
}
