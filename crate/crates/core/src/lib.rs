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

//! Iterative k-core clustering (IKC) and overlapping cluster assembly (AOC)
//! for large citation networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`], [`ingest`], [`curate`]: the immutable [`CitationGraph`],
//!   its text formats and curation filters.
//! * [`kcore`]: linear-time core numbers, k-core components and connected
//!   components on induced subgraphs.
//! * [`ikc`]: disjoint km-valid cores; [`aoc`]: their overlapping expansion.
//! * [`null_models`]: G(n, m) and year-stratified configuration shuffles.
//! * [`analysis`]: tiers, marker concentration and cluster overlap.
//! * [`validate`]: an independent km-validity checker.

pub mod analysis;
pub mod aoc;
pub mod clustering;
pub mod curate;
pub mod error;
pub mod graph;
pub mod ikc;
pub mod ingest;
pub mod kcore;
pub mod modularity;
pub mod null_models;
mod parallel;
pub mod synth;
pub mod validate;

pub use aoc::{
    aoc, select_candidates, AocOptions, CandidateSet, CandidateStrategy, CriterionKind, MembershipCriterion,
};
pub use clustering::{Cluster, ClusterMeta, Clustering, Provenance};
pub use error::{Error, Result};
pub use graph::{CitationGraph, GraphBuilder, NodeId, NodeMetadata};
pub use ikc::ikc;
pub use kcore::{core_numbers, CoreDecomposition};
pub use modularity::cluster_modularity;
