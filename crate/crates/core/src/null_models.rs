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

//! Random baselines: uniform G(n, m) graphs and a configuration shuffle that
//! keeps every node's degrees and each edge's cited-node year.
//!
//! All randomness comes from `ChaCha8Rng`, seeded explicitly, so outputs are
//! reproducible across platforms.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pack, CitationGraph, NodeId, NodeMetadata};
use crate::parallel::map_ordered;

/// Number of possible edges on `n` nodes, or `None` on overflow.
fn pair_space(n: u64, directed: bool) -> Option<u64> {
    let ordered = n.checked_mul(n.saturating_sub(1))?;
    Some(if directed { ordered } else { ordered / 2 })
}

/// `m` distinct codes drawn uniformly from `0..space`, sorted.
///
/// Draws are made in rounds of exactly the current deficit, so the distinct
/// count never overshoots and the result is the distinct prefix of one iid
/// stream.
fn sample_distinct(space: u64, m: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut codes: Vec<u64> = Vec::with_capacity(m as usize);
    while (codes.len() as u64) < m {
        let need = m - codes.len() as u64;
        codes.extend((0..need).map(|_| rng.gen_range(0..space)));
        codes.sort_unstable();
        codes.dedup();
    }
    codes
}

/// Inverse of the ordered-pair code `u * (n - 1) + r`.
#[inline]
fn directed_pair(code: u64, n: u64) -> (u32, u32) {
    let u = code / (n - 1);
    let r = code % (n - 1);
    let v = if r >= u { r + 1 } else { r };
    (u as u32, v as u32)
}

/// Inverse of the row-major code over pairs `u < v`.
#[inline]
fn undirected_pair(code: u64, n: u64) -> (u32, u32) {
    // Row u starts at u * (2n - u - 1) / 2.
    let start = |u: u64| u * (2 * n - u - 1) / 2;
    let nf = n as f64;
    let disc = (2.0 * nf - 1.0) * (2.0 * nf - 1.0) - 8.0 * code as f64;
    let mut u = (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0).floor().max(0.0) as u64;
    u = u.min(n - 2);
    while u > 0 && start(u) > code {
        u -= 1;
    }
    while u + 1 < n - 1 && start(u + 1) <= code {
        u += 1;
    }
    let v = u + 1 + (code - start(u));
    (u as u32, v as u32)
}

/// Samples exactly `m` distinct non-loop edges uniformly at random.
///
/// Undirected graphs store each edge once as `u -> v` with `u < v`.
pub fn er_generate(n: usize, m: usize, seed: u64, directed: bool) -> Result<CitationGraph> {
    if n > u32::MAX as usize {
        return Err(Error::InvalidArgument(format!("n={n} exceeds the 32-bit id space")));
    }
    let (n64, m64) = (n as u64, m as u64);
    let space =
        pair_space(n64, directed).ok_or_else(|| Error::InvalidArgument(format!("pair space of n={n} overflows")))?;
    if m64 > space {
        return Err(Error::InvalidArgument(format!(
            "m={m} exceeds the {space} possible {} edges on n={n} nodes",
            if directed { "directed" } else { "undirected" }
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codes = if m64 <= space / 2 {
        sample_distinct(space, m64, &mut rng)
    } else {
        // Dense request: sample the complement instead.
        let excluded = sample_distinct(space, space - m64, &mut rng);
        let mut keep = Vec::with_capacity(m);
        let mut ex = excluded.iter().peekable();
        for c in 0..space {
            if ex.peek() == Some(&&c) {
                ex.next();
            } else {
                keep.push(c);
            }
        }
        keep
    };
    let mut packed = codes;
    for c in packed.iter_mut() {
        let (u, v) = if directed {
            directed_pair(*c, n64)
        } else {
            undirected_pair(*c, n64)
        };
        *c = pack(u, v);
    }
    Ok(CitationGraph::from_packed_codes(n, packed))
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShuffleConfig {
    pub seed: u64,
    /// Attempted swaps per edge.
    pub swap_multiplier: f64,
}

impl Default for ShuffleConfig {
    fn default() -> Self {
        ShuffleConfig {
            seed: 0,
            swap_multiplier: 10.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShuffleReport {
    pub seed: u64,
    pub strata: usize,
    pub edges: usize,
    pub attempted: u64,
    pub accepted: u64,
    pub rejected_loop: u64,
    pub rejected_duplicate: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for one year stratum; independent of scheduling.
pub fn stratum_seed(master: u64, year: i32) -> u64 {
    splitmix64(master ^ splitmix64(year as i64 as u64))
}

#[derive(Default)]
struct StratumOutcome {
    edges: Vec<(NodeId, NodeId)>,
    attempted: u64,
    accepted: u64,
    rejected_loop: u64,
    rejected_duplicate: u64,
}

fn shuffle_stratum(mut edges: Vec<(NodeId, NodeId)>, attempts: u64, seed: u64) -> StratumOutcome {
    let mut out = StratumOutcome::default();
    let len = edges.len();
    if len < 2 {
        out.edges = edges;
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present: HashSet<u64> = edges.iter().map(|&(a, b)| pack(a.0, b.0)).collect();
    for _ in 0..attempts {
        out.attempted += 1;
        let i = rng.gen_range(0..len);
        let mut j = rng.gen_range(0..len - 1);
        if j >= i {
            j += 1;
        }
        let (u1, v1) = edges[i];
        let (u2, v2) = edges[j];
        if u1 == v2 || u2 == v1 {
            out.rejected_loop += 1;
            continue;
        }
        let (e1, e2) = (pack(u1.0, v2.0), pack(u2.0, v1.0));
        if v1 == v2 || present.contains(&e1) || present.contains(&e2) {
            out.rejected_duplicate += 1;
            continue;
        }
        present.remove(&pack(u1.0, v1.0));
        present.remove(&pack(u2.0, v2.0));
        present.insert(e1);
        present.insert(e2);
        edges[i] = (u1, v2);
        edges[j] = (u2, v1);
        out.accepted += 1;
    }
    out.edges = edges;
    out
}

/// Randomizes cited endpoints by double-edge swaps inside each cited-year
/// stratum. Sources are untouched, so out-degrees hold; each stratum keeps
/// its multiset of targets, so in-degrees and per-edge cited years hold.
pub fn shuffle_configuration(
    graph: &CitationGraph,
    metadata: &NodeMetadata,
    config: &ShuffleConfig,
) -> Result<(CitationGraph, ShuffleReport)> {
    if !(config.swap_multiplier >= 0.0 && config.swap_multiplier.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "swap multiplier {} must be a finite non-negative number",
            config.swap_multiplier
        )));
    }
    let mut missing: Vec<NodeId> = Vec::new();
    let mut strata: BTreeMap<i32, Vec<(NodeId, NodeId)>> = BTreeMap::new();
    for (u, v) in graph.edges() {
        match metadata.year(v) {
            Some(y) => strata.entry(y).or_default().push((u, v)),
            None => missing.push(v),
        }
    }
    if !missing.is_empty() {
        missing.sort_unstable();
        missing.dedup();
        return Err(Error::MissingYears(
            missing.into_iter().map(|v| graph.key(v).into_owned()).collect(),
        ));
    }

    let jobs: Vec<(i32, Vec<(NodeId, NodeId)>)> = strata.into_iter().collect();
    let outcomes = map_ordered(&jobs, |(year, edges)| {
        let attempts = (config.swap_multiplier * edges.len() as f64).round() as u64;
        shuffle_stratum(edges.clone(), attempts, stratum_seed(config.seed, *year))
    });

    let mut report = ShuffleReport {
        seed: config.seed,
        strata: jobs.len(),
        edges: graph.edge_count(),
        ..Default::default()
    };
    let mut all = Vec::with_capacity(graph.edge_count());
    for o in outcomes {
        report.attempted += o.attempted;
        report.accepted += o.accepted;
        report.rejected_loop += o.rejected_loop;
        report.rejected_duplicate += o.rejected_duplicate;
        all.extend(o.edges);
    }
    Ok((graph.with_edges(all), report))
}
