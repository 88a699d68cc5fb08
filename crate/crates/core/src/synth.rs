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

//! Seeded synthetic graphs with planted dense communities over random noise.
//! Used for tests, benchmarks and the browser demo.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{CitationGraph, NodeId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedConfig {
    pub nodes: usize,
    pub communities: usize,
    pub min_size: usize,
    pub max_size: usize,
    /// Probability of each intra-community pair being linked.
    pub density: f64,
    /// Uniform random directed edges added on top.
    pub noise_edges: usize,
    /// Nodes that additionally cite members of one random community.
    pub bridges: usize,
    pub bridge_links: usize,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            nodes: 1000,
            communities: 12,
            min_size: 8,
            max_size: 40,
            density: 0.8,
            noise_edges: 2000,
            bridges: 60,
            bridge_links: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlantedGraph {
    pub graph: CitationGraph,
    /// Planted member sets, each sorted; communities never share nodes.
    pub communities: Vec<Vec<NodeId>>,
}

pub fn planted_graph(cfg: &PlantedConfig) -> PlantedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.nodes;
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut rng);

    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut communities = Vec::new();
    let mut cursor = 0;
    for _ in 0..cfg.communities {
        let size = rng.gen_range(cfg.min_size..=cfg.max_size.max(cfg.min_size));
        if cursor + size > n {
            break;
        }
        let members = &order[cursor..cursor + size];
        cursor += size;
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if rng.gen_bool(cfg.density.clamp(0.0, 1.0)) {
                    edges.push(if rng.gen_bool(0.5) { (a, b) } else { (b, a) });
                }
            }
        }
        let mut sorted: Vec<NodeId> = members.iter().map(|&v| NodeId(v)).collect();
        sorted.sort_unstable();
        communities.push(sorted);
    }

    if n > 1 {
        if !communities.is_empty() {
            for _ in 0..cfg.bridges {
                let v = rng.gen_range(0..n as u32);
                let target = &communities[rng.gen_range(0..communities.len())];
                for u in target.choose_multiple(&mut rng, cfg.bridge_links.min(target.len())) {
                    edges.push((v, u.0));
                }
            }
        }
        for _ in 0..cfg.noise_edges {
            edges.push((rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)));
        }
    }

    PlantedGraph {
        graph: CitationGraph::from_edges(n, edges),
        communities,
    }
}
