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

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;

use corecrest::analysis::{overlap_graph, tier_classify};
use corecrest::aoc::{aoc, select_candidates, AocOptions, CandidateStrategy, CriterionKind, MembershipCriterion};
use corecrest::clustering::{Cluster, Clustering, Provenance};
use corecrest::curate::curate;
use corecrest::graph::{CitationGraph, NodeId, NodeMetadata};
use corecrest::ikc::ikc;
use corecrest::kcore::{core_numbers, k_core_components};
use corecrest::null_models::{er_generate, shuffle_configuration, ShuffleConfig};
use corecrest::synth::{planted_graph, PlantedConfig};
use corecrest::validate::validate;

fn edges_strategy(max_n: u32, max_m: usize) -> impl Strategy<Value = (u32, Vec<(u32, u32)>)> {
    (1..max_n).prop_flat_map(move |n| (Just(n), prop::collection::vec((0..n, 0..n), 0..max_m)))
}

fn naive_cores(g: &CitationGraph) -> Vec<u32> {
    let n = g.node_count();
    let mut core = vec![0u32; n];
    for k in 1.. {
        let mut alive = vec![true; n];
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..n {
                if alive[v]
                    && g.neighbors(NodeId(v as u32))
                        .iter()
                        .filter(|u| alive[u.index()])
                        .count()
                        < k
                {
                    alive[v] = false;
                    changed = true;
                }
            }
        }
        if !alive.contains(&true) {
            break;
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k as u32;
            }
        }
    }
    core
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ingest_counts((n, edges) in edges_strategy(40, 200)) {
        let g = CitationGraph::from_edges(n as usize, edges.clone());
        let distinct: HashSet<(u32, u32)> = edges.into_iter().filter(|(a, b)| a != b).collect();
        prop_assert_eq!(g.edge_count(), distinct.len());
        let total: usize = g.nodes().map(|v| g.degree(v)).sum();
        prop_assert_eq!(total, 2 * g.edge_count());
        let outs: usize = g.nodes().map(|v| g.out_degree(v)).sum();
        let ins: usize = g.nodes().map(|v| g.in_degree(v)).sum();
        prop_assert_eq!(outs, ins);
        for v in g.nodes() {
            let mut u: BTreeSet<NodeId> = g.out_neighbors(v).iter().copied().collect();
            u.extend(g.in_neighbors(v).iter().copied());
            prop_assert_eq!(u.into_iter().collect::<Vec<_>>(), g.neighbors(v).to_vec());
        }
    }

    #[test]
    fn cores_match_oracle((n, edges) in edges_strategy(50, 400)) {
        let g = CitationGraph::from_edges(n as usize, edges);
        let d = core_numbers(&g);
        let oracle = naive_cores(&g);
        prop_assert_eq!(d.core_numbers(), oracle.as_slice());
        for v in g.nodes() {
            prop_assert!(d.core_number(v) as usize <= g.undirected_degree(v));
        }
    }

    #[test]
    fn k_core_monotone((n, edges) in edges_strategy(40, 300), k1 in 1usize..5, dk in 0usize..3) {
        let g = CitationGraph::from_edges(n as usize, edges);
        let all: Vec<NodeId> = g.nodes().collect();
        let low: HashSet<NodeId> = k_core_components(&g, &all, k1).into_iter().flatten().collect();
        let high_comps = k_core_components(&g, &all, k1 + dk);
        let high: Vec<NodeId> = high_comps.iter().flatten().copied().collect();
        prop_assert!(high.iter().all(|v| low.contains(v)));
        prop_assert_eq!(k_core_components(&g, &high, k1 + dk), high_comps);
    }

    #[test]
    fn curate_idempotent((n, edges) in edges_strategy(30, 200), cap in 1usize..8) {
        let g = CitationGraph::from_edges(n as usize, edges);
        let meta = NodeMetadata::new(g.node_count());
        let once = curate(&g, &meta, &[], Some(cap));
        let twice = curate(&once.graph, &once.metadata, &[], Some(cap));
        prop_assert_eq!(once.graph.fingerprint(), twice.graph.fingerprint());
    }

    #[test]
    fn ikc_and_aoc_invariants(seed in 0u64..10_000, k in 2u32..5) {
        let cfg = PlantedConfig { nodes: 150, communities: 6, min_size: 6, max_size: 14, density: 0.85, noise_edges: 250, bridges: 20, bridge_links: 6, seed };
        let g = planted_graph(&cfg).graph;
        let base = ikc(&g, k).unwrap().clustering;
        prop_assert!(base.is_disjoint());
        prop_assert!(validate(&g, &base, k, None).all_passed());
        let ks: Vec<u32> = base.clusters.iter().map(|c| c.meta.extraction_k.unwrap()).collect();
        prop_assert!(ks.windows(2).all(|w| w[0] >= w[1]));

        let cands = select_candidates(&g, &base, &CandidateStrategy::NonSingletonMembers).unwrap();
        for kind in [CriterionKind::AocM, CriterionKind::AocK] {
            let out = aoc(&g, &base, &cands, MembershipCriterion { kind, k }, AocOptions::default()).unwrap().clustering;
            prop_assert_eq!(out.len(), base.len());
            prop_assert!(validate(&g, &out, k, None).all_passed());
            for (b, a) in base.clusters.iter().zip(&out.clusters) {
                prop_assert!(b.members.iter().all(|v| a.contains(*v)));
                if kind == CriterionKind::AocM {
                    // Admissions need >= MCD neighbours, so the minimum cannot drop;
                    // it rises when every minimum-degree member gains a neighbour.
                    prop_assert!(a.meta.mcd >= b.meta.mcd);
                    for v in &a.added {
                        let inside = g.neighbors(*v).iter().filter(|u| a.contains(**u)).count();
                        prop_assert!(inside >= b.meta.mcd);
                    }
                }
            }
        }
    }

    #[test]
    fn shuffle_preserves_degrees_and_years((n, edges) in edges_strategy(30, 150), seed in any::<u64>()) {
        let g = CitationGraph::from_edges(n as usize, edges);
        let mut meta = NodeMetadata::new(g.node_count());
        for v in g.nodes() {
            meta.set_year(v, Some(1990 + (v.0 % 3) as i32));
        }
        let (s, _) = shuffle_configuration(&g, &meta, &ShuffleConfig { seed, swap_multiplier: 5.0 }).unwrap();
        prop_assert_eq!(s.edge_count(), g.edge_count());
        for v in g.nodes() {
            prop_assert_eq!(s.in_degree(v), g.in_degree(v));
            prop_assert_eq!(s.out_degree(v), g.out_degree(v));
        }
        let years = |g: &CitationGraph| { let mut y: Vec<i32> = g.edges().map(|(_, v)| meta.year(v).unwrap()).collect(); y.sort(); y };
        prop_assert_eq!(years(&s), years(&g));
        prop_assert!(s.edges().all(|(u, v)| u != v));
    }

    #[test]
    fn tiers_invariant_under_relabeling((n, edges) in edges_strategy(25, 120), rot in 1u32..24) {
        let g = CitationGraph::from_edges(n as usize, edges.clone());
        let relabel = |v: u32| (v + rot) % n;
        let h = CitationGraph::from_edges(n as usize, edges.iter().map(|&(a, b)| (relabel(a), relabel(b))));
        let members: Vec<NodeId> = (0..n).filter(|v| v % 2 == 0).map(NodeId).collect();
        let mapped: Vec<NodeId> = members.iter().map(|v| NodeId(relabel(v.0))).collect();
        let mut cg = Clustering::empty(&g, None);
        cg.clusters.push(Cluster::new(&g, 0, members, None, Provenance::Imported));
        let mut ch = Clustering::empty(&h, None);
        ch.clusters.push(Cluster::new(&h, 0, mapped, None, Provenance::Imported));
        let t1: BTreeSet<u32> = tier_classify(&g, &cg).rows.iter().filter(|r| r.tier1).map(|r| relabel(r.node.0)).collect();
        let t2: BTreeSet<u32> = tier_classify(&h, &ch).rows.iter().filter(|r| r.tier1).map(|r| r.node.0).collect();
        prop_assert_eq!(t1, t2);
    }

    #[test]
    fn overlap_matches_all_pairs(sets in prop::collection::vec(prop::collection::btree_set(0u32..40, 1..12), 2..12)) {
        let g = CitationGraph::from_edges(40, []);
        let mut c = Clustering::empty(&g, None);
        for (i, s) in sets.iter().enumerate() {
            c.clusters.push(Cluster::new(&g, i as u32, s.iter().map(|&v| NodeId(v)).collect(), None, Provenance::Imported));
        }
        let o = overlap_graph(&c, false);
        let mut brute = Vec::new();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                let inter = sets[i].intersection(&sets[j]).count();
                if inter > 0 {
                    brute.push((i as u32, j as u32, inter as f64 / sets[i].union(&sets[j]).count() as f64));
                }
            }
        }
        let got: Vec<(u32, u32, f64)> = o.pairs.iter().map(|p| (p.a, p.b, p.jaccard)).collect();
        prop_assert_eq!(got.len(), brute.len());
        for (x, y) in got.iter().zip(&brute) {
            prop_assert_eq!((x.0, x.1), (y.0, y.1));
            prop_assert!((x.2 - y.2).abs() < 1e-12);
        }
    }
}

#[test]
fn er_edge_frequencies_are_uniform() {
    let mut counts = std::collections::HashMap::new();
    let trials = 1000;
    for seed in 0..trials {
        let g = er_generate(6, 5, seed, true).unwrap();
        assert_eq!(g.edge_count(), 5);
        for (u, v) in g.edges() {
            assert_ne!(u, v);
            *counts.entry((u, v)).or_insert(0usize) += 1;
        }
    }
    assert_eq!(counts.len(), 30);
    let p = 5.0 / 30.0;
    let mean = trials as f64 * p;
    let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
    for (&e, &c) in &counts {
        assert!((c as f64 - mean).abs() <= 3.0 * sigma, "edge {e:?} seen {c} times");
    }
}
