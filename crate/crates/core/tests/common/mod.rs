#![allow(dead_code)]

use ebm_core::graph::{NodeEconomics, NodeId, SocialGraph};
use rand::seq::SliceRandom;
use rand::Rng;

pub const FIXTURE_PA1000: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/pa1000.txt");

/// Distinct ordered pairs `(s, t)`, `s != t`; for undirected graphs also
/// distinct as unordered pairs.
pub fn random_pairs<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    directed: bool,
) -> Vec<(NodeId, NodeId)> {
    let mut all: Vec<(NodeId, NodeId)> = (0..n)
        .flat_map(|s| (0..n).map(move |t| (s, t)))
        .filter(|&(s, t)| if directed { s != t } else { s < t })
        .collect();
    all.shuffle(rng);
    all.truncate(m);
    all
}

/// Random graph with probabilities in `[lo, hi]`.
pub fn random_graph<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    directed: bool,
    lo: f64,
    hi: f64,
) -> SocialGraph {
    let edges: Vec<_> = random_pairs(rng, n, m, directed)
        .into_iter()
        .map(|(s, t)| (s, t, rng.gen_range(lo..=hi)))
        .collect();
    SocialGraph::from_edges(n, edges, directed).unwrap()
}

/// Costs in `[1, 10]`; each node is a target with probability 1/2 and a
/// benefit in `[1, 10]`.
pub fn random_economics<R: Rng>(rng: &mut R, n: usize) -> NodeEconomics {
    let cost: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..=10.0)).collect();
    let targets: Vec<NodeId> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    let mut benefit = vec![0.0; n];
    for &t in &targets {
        benefit[t] = rng.gen_range(1.0..=10.0);
    }
    NodeEconomics::new(cost, targets, benefit).unwrap()
}

/// Random subset of `0..n`, ascending.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<NodeId> {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

/// The instance where the plain ratio greedy does arbitrarily badly: an
/// isolated cheap target `u = 0` and a certain clique `1..=p`, each clique
/// node costing `p`, all benefits 1, budget `p`.
pub fn ratio_trap(p: usize, eps: f64) -> (SocialGraph, NodeEconomics, f64) {
    let mut edges = Vec::new();
    for a in 1..=p {
        for b in (a + 1)..=p {
            edges.push((a, b, 1.0));
        }
    }
    let graph = SocialGraph::from_edges(p + 1, edges, false).unwrap();
    let mut cost = vec![p as f64; p + 1];
    cost[0] = 1.0 - eps;
    let economics = NodeEconomics::new(cost, (0..=p).collect(), vec![1.0; p + 1]).unwrap();
    (graph, economics, p as f64)
}

/// `s` connected to `t` through `k` vertex-disjoint paths with the given
/// lengths; interior nodes are fresh. Returns graph, s, t.
pub fn disjoint_paths<R: Rng>(rng: &mut R, lengths: &[usize]) -> (SocialGraph, NodeId, NodeId) {
    let (s, t) = (0, 1);
    let mut next = 2;
    let mut edges = Vec::new();
    for &len in lengths {
        let mut prev = s;
        for _ in 1..len {
            edges.push((prev, next, rng.gen_range(0.05..=1.0)));
            prev = next;
            next += 1;
        }
        edges.push((prev, t, rng.gen_range(0.05..=1.0)));
    }
    (SocialGraph::from_edges(next, edges, true).unwrap(), s, t)
}
