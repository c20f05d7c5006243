//! Hop-based heuristic.
//!
//! Each node is scored by its own benefit plus the expected benefit of the
//! targets it can reach within `h` hops with probability at least `alpha`,
//! divided by its cost. Nodes are then taken in score order while they fit
//! the budget.
//!
//! The influence probability from `s` to a target `t` uses the
//! maximum-influence in-tree reading: with `d` hops left,
//!
//! ```text
//! P_d(s -> s) = 1
//! P_0(s -> x) = 0                                   (x != s)
//! P_d(s -> x) = 1 - prod_{w in in(x)} (1 - P_{d-1}(s -> w) * p(w, x))
//! ```
//!
//! where `t` itself is never used as an intermediate node. In-neighbors are
//! combined as if independent, so paths sharing an edge are double counted.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::diffusion::BenefitOracle;
use crate::graph::{NodeEconomics, NodeId, SocialGraph};
use crate::selection::{
    check_budget, check_sizes, Budget, SelectionError, SelectionResult, StopReason,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopConfig {
    pub hops: usize,
    pub alpha: f64,
    /// Stop the scan at the first node with a zero score instead of seeding
    /// zero-score nodes while budget remains.
    pub skip_zero: bool,
}

impl Default for HopConfig {
    fn default() -> Self {
        Self {
            hops: 2,
            alpha: 0.1,
            skip_zero: false,
        }
    }
}

impl HopConfig {
    pub fn new(hops: usize, alpha: f64) -> Result<Self, SelectionError> {
        let config = Self {
            hops,
            alpha,
            skip_zero: false,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SelectionError> {
        if self.hops == 0 {
            return Err(SelectionError::InvalidParameter(
                "hop count must be >= 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(SelectionError::InvalidParameter(format!(
                "cut-off probability {} outside [0, 1]",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Nodes that reach `target` within `hops` arcs, with their hop distance,
/// ordered by distance then id. `target` itself is excluded.
pub fn h_hop_in_neighborhood(
    graph: &SocialGraph,
    target: NodeId,
    hops: usize,
) -> Vec<(NodeId, usize)> {
    let mut dist: HashMap<NodeId, usize> = HashMap::new();
    dist.insert(target, 0);
    let mut queue = VecDeque::from([target]);
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        if d == hops {
            continue;
        }
        for (w, _) in graph.in_arcs(x) {
            if let Entry::Vacant(e) = dist.entry(w) {
                e.insert(d + 1);
                out.push((w, d + 1));
                queue.push_back(w);
            }
        }
    }
    out.sort_unstable_by_key(|&(w, d)| (d, w));
    out
}

/// Influence probabilities towards one target, for every source at once.
struct InTree<'g> {
    graph: &'g SocialGraph,
    target: NodeId,
    memo: HashMap<(NodeId, usize), HashMap<NodeId, f64>>,
}

impl<'g> InTree<'g> {
    fn new(graph: &'g SocialGraph, target: NodeId) -> Self {
        Self {
            graph,
            target,
            memo: HashMap::new(),
        }
    }

    /// `P_d(s -> x)` for every `s != x` with a non-zero value.
    fn toward(&mut self, x: NodeId, d: usize) -> HashMap<NodeId, f64> {
        if d == 0 {
            return HashMap::new();
        }
        if let Some(m) = self.memo.get(&(x, d)) {
            return m.clone();
        }
        // product of (1 - P_{d-1}(s -> w) * p(w, x)) per source s
        let mut miss: HashMap<NodeId, f64> = HashMap::new();
        let in_arcs: Vec<(NodeId, usize)> = self.graph.in_arcs(x).collect();
        for (w, arc) in in_arcs {
            if w == self.target {
                continue;
            }
            let p_wx = self.graph.arc_probability(arc);
            *miss.entry(w).or_insert(1.0) *= 1.0 - p_wx;
            for (s, p_sw) in self.toward(w, d - 1) {
                if s != x {
                    *miss.entry(s).or_insert(1.0) *= 1.0 - p_sw * p_wx;
                }
            }
        }
        miss.remove(&x);
        let probs: HashMap<NodeId, f64> = miss
            .into_iter()
            .map(|(s, q)| (s, 1.0 - q))
            .filter(|&(_, p)| p > 0.0)
            .collect();
        self.memo.insert((x, d), probs.clone());
        probs
    }
}

/// Probability that `source` influences `target` within `hops` hops, under
/// the in-tree recursion described in the module docs. Zero when `source`
/// is not within `hops` of `target`.
pub fn influence_probability(
    graph: &SocialGraph,
    source: NodeId,
    target: NodeId,
    hops: usize,
) -> f64 {
    if source == target {
        return 1.0;
    }
    InTree::new(graph, target)
        .toward(target, hops)
        .get(&source)
        .copied()
        .unwrap_or(0.0)
}

/// Influence probability of every `h`-hop in-neighbor of `target`, sorted by
/// node id.
pub fn influence_probabilities(
    graph: &SocialGraph,
    target: NodeId,
    hops: usize,
) -> Vec<(NodeId, f64)> {
    let mut v: Vec<_> = InTree::new(graph, target)
        .toward(target, hops)
        .into_iter()
        .collect();
    v.sort_unstable_by_key(|&(s, _)| s);
    v
}

/// Expected earned benefit per node and the cost-scaled score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub earned_benefit: Vec<f64>,
    pub score: Vec<f64>,
}

/// Scores every node: own benefit plus `P(w -> t) * b(t)` for every target
/// `t` that `w` influences with probability at least `alpha`, divided by the
/// node's cost.
pub fn compute_scores(
    graph: &SocialGraph,
    economics: &NodeEconomics,
    config: &HopConfig,
) -> Result<ScoreTable, SelectionError> {
    config.validate()?;
    check_sizes(graph.node_count(), economics)?;
    let mut earned_benefit: Vec<f64> = economics.benefits().to_vec();

    let contributions: Vec<Vec<(NodeId, f64)>> = economics
        .targets()
        .par_iter()
        .map(|&t| {
            let bt = economics.benefit(t);
            influence_probabilities(graph, t, config.hops)
                .into_iter()
                .filter(|&(_, p)| p >= config.alpha)
                .map(|(w, p)| (w, p * bt))
                .collect()
        })
        .collect();
    // targets ascending, sources ascending within a target
    for per_target in contributions {
        for (w, c) in per_target {
            earned_benefit[w] += c;
        }
    }

    let score = earned_benefit
        .iter()
        .enumerate()
        .map(|(u, eb)| eb / economics.cost(u))
        .collect();
    Ok(ScoreTable {
        earned_benefit,
        score,
    })
}

/// Ranks nodes by score (ties: lower id) and scans once, taking each node
/// that fits the remaining budget.
pub fn select_by_scores(
    scores: &ScoreTable,
    economics: &NodeEconomics,
    budget: f64,
    skip_zero: bool,
) -> Result<SelectionResult, SelectionError> {
    check_budget(budget)?;
    let mut order: Vec<NodeId> = (0..scores.score.len()).collect();
    order.sort_by(|&a, &b| scores.score[b].total_cmp(&scores.score[a]).then(a.cmp(&b)));

    let mut wallet = Budget::new(budget);
    let mut result = SelectionResult::empty(StopReason::Exhausted);
    for u in order {
        if wallet.exhausted() {
            break;
        }
        if skip_zero && scores.score[u] <= 0.0 {
            result.stop = StopReason::NoPositiveGain;
            break;
        }
        let cost = economics.cost(u);
        if wallet.affords(cost) {
            wallet.pay(cost);
            result.push(u, scores.score[u], cost, budget, 0);
        }
    }
    Ok(result)
}

/// Hop-based heuristic selection. When `oracle` is given the chosen set's
/// benefit under it is attached for reporting.
pub fn hop_based_select<O: BenefitOracle>(
    graph: &SocialGraph,
    economics: &NodeEconomics,
    config: &HopConfig,
    budget: f64,
    oracle: Option<&O>,
) -> Result<SelectionResult, SelectionError> {
    check_budget(budget)?;
    let scores = compute_scores(graph, economics, config)?;
    let mut result = select_by_scores(&scores, economics, budget, config.skip_zero)?;
    if let Some(o) = oracle {
        result.estimated_benefit = Some(o.benefit(&result.seeds));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::ExactOracle;

    fn graph(n: usize, edges: &[(NodeId, NodeId, f64)]) -> SocialGraph {
        SocialGraph::from_edges(n, edges.iter().copied(), true).unwrap()
    }

    #[test]
    fn neighborhood_examples() {
        let g = graph(3, &[(0, 1, 0.5), (1, 2, 0.5)]);
        assert_eq!(h_hop_in_neighborhood(&g, 2, 2), vec![(1, 1), (0, 2)]);
        let lone = graph(2, &[]);
        assert!(h_hop_in_neighborhood(&lone, 1, 3).is_empty());
        let p = graph(4, &[(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5)]);
        assert_eq!(h_hop_in_neighborhood(&p, 3, 2), vec![(2, 1), (1, 2)]);
    }

    #[test]
    fn direct_edge_probability() {
        let g = graph(2, &[(0, 1, 0.3)]);
        assert!((influence_probability(&g, 0, 1, 1) - 0.3).abs() < 1e-15);
        assert!((influence_probability(&g, 0, 1, 3) - 0.3).abs() < 1e-15);
        assert_eq!(influence_probability(&g, 1, 0, 3), 0.0);
    }

    #[test]
    fn two_disjoint_paths() {
        // s=0, a=1, b=2, t=3
        let g = graph(4, &[(0, 1, 0.5), (1, 3, 0.5), (0, 2, 0.5), (2, 3, 0.5)]);
        let p = influence_probability(&g, 0, 3, 2);
        assert!((p - 0.4375).abs() < 1e-15, "{p}");
        // one hop is not enough
        assert_eq!(influence_probability(&g, 0, 3, 1), 0.0);
    }

    #[test]
    fn unreachable_within_depth() {
        let g = graph(4, &[(0, 1, 0.9), (1, 2, 0.9), (2, 3, 0.9)]);
        assert_eq!(influence_probability(&g, 0, 3, 2), 0.0);
        assert!(influence_probability(&g, 0, 3, 3) > 0.0);
    }

    #[test]
    fn no_targets_scores_zero() {
        let g = graph(3, &[(0, 1, 0.5)]);
        let econ = NodeEconomics::new(vec![1.0; 3], vec![], vec![0.0; 3]).unwrap();
        let s = compute_scores(&g, &econ, &HopConfig::default()).unwrap();
        assert!(s.score.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn lone_target_score() {
        let g = graph(3, &[(0, 1, 0.5)]);
        let econ = NodeEconomics::new(vec![1.0, 1.0, 2.0], vec![2], vec![0.0, 0.0, 10.0]).unwrap();
        let s = compute_scores(&g, &econ, &HopConfig::default()).unwrap();
        assert_eq!(s.score, vec![0.0, 0.0, 5.0]);
    }

    #[test]
    fn single_effective_in_neighbor() {
        let g = graph(2, &[(0, 1, 0.2)]);
        let econ = NodeEconomics::new(vec![1.0, 1.0], vec![1], vec![0.0, 10.0]).unwrap();
        let s = compute_scores(&g, &econ, &HopConfig::default()).unwrap();
        assert!((s.score[0] - 2.0).abs() < 1e-12);
        assert_eq!(s.score[1], 10.0);
        // below the cut-off the neighbor earns nothing
        let strict = HopConfig::new(2, 0.25).unwrap();
        let s = compute_scores(&g, &econ, &strict).unwrap();
        assert_eq!(s.score[0], 0.0);
    }

    fn table(score: Vec<f64>) -> ScoreTable {
        ScoreTable {
            earned_benefit: score.clone(),
            score,
        }
    }

    #[test]
    fn scan_takes_top_scores() {
        let econ = NodeEconomics::new(vec![1.0; 3], vec![], vec![0.0; 3]).unwrap();
        let r = select_by_scores(&table(vec![5.0, 3.0, 1.0]), &econ, 2.0, false).unwrap();
        assert_eq!(r.seeds, vec![0, 1]);
    }

    #[test]
    fn scan_skips_unaffordable_and_continues() {
        let econ = NodeEconomics::new(vec![10.0, 1.0], vec![], vec![0.0; 2]).unwrap();
        let r = select_by_scores(&table(vec![5.0, 3.0]), &econ, 1.0, false).unwrap();
        assert_eq!(r.seeds, vec![1]);
    }

    #[test]
    fn zero_scores_in_id_order() {
        let econ = NodeEconomics::new(vec![1.0; 4], vec![], vec![0.0; 4]).unwrap();
        let r = select_by_scores(&table(vec![0.0; 4]), &econ, 100.0, false).unwrap();
        assert_eq!(r.seeds, vec![0, 1, 2, 3]);
        let r = select_by_scores(&table(vec![0.0; 4]), &econ, 100.0, true).unwrap();
        assert!(r.seeds.is_empty());
        assert_eq!(r.stop, StopReason::NoPositiveGain);
    }

    #[test]
    fn rejects_bad_config_and_budget() {
        assert!(HopConfig::new(0, 0.1).is_err());
        assert!(HopConfig::new(2, 1.5).is_err());
        let g = graph(2, &[(0, 1, 0.2)]);
        let econ = NodeEconomics::new(vec![1.0, 1.0], vec![1], vec![0.0, 10.0]).unwrap();
        assert!(
            hop_based_select::<ExactOracle>(&g, &econ, &HopConfig::default(), 0.0, None).is_err()
        );
    }

    #[test]
    fn reports_benefit_under_oracle() {
        let g = graph(2, &[(0, 1, 0.2)]);
        let econ = NodeEconomics::new(vec![1.0, 1.0], vec![1], vec![0.0, 10.0]).unwrap();
        let oracle = ExactOracle::new(&g, &econ).unwrap();
        let r = hop_based_select(&g, &econ, &HopConfig::default(), 1.0, Some(&oracle)).unwrap();
        assert_eq!(r.seeds, vec![1]);
        assert_eq!(r.estimated_benefit, Some(10.0));
    }
}
