//! Greedy seed selection under a knapsack budget.
//!
//! * [`greedy_ratio_select`] adds, one at a time, the affordable node with the
//!   largest marginal gain per unit cost.
//! * [`modified_greedy_select`] returns the better of that set and the best
//!   affordable single node, which restores a `1 - 1/sqrt(e)` guarantee.
//! * [`lazy_greedy_select`] produces the same sequence as
//!   [`greedy_ratio_select`] while re-evaluating only nodes whose cached
//!   gain-per-cost might still be the maximum.
//!
//! All three work against any [`BenefitOracle`]. Ties in the argmax go to the
//! lowest node id.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::diffusion::BenefitOracle;
use crate::graph::NodeId;
use crate::selection::{check_budget, Budget, SelectionError, SelectionResult, StopReason};

/// `1 - 1/sqrt(e)`, the approximation factor of the modified greedy.
pub const APPROXIMATION_FACTOR: f64 = 0.393_469_340_287_366_6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GreedyOptions {
    /// Keep adding affordable nodes even when the best gain is zero.
    pub strict: bool,
}

/// `(ratio, node)` ordered by ratio, then by lower id.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    ratio: f64,
    gain: f64,
    node: NodeId,
    round: usize,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        self.cmp(other) == Ordering::Greater
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ratio
            .total_cmp(&other.ratio)
            .then_with(|| other.node.cmp(&self.node))
    }
}

fn finish<O: BenefitOracle>(
    oracle: &O,
    cover: &O::Cover,
    mut result: SelectionResult,
) -> SelectionResult {
    result.estimated_benefit = Some(oracle.value(cover));
    result
}

/// Cost-ratio incremental greedy.
pub fn greedy_ratio_select<O: BenefitOracle>(
    oracle: &O,
    budget: f64,
    options: GreedyOptions,
) -> Result<SelectionResult, SelectionError> {
    check_budget(budget)?;
    let economics = oracle.economics();
    let n = oracle.node_count();
    let mut cover = oracle.empty_cover();
    let mut chosen = vec![false; n];
    let mut wallet = Budget::new(budget);
    let mut result = SelectionResult::empty(StopReason::NothingAffordable);

    while !wallet.exhausted() {
        let mut best: Option<Candidate> = None;
        let mut evaluations = 0;
        for (v, &taken) in chosen.iter().enumerate() {
            if taken || !wallet.affords(economics.cost(v)) {
                continue;
            }
            let gain = oracle.gain(&cover, v);
            evaluations += 1;
            let c = Candidate {
                ratio: gain / economics.cost(v),
                gain,
                node: v,
                round: 0,
            };
            if best.is_none_or(|b| c.beats(&b)) {
                best = Some(c);
            }
        }
        let Some(best) = best else {
            result.evaluations += evaluations;
            result.stop = StopReason::NothingAffordable;
            return Ok(finish(oracle, &cover, result));
        };
        if best.ratio <= 0.0 && !options.strict {
            result.evaluations += evaluations;
            result.stop = StopReason::NoPositiveGain;
            return Ok(finish(oracle, &cover, result));
        }
        let cost = economics.cost(best.node);
        wallet.pay(cost);
        chosen[best.node] = true;
        oracle.insert(&mut cover, best.node);
        result.push(best.node, best.gain, cost, budget, evaluations);
    }
    result.stop = StopReason::NothingAffordable;
    Ok(finish(oracle, &cover, result))
}

/// Affordable node with the largest single-node benefit, with that benefit.
pub fn best_single_node<O: BenefitOracle>(
    oracle: &O,
    budget: f64,
) -> Result<(Option<NodeId>, f64, usize), SelectionError> {
    check_budget(budget)?;
    let economics = oracle.economics();
    let cover = oracle.empty_cover();
    let mut best: Option<(NodeId, f64)> = None;
    let mut evaluations = 0;
    for v in 0..oracle.node_count() {
        if economics.cost(v) > budget {
            continue;
        }
        let b = oracle.gain(&cover, v);
        evaluations += 1;
        if best.is_none_or(|(_, bb)| b > bb) {
            best = Some((v, b));
        }
    }
    Ok(match best {
        Some((v, b)) => (Some(v), b, evaluations),
        None => (None, 0.0, evaluations),
    })
}

/// Better of the cost-ratio greedy set and the best affordable single node.
/// Ties go to the greedy set.
pub fn modified_greedy_select<O: BenefitOracle>(
    oracle: &O,
    budget: f64,
    options: GreedyOptions,
) -> Result<SelectionResult, SelectionError> {
    let mut greedy = greedy_ratio_select(oracle, budget, options)?;
    let (single, single_benefit, single_evals) = best_single_node(oracle, budget)?;
    let greedy_benefit = greedy.estimated_benefit.unwrap_or(0.0);
    match single {
        Some(u) if single_benefit > greedy_benefit => {
            let mut result = SelectionResult::empty(StopReason::BestSingleNode);
            result.push(
                u,
                single_benefit,
                oracle.economics().cost(u),
                budget,
                single_evals,
            );
            result.evaluations += greedy.evaluations;
            result.estimated_benefit = Some(single_benefit);
            Ok(result)
        }
        _ => {
            greedy.evaluations += single_evals;
            Ok(greedy)
        }
    }
}

/// Lazy-evaluation greedy.
///
/// Cached gain-per-cost values are upper bounds on current ones because the
/// oracle is submodular. A popped candidate whose value was computed in the
/// current round is committed; a stale one is re-evaluated and pushed back.
/// Returns the same seed sequence as [`greedy_ratio_select`].
pub fn lazy_greedy_select<O: BenefitOracle>(
    oracle: &O,
    budget: f64,
    options: GreedyOptions,
) -> Result<SelectionResult, SelectionError> {
    check_budget(budget)?;
    let economics = oracle.economics();
    let mut cover = oracle.empty_cover();
    let mut wallet = Budget::new(budget);
    let mut result = SelectionResult::empty(StopReason::NothingAffordable);

    let mut round = 0;
    let mut evaluations = 0;
    let mut heap: BinaryHeap<Candidate> = (0..oracle.node_count())
        .filter(|&v| wallet.affords(economics.cost(v)))
        .map(|v| {
            let gain = oracle.gain(&cover, v);
            evaluations += 1;
            Candidate {
                ratio: gain / economics.cost(v),
                gain,
                node: v,
                round,
            }
        })
        .collect();

    while !wallet.exhausted() {
        let Some(top) = heap.pop() else {
            result.stop = StopReason::NothingAffordable;
            break;
        };
        let cost = economics.cost(top.node);
        if !wallet.affords(cost) {
            // budget only shrinks, so it never becomes affordable again
            continue;
        }
        if top.round != round {
            let gain = oracle.gain(&cover, top.node);
            evaluations += 1;
            heap.push(Candidate {
                ratio: gain / cost,
                gain,
                node: top.node,
                round,
            });
            continue;
        }
        if top.ratio <= 0.0 && !options.strict {
            result.stop = StopReason::NoPositiveGain;
            break;
        }
        wallet.pay(cost);
        oracle.insert(&mut cover, top.node);
        result.push(top.node, top.gain, cost, budget, evaluations);
        evaluations = 0;
        round += 1;
    }
    result.evaluations += evaluations;
    Ok(finish(oracle, &cover, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{BenefitEstimator, ExactOracle};
    use crate::graph::{NodeEconomics, SocialGraph};

    /// Isolated cheap target `u` (node 0) next to a certain 4-clique of
    /// expensive targets, budget 4.
    fn ratio_trap() -> (SocialGraph, NodeEconomics) {
        let mut edges = Vec::new();
        for a in 1..=4 {
            for b in (a + 1)..=4 {
                edges.push((a, b, 1.0));
            }
        }
        let g = SocialGraph::from_edges(5, edges, false).unwrap();
        let econ = NodeEconomics::new(
            vec![0.5, 4.0, 4.0, 4.0, 4.0],
            (0..5).collect(),
            vec![1.0; 5],
        )
        .unwrap();
        (g, econ)
    }

    #[test]
    fn ratio_trap_greedy_picks_isolated_node() {
        let (g, econ) = ratio_trap();
        let est = BenefitEstimator::new(&g, &econ, 100, 1).unwrap();
        let r = greedy_ratio_select(&est, 4.0, GreedyOptions::default()).unwrap();
        assert_eq!(r.seeds, vec![0]);
        assert_eq!(r.estimated_benefit, Some(1.0));
        assert_eq!(4.0 - r.spent, 3.5);
        assert_eq!(r.stop, StopReason::NothingAffordable);

        let lazy = lazy_greedy_select(&est, 4.0, GreedyOptions::default()).unwrap();
        assert_eq!(lazy.seeds, vec![0]);
    }

    #[test]
    fn ratio_trap_modified_greedy_picks_clique() {
        let (g, econ) = ratio_trap();
        let est = BenefitEstimator::new(&g, &econ, 100, 1).unwrap();
        let (node, b, _) = best_single_node(&est, 4.0).unwrap();
        assert_eq!(node, Some(1));
        assert_eq!(b, 4.0);
        let r = modified_greedy_select(&est, 4.0, GreedyOptions::default()).unwrap();
        assert_eq!(r.seeds, vec![1]);
        assert_eq!(r.estimated_benefit, Some(4.0));
        assert_eq!(r.stop, StopReason::BestSingleNode);
    }

    #[test]
    fn single_affordable_target() {
        let g = SocialGraph::from_edges(1, [], true).unwrap();
        let econ = NodeEconomics::new(vec![2.0], vec![0], vec![9.0]).unwrap();
        let oracle = ExactOracle::new(&g, &econ).unwrap();
        let r = greedy_ratio_select(&oracle, 3.0, GreedyOptions::default()).unwrap();
        assert_eq!(r.seeds, vec![0]);
        assert_eq!(r.estimated_benefit, Some(9.0));
        assert_eq!(best_single_node(&oracle, 3.0).unwrap().0, Some(0));
        assert_eq!(best_single_node(&oracle, 3.0).unwrap().1, 9.0);
    }

    #[test]
    fn nothing_affordable() {
        let g = SocialGraph::from_edges(3, [(0, 1, 0.5)], true).unwrap();
        let econ = NodeEconomics::new(vec![5.0; 3], vec![1], vec![0.0, 3.0, 0.0]).unwrap();
        let oracle = ExactOracle::new(&g, &econ).unwrap();
        for select in [
            greedy_ratio_select::<ExactOracle>,
            lazy_greedy_select,
            modified_greedy_select,
        ] {
            let r = select(&oracle, 1.0, GreedyOptions::default()).unwrap();
            assert!(r.seeds.is_empty());
            assert_eq!(r.estimated_benefit, Some(0.0));
        }
        assert_eq!(best_single_node(&oracle, 1.0).unwrap(), (None, 0.0, 0));
    }

    #[test]
    fn empty_target_set() {
        let g = SocialGraph::from_edges(3, [(0, 1, 0.5)], true).unwrap();
        let econ = NodeEconomics::new(vec![1.0; 3], vec![], vec![0.0; 3]).unwrap();
        let oracle = ExactOracle::new(&g, &econ).unwrap();
        let r = modified_greedy_select(&oracle, 10.0, GreedyOptions::default()).unwrap();
        assert_eq!(r.estimated_benefit, Some(0.0));
        assert!(r.seeds.is_empty());
        assert_eq!(r.stop, StopReason::NoPositiveGain);
    }

    #[test]
    fn strict_mode_spends_on_zero_gain_nodes() {
        let g = SocialGraph::from_edges(3, [], true).unwrap();
        let econ = NodeEconomics::new(vec![1.0; 3], vec![1], vec![0.0, 2.0, 0.0]).unwrap();
        let oracle = ExactOracle::new(&g, &econ).unwrap();
        let lenient = greedy_ratio_select(&oracle, 10.0, GreedyOptions::default()).unwrap();
        assert_eq!(lenient.seeds, vec![1]);
        let strict = greedy_ratio_select(&oracle, 10.0, GreedyOptions { strict: true }).unwrap();
        assert_eq!(strict.seeds, vec![1, 0, 2]);
        let lazy = lazy_greedy_select(&oracle, 10.0, GreedyOptions { strict: true }).unwrap();
        assert_eq!(lazy.seeds, strict.seeds);
    }

    #[test]
    fn tie_goes_to_lower_id() {
        let g = SocialGraph::from_edges(3, [], true).unwrap();
        let econ = NodeEconomics::new(vec![1.0; 3], vec![0, 1, 2], vec![2.0, 5.0, 5.0]).unwrap();
        let oracle = ExactOracle::new(&g, &econ).unwrap();
        let r = greedy_ratio_select(&oracle, 1.0, GreedyOptions::default()).unwrap();
        assert_eq!(r.seeds, vec![1]);
        let r = lazy_greedy_select(&oracle, 1.0, GreedyOptions::default()).unwrap();
        assert_eq!(r.seeds, vec![1]);
    }

    #[test]
    fn greedy_already_contains_best_single() {
        // star whose center reaches everything: both branches agree
        let g = SocialGraph::from_edges(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)], true).unwrap();
        let econ =
            NodeEconomics::new(vec![1.0; 4], vec![1, 2, 3], vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        let oracle = ExactOracle::new(&g, &econ).unwrap();
        let greedy = greedy_ratio_select(&oracle, 1.0, GreedyOptions::default()).unwrap();
        let modified = modified_greedy_select(&oracle, 1.0, GreedyOptions::default()).unwrap();
        assert_eq!(greedy.seeds, vec![0]);
        assert_eq!(modified.seeds, greedy.seeds);
        assert_eq!(modified.estimated_benefit, Some(3.0));
        assert_eq!(modified.stop, StopReason::NothingAffordable);
    }

    #[test]
    fn lazy_commits_dominant_center_without_reevaluating_leaves() {
        let g = SocialGraph::from_edges(
            6,
            [(0, 3, 1.0), (0, 4, 1.0), (0, 5, 1.0), (1, 2, 1.0)],
            true,
        )
        .unwrap();
        let econ = NodeEconomics::new(
            vec![1.0; 6],
            vec![2, 3, 4, 5],
            vec![0.0, 0.0, 1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        let oracle = ExactOracle::new(&g, &econ).unwrap();
        let lazy = lazy_greedy_select(&oracle, 2.0, GreedyOptions::default()).unwrap();
        let eager = greedy_ratio_select(&oracle, 2.0, GreedyOptions::default()).unwrap();
        assert_eq!(lazy.seeds, vec![0, 1]);
        assert_eq!(lazy.seeds, eager.seeds);
        // round 1: all six singletons; round 2: node 1 is re-evaluated and
        // immediately stays on top
        assert_eq!(lazy.trace[0].evaluations, 6);
        assert_eq!(lazy.trace[1].evaluations, 1);
        assert!(lazy.evaluations < eager.evaluations);
    }

    #[test]
    fn invalid_budget() {
        let (g, econ) = ratio_trap();
        let oracle = ExactOracle::new(&g, &econ).unwrap();
        for b in [0.0, -1.0, f64::NAN] {
            assert!(greedy_ratio_select(&oracle, b, GreedyOptions::default()).is_err());
            assert!(lazy_greedy_select(&oracle, b, GreedyOptions::default()).is_err());
        }
    }

    #[test]
    fn approximation_constant() {
        let closed_form = 1.0 - 1.0 / std::f64::consts::E.sqrt();
        assert!((APPROXIMATION_FACTOR - closed_form).abs() < 1e-15);
    }
}
