//! Degree-based baselines. They rank purely by (discounted) degree and only
//! use costs to stay within the budget.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::graph::{NodeEconomics, NodeId, SocialGraph};
use crate::selection::{
    check_budget, check_sizes, Budget, SelectionError, SelectionResult, StopReason,
};

/// Highest degree first; unaffordable nodes are skipped.
pub fn max_degree_select(
    graph: &SocialGraph,
    economics: &NodeEconomics,
    budget: f64,
) -> Result<SelectionResult, SelectionError> {
    check_budget(budget)?;
    check_sizes(graph.node_count(), economics)?;
    let mut order: Vec<NodeId> = (0..graph.node_count()).collect();
    order.sort_by_key(|&u| (std::cmp::Reverse(graph.neighbor_degree(u)), u));

    let mut wallet = Budget::new(budget);
    let mut result = SelectionResult::empty(StopReason::Exhausted);
    for u in order {
        if wallet.exhausted() {
            break;
        }
        let cost = economics.cost(u);
        if wallet.affords(cost) {
            wallet.pay(cost);
            result.push(u, graph.neighbor_degree(u) as f64, cost, budget, 0);
        }
    }
    Ok(result)
}

/// How a seeded neighbor lowers a node's effective degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Discount {
    /// Minus one per seeded neighbor.
    Single,
    /// `d - 2t - (d - t) * t * p`, with `p` fixed, or the probability of the
    /// arc from the new seed when `None`.
    Degree(Option<f64>),
}

/// Effective degree under the degree discount rule.
pub fn degree_discounted(degree: f64, seeded_neighbors: f64, p: f64) -> f64 {
    let (d, t) = (degree, seeded_neighbors);
    d - (2.0 * t + (d - t) * t * p)
}

/// Per-node discount bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountState {
    pub effective_degree: Vec<f64>,
    pub seeded_neighbors: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    score: f64,
    node: NodeId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Neighbors of `u` (in and out) with the probability of the arc `u -> v`
/// when one exists, else of `v -> u`. Each neighbor appears once.
fn neighbors(graph: &SocialGraph, u: NodeId) -> Vec<(NodeId, f64)> {
    let mut out: Vec<(NodeId, f64)> = graph
        .out_arcs(u)
        .map(|(v, a)| (v, graph.arc_probability(a)))
        .collect();
    if graph.is_directed() {
        for (v, a) in graph.in_arcs(u) {
            if !out.iter().any(|&(w, _)| w == v) {
                out.push((v, graph.arc_probability(a)));
            }
        }
    }
    out
}

/// Repeatedly seeds the affordable node with the highest effective degree,
/// then discounts its non-seed neighbors.
pub fn discount_select(
    graph: &SocialGraph,
    economics: &NodeEconomics,
    budget: f64,
    discount: Discount,
) -> Result<(SelectionResult, DiscountState), SelectionError> {
    check_budget(budget)?;
    check_sizes(graph.node_count(), economics)?;
    if let Discount::Degree(Some(p)) = discount {
        if !(0.0..=1.0).contains(&p) {
            return Err(SelectionError::InvalidParameter(format!(
                "discount probability {p} outside [0, 1]"
            )));
        }
    }
    let n = graph.node_count();
    let degree: Vec<f64> = (0..n).map(|u| graph.neighbor_degree(u) as f64).collect();
    let mut state = DiscountState {
        effective_degree: degree.clone(),
        seeded_neighbors: vec![0; n],
    };
    let mut seeded = vec![false; n];
    let mut heap: BinaryHeap<Entry> = (0..n)
        .map(|u| Entry {
            score: degree[u],
            node: u,
        })
        .collect();

    let mut wallet = Budget::new(budget);
    let mut result = SelectionResult::empty(StopReason::Exhausted);
    while let Some(Entry { score, node: u }) = heap.pop() {
        if wallet.exhausted() {
            break;
        }
        if seeded[u] || score != state.effective_degree[u] {
            continue;
        }
        let cost = economics.cost(u);
        if !wallet.affords(cost) {
            continue;
        }
        wallet.pay(cost);
        seeded[u] = true;
        result.push(u, score, cost, budget, 0);

        for (v, p_uv) in neighbors(graph, u) {
            if seeded[v] {
                continue;
            }
            state.seeded_neighbors[v] += 1;
            let t = state.seeded_neighbors[v] as f64;
            state.effective_degree[v] = match discount {
                Discount::Single => degree[v] - t,
                Discount::Degree(p) => degree_discounted(degree[v], t, p.unwrap_or(p_uv)),
            };
            heap.push(Entry {
                score: state.effective_degree[v],
                node: v,
            });
        }
    }
    Ok((result, state))
}

/// Degree discount with propagation probability `p`, or per-arc
/// probabilities when `p` is `None`.
pub fn degree_discount_select(
    graph: &SocialGraph,
    economics: &NodeEconomics,
    budget: f64,
    p: Option<f64>,
) -> Result<SelectionResult, SelectionError> {
    discount_select(graph, economics, budget, Discount::Degree(p)).map(|(r, _)| r)
}

/// Single discount: each seeded neighbor costs one unit of degree.
pub fn single_discount_select(
    graph: &SocialGraph,
    economics: &NodeEconomics,
    budget: f64,
) -> Result<SelectionResult, SelectionError> {
    discount_select(graph, economics, budget, Discount::Single).map(|(r, _)| r)
}
