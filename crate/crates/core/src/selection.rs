use thiserror::Error;

use crate::diffusion::DiffusionError;
use crate::graph::{GraphError, NodeEconomics, NodeId};

#[derive(Debug, Error, PartialEq)]
pub enum SelectionError {
    #[error("budget must be positive, got {0}")]
    InvalidBudget(f64),
    #[error("economics cover {economics} nodes but the graph has {graph}")]
    SizeMismatch { graph: usize, economics: usize },
    #[error("invalid heuristic parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
}

impl From<GraphError> for SelectionError {
    fn from(e: GraphError) -> Self {
        SelectionError::InvalidParameter(e.to_string())
    }
}

pub(crate) fn check_budget(budget: f64) -> Result<(), SelectionError> {
    if budget > 0.0 && budget.is_finite() {
        Ok(())
    } else {
        Err(SelectionError::InvalidBudget(budget))
    }
}

pub(crate) fn check_sizes(graph_n: usize, economics: &NodeEconomics) -> Result<(), SelectionError> {
    if graph_n == economics.node_count() {
        Ok(())
    } else {
        Err(SelectionError::SizeMismatch {
            graph: graph_n,
            economics: economics.node_count(),
        })
    }
}

/// One committed seed.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub node: NodeId,
    /// Marginal gain for the greedy algorithms, the ranking score for the
    /// heuristics.
    pub gain: f64,
    /// Budget left after paying for `node`.
    pub remaining_budget: f64,
    /// Benefit-function evaluations spent choosing this node.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// No remaining candidate fits the budget.
    NothingAffordable,
    /// The best affordable candidate would add no benefit.
    NoPositiveGain,
    /// A single-pass heuristic reached the end of its ranking.
    Exhausted,
    /// The modified greedy returned the best single node.
    BestSingleNode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Seeds in the order they were chosen.
    pub seeds: Vec<NodeId>,
    pub spent: f64,
    /// Benefit under the selection-time oracle; `None` for heuristics run
    /// without one.
    pub estimated_benefit: Option<f64>,
    pub trace: Vec<TraceStep>,
    pub stop: StopReason,
    /// Evaluations in the trace plus any spent after the last commit.
    pub evaluations: usize,
}

impl SelectionResult {
    pub(crate) fn empty(stop: StopReason) -> Self {
        Self {
            seeds: Vec::new(),
            spent: 0.0,
            estimated_benefit: None,
            trace: Vec::new(),
            stop,
            evaluations: 0,
        }
    }

    pub(crate) fn push(
        &mut self,
        node: NodeId,
        gain: f64,
        cost: f64,
        budget: f64,
        evaluations: usize,
    ) {
        self.seeds.push(node);
        self.spent += cost;
        self.evaluations += evaluations;
        self.trace.push(TraceStep {
            node,
            gain,
            remaining_budget: budget - self.spent,
            evaluations,
        });
    }
}

/// Budget bookkeeping shared by the selectors. Remaining budget is derived
/// from the running spend so every selector agrees on affordability.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Budget {
    total: f64,
    spent: f64,
}

impl Budget {
    pub(crate) fn new(total: f64) -> Self {
        Self { total, spent: 0.0 }
    }

    #[inline]
    pub(crate) fn affords(&self, cost: f64) -> bool {
        self.spent + cost <= self.total
    }

    pub(crate) fn pay(&mut self, cost: f64) {
        self.spent += cost;
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.spent >= self.total
    }
}
