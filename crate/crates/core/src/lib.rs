//! Earned benefit maximization (EBM) under the Independent Cascade model.
//!
//! Given a social network with per-edge influence probabilities, a per-node
//! selection cost and a set of target nodes carrying a benefit, the task is to
//! pick a seed set within a budget that maximizes the expected benefit of the
//! targets reached by the cascade.
//!
//! The crate is organized as:
//!
//! * [`graph`]: the network, edge-list I/O and the probability, cost and
//!   benefit assignment schemes.
//! * [`diffusion`]: cascade simulation, live-edge sampling, the Monte Carlo
//!   [`BenefitEstimator`](diffusion::BenefitEstimator) and an exact
//!   enumeration oracle for small graphs.
//! * [`greedy`]: cost-ratio greedy, its modified variant with the
//!   `1 - 1/sqrt(e)` guarantee, and the lazy (priority queue) variant.
//! * [`hop`]: the hop-based heuristic scoring nodes by the expected benefit of
//!   targets within `h` hops.
//! * [`baselines`]: maximum degree, degree discount and single discount.
//! * [`harness`]: budget sweeps, synthetic graph generators and CSV output.

pub mod baselines;
pub mod diffusion;
pub mod graph;
pub mod greedy;
pub mod harness;
mod hash;
pub mod hop;
mod selection;

pub use diffusion::{
    exact_benefit_bruteforce, BenefitEstimator, BenefitOracle, CascadeResult, DiffusionError,
    ExactOracle, LiveEdgeSample,
};
pub use graph::{
    AssignmentScheme, BenefitScheme, CostScheme, GraphError, NodeEconomics, NodeId,
    ProbabilityScheme, SocialGraph,
};
pub use selection::{SelectionError, SelectionResult, StopReason, TraceStep};

/// Left-to-right sum starting from `+0.0`, so an empty sum is never `-0.0`.
#[inline]
pub(crate) fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| acc + v)
}
