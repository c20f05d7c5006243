//! Independent Cascade diffusion and earned-benefit estimation.
//!
//! The estimator works on a fixed, pre-committed collection of live-edge
//! samples: sample `p` keeps arc `a` iff `hash(master seed, p, a) < P(a)`.
//! Samples are never materialized; each reachability query regenerates the
//! liveness bits it touches. Because the collection is fixed, the estimate is
//! itself a monotone submodular set function, which lazy greedy relies on.
//!
//! Per-sample benefits are always summed over reached targets in ascending
//! node order and samples are reduced in index order. With non-negative
//! benefits this makes estimates monotone and marginal gains submodular
//! exactly in floating point, independent of the worker count.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::Rng;
use rayon::prelude::*;
use rayon::ThreadPool;
use thiserror::Error;

use crate::graph::{NodeEconomics, NodeId, SocialGraph};
use crate::hash;

/// Largest edge count accepted by [`exact_benefit_bruteforce`].
pub const BRUTEFORCE_MAX_EDGES: usize = 20;
/// Largest arc count accepted by [`ExactOracle`].
pub const EXACT_ORACLE_MAX_ARCS: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum DiffusionError {
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("node {0} is already in the seed set")]
    AlreadySeeded(NodeId),
    #[error("edge probabilities have not been assigned")]
    UnassignedProbabilities,
    #[error("graph has {m} arcs, exhaustive enumeration is limited to {limit}")]
    TooManyEdges { m: usize, limit: usize },
    #[error("graph has {n} nodes, exhaustive oracle is limited to 64")]
    TooManyNodes { n: usize },
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("economics cover {economics} nodes but the graph has {graph}")]
    SizeMismatch { graph: usize, economics: usize },
    #[error("failed to build worker pool: {0}")]
    WorkerPool(String),
}

fn check_nodes(n: usize, nodes: &[NodeId]) -> Result<(), DiffusionError> {
    match nodes.iter().find(|&&u| u >= n) {
        Some(&node) => Err(DiffusionError::NodeOutOfRange { node, n }),
        None => Ok(()),
    }
}

fn check_instance(graph: &SocialGraph, economics: &NodeEconomics) -> Result<(), DiffusionError> {
    if graph.node_count() != economics.node_count() {
        return Err(DiffusionError::SizeMismatch {
            graph: graph.node_count(),
            economics: economics.node_count(),
        });
    }
    if !graph.probabilities_assigned() {
        return Err(DiffusionError::UnassignedProbabilities);
    }
    Ok(())
}

/// Sums benefits of `nodes` after sorting them by id.
#[inline]
fn ordered_benefit(economics: &NodeEconomics, nodes: &mut [NodeId]) -> f64 {
    nodes.sort_unstable();
    crate::sum(nodes.iter().map(|&u| economics.benefit(u)))
}

/// Outcome of one cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeResult {
    /// Influenced nodes in activation order; seeds first.
    pub influenced: Vec<NodeId>,
    /// Round in which each entry of `influenced` became active (seeds: 0).
    pub activated_at: Vec<usize>,
    /// Rounds in which at least one new activation happened.
    pub steps: usize,
}

impl CascadeResult {
    /// Influenced set after `round` rounds.
    pub fn active_after(&self, round: usize) -> &[NodeId] {
        let end = self.activated_at.partition_point(|&r| r <= round);
        &self.influenced[..end]
    }
}

/// Runs one Independent Cascade from `seeds`.
///
/// Every newly active node gets a single attempt at each inactive
/// out-neighbor, succeeding with the arc probability. Ends when a round
/// activates nobody.
pub fn simulate_cascade<R: Rng + ?Sized>(
    graph: &SocialGraph,
    seeds: &[NodeId],
    rng: &mut R,
) -> Result<CascadeResult, DiffusionError> {
    let n = graph.node_count();
    check_nodes(n, seeds)?;
    let mut active = vec![false; n];
    let mut influenced = Vec::new();
    let mut activated_at = Vec::new();
    for &s in seeds {
        if !active[s] {
            active[s] = true;
            influenced.push(s);
            activated_at.push(0);
        }
    }
    let mut frontier_start = 0;
    let mut round = 0;
    while frontier_start < influenced.len() {
        let frontier_end = influenced.len();
        for i in frontier_start..frontier_end {
            let u = influenced[i];
            for (v, arc) in graph.out_arcs(u) {
                if !active[v] && rng.gen::<f64>() < graph.arc_probability(arc) {
                    active[v] = true;
                    influenced.push(v);
                    activated_at.push(round + 1);
                }
            }
        }
        if influenced.len() > frontier_end {
            round += 1;
        }
        frontier_start = frontier_end;
    }
    Ok(CascadeResult {
        influenced,
        activated_at,
        steps: round,
    })
}

#[inline]
fn sample_key(seed: u64, sample: usize) -> u64 {
    hash::derive(seed, sample as u64)
}

/// Whether `arc` is live in the sample identified by `key`.
#[inline]
fn arc_is_live(key: u64, arc: usize, probability: f64) -> bool {
    probability >= 1.0 || hash::unit(key, arc as u64) < probability
}

/// One realization of the live-edge process: each arc kept independently with
/// its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct LiveEdgeSample {
    pub index: usize,
    /// Ids of the kept arcs, ascending.
    pub live_arcs: Vec<usize>,
    offsets: Vec<usize>,
    heads: Vec<NodeId>,
}

impl LiveEdgeSample {
    fn from_live_arcs(graph: &SocialGraph, index: usize, live_arcs: Vec<usize>) -> Self {
        let n = graph.node_count();
        let mut offsets = vec![0usize; n + 1];
        for &a in &live_arcs {
            offsets[graph.arcs()[a].source + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut heads = vec![0; live_arcs.len()];
        for &a in &live_arcs {
            let arc = graph.arcs()[a];
            heads[cursor[arc.source]] = arc.target;
            cursor[arc.source] += 1;
        }
        Self {
            index,
            live_arcs,
            offsets,
            heads,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Nodes reachable from `seeds` over live arcs, seeds included, ascending.
    pub fn reachable(&self, seeds: &[NodeId]) -> Result<Vec<NodeId>, DiffusionError> {
        let n = self.node_count();
        check_nodes(n, seeds)?;
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        for &s in seeds {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        let mut reached = Vec::new();
        while let Some(u) = stack.pop() {
            reached.push(u);
            for &v in &self.heads[self.offsets[u]..self.offsets[u + 1]] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        reached.sort_unstable();
        Ok(reached)
    }
}

/// Materializes live-edge sample `index` of the collection keyed by
/// `master_seed`. Identical to the sample the estimator uses internally.
pub fn sample_live_graph(graph: &SocialGraph, index: usize, master_seed: u64) -> LiveEdgeSample {
    let key = sample_key(master_seed, index);
    let live = graph
        .arcs()
        .iter()
        .enumerate()
        .filter(|(a, arc)| arc.probability > 0.0 && arc_is_live(key, *a, arc.probability))
        .map(|(a, _)| a)
        .collect();
    LiveEdgeSample::from_live_arcs(graph, index, live)
}

/// Benefit of the targets reachable from `seeds` in one sample.
pub fn earned_benefit_on_sample(
    sample: &LiveEdgeSample,
    economics: &NodeEconomics,
    seeds: &[NodeId],
) -> Result<f64, DiffusionError> {
    let mut reached = sample.reachable(seeds)?;
    Ok(ordered_benefit(economics, &mut reached))
}

/// Exact expected earned benefit by enumerating all `2^m` live-edge subsets.
///
/// Each subset is weighted by `prod kept p * prod dropped (1 - p)` and its
/// reach is found by relaxing arcs to a fixed point. Only for tiny graphs.
pub fn exact_benefit_bruteforce(
    graph: &SocialGraph,
    economics: &NodeEconomics,
    seeds: &[NodeId],
) -> Result<f64, DiffusionError> {
    check_instance(graph, economics)?;
    let n = graph.node_count();
    check_nodes(n, seeds)?;
    let arcs = graph.arcs();
    let m = arcs.len();
    if m > BRUTEFORCE_MAX_EDGES {
        return Err(DiffusionError::TooManyEdges {
            m,
            limit: BRUTEFORCE_MAX_EDGES,
        });
    }
    let mut total = 0.0;
    let mut active = vec![false; n];
    for mask in 0u32..(1u32 << m) {
        let mut weight = 1.0;
        for (i, a) in arcs.iter().enumerate() {
            weight *= if mask >> i & 1 == 1 {
                a.probability
            } else {
                1.0 - a.probability
            };
        }
        if weight == 0.0 {
            continue;
        }
        active.iter_mut().for_each(|x| *x = false);
        for &s in seeds {
            active[s] = true;
        }
        loop {
            let mut changed = false;
            for (i, a) in arcs.iter().enumerate() {
                if mask >> i & 1 == 1 && active[a.source] && !active[a.target] {
                    active[a.target] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let benefit = crate::sum((0..n).filter(|&u| active[u]).map(|u| economics.benefit(u)));
        total += weight * benefit;
    }
    Ok(total)
}

/// A set function over seed sets that greedy selection can maximize.
///
/// `Cover` is the incremental state for a growing seed set: it must support
/// adding a seed and querying the marginal gain of a candidate against it.
pub trait BenefitOracle: Sync {
    type Cover: Send;

    fn node_count(&self) -> usize;
    fn economics(&self) -> &NodeEconomics;
    fn empty_cover(&self) -> Self::Cover;
    /// Gain of adding `u` to the seed set represented by `cover`.
    fn gain(&self, cover: &Self::Cover, u: NodeId) -> f64;
    fn insert(&self, cover: &mut Self::Cover, u: NodeId);
    /// Benefit of the seed set represented by `cover`.
    fn value(&self, cover: &Self::Cover) -> f64;

    fn benefit(&self, seeds: &[NodeId]) -> f64 {
        let mut cover = self.empty_cover();
        for &s in seeds {
            self.insert(&mut cover, s);
        }
        self.value(&cover)
    }
}

/// Per-worker scratch for reachability queries.
struct Scratch {
    mark: Vec<u32>,
    epoch: u32,
    stack: Vec<NodeId>,
    found: Vec<NodeId>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            mark: vec![0; n],
            epoch: 0,
            stack: Vec::new(),
            found: Vec::new(),
        }
    }

    /// Starts a new visitation epoch. Nodes marked with any epoch `>= e` are
    /// visited from the point of view of epoch `e`.
    fn next_epoch(&mut self) -> u32 {
        if self.epoch == u32::MAX {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }
}

/// Monte Carlo estimate of expected earned benefit over a fixed collection of
/// `R` live-edge samples.
pub struct BenefitEstimator<'a> {
    graph: &'a SocialGraph,
    economics: &'a NodeEconomics,
    samples: usize,
    seed: u64,
    pool: Option<Arc<ThreadPool>>,
}

impl<'a> BenefitEstimator<'a> {
    pub fn new(
        graph: &'a SocialGraph,
        economics: &'a NodeEconomics,
        samples: usize,
        seed: u64,
    ) -> Result<Self, DiffusionError> {
        check_instance(graph, economics)?;
        if samples == 0 {
            return Err(DiffusionError::NoSamples);
        }
        Ok(Self {
            graph,
            economics,
            samples,
            seed,
            pool: None,
        })
    }

    /// Runs sample-parallel work on a dedicated pool of `workers` threads
    /// instead of the global rayon pool. Results do not depend on `workers`.
    pub fn with_workers(mut self, workers: usize) -> Result<Self, DiffusionError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| DiffusionError::WorkerPool(e.to_string()))?;
        self.pool = Some(Arc::new(pool));
        Ok(self)
    }

    /// Shares an existing pool.
    pub fn with_pool(mut self, pool: Arc<ThreadPool>) -> Self {
        self.pool = Some(pool);
        self
    }

    pub fn sample_count(&self) -> usize {
        self.samples
    }

    pub fn master_seed(&self) -> u64 {
        self.seed
    }

    pub fn graph(&self) -> &SocialGraph {
        self.graph
    }

    /// Materializes sample `index` of this estimator's collection.
    pub fn sample(&self, index: usize) -> LiveEdgeSample {
        sample_live_graph(self.graph, index, self.seed)
    }

    fn install<T: Send>(&self, op: impl FnOnce() -> T + Send) -> T {
        match &self.pool {
            Some(pool) => pool.install(op),
            None => op(),
        }
    }

    /// Per-sample values of `f`, in sample order.
    fn per_sample<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&mut Scratch, usize) -> f64 + Sync + Send,
    {
        let n = self.graph.node_count();
        self.install(|| {
            (0..self.samples)
                .into_par_iter()
                .with_min_len(32)
                .map_init(|| Scratch::new(n), |scratch, p| f(scratch, p))
                .collect()
        })
    }

    fn mean(&self, values: &[f64]) -> f64 {
        crate::sum(values.iter().copied()) / self.samples as f64
    }

    /// Marks everything reachable from `sources` in sample `p` with `epoch`,
    /// skipping nodes already visited in any epoch `>= floor`. Reached
    /// targets are appended to `scratch.found`.
    fn spread(&self, scratch: &mut Scratch, p: usize, sources: &[NodeId], epoch: u32, floor: u32) {
        let key = sample_key(self.seed, p);
        let Scratch {
            mark, stack, found, ..
        } = scratch;
        for &s in sources {
            if mark[s] < floor {
                mark[s] = epoch;
                stack.push(s);
            }
        }
        while let Some(u) = stack.pop() {
            if self.economics.benefit(u) > 0.0 {
                found.push(u);
            }
            for (v, arc) in self.graph.out_arcs(u) {
                if mark[v] < floor && arc_is_live(key, arc, self.graph.arc_probability(arc)) {
                    mark[v] = epoch;
                    stack.push(v);
                }
            }
        }
    }

    fn sample_benefit(&self, scratch: &mut Scratch, p: usize, seeds: &[NodeId]) -> f64 {
        let epoch = scratch.next_epoch();
        scratch.found.clear();
        self.spread(scratch, p, seeds, epoch, epoch);
        let mut found = std::mem::take(&mut scratch.found);
        let b = ordered_benefit(self.economics, &mut found);
        scratch.found = found;
        b
    }

    /// Earned benefit of `seeds` in each sample, in sample order.
    pub fn sample_benefits(&self, seeds: &[NodeId]) -> Result<Vec<f64>, DiffusionError> {
        check_nodes(self.graph.node_count(), seeds)?;
        Ok(self.per_sample(|scratch, p| self.sample_benefit(scratch, p, seeds)))
    }

    /// Mean earned benefit of `seeds` over the sample collection.
    pub fn estimate_benefit(&self, seeds: &[NodeId]) -> Result<f64, DiffusionError> {
        Ok(self.mean(&self.sample_benefits(seeds)?))
    }

    /// Mean and sample standard deviation of the per-sample benefit.
    pub fn estimate_with_stddev(&self, seeds: &[NodeId]) -> Result<(f64, f64), DiffusionError> {
        let values = self.sample_benefits(seeds)?;
        let mean = self.mean(&values);
        let sd = if values.len() > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (values.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok((mean, sd))
    }

    /// Gain in estimated benefit from adding `u` to `seeds`.
    ///
    /// Computed per sample as the benefit of targets reachable from `u` but
    /// not from `seeds`, which equals the difference of the two estimates up
    /// to floating-point rounding.
    pub fn marginal_gain(&self, seeds: &[NodeId], u: NodeId) -> Result<f64, DiffusionError> {
        let n = self.graph.node_count();
        check_nodes(n, seeds)?;
        check_nodes(n, &[u])?;
        if seeds.contains(&u) {
            return Err(DiffusionError::AlreadySeeded(u));
        }
        let values = self.per_sample(|scratch, p| {
            let base = scratch.next_epoch();
            scratch.found.clear();
            self.spread(scratch, p, seeds, base, base);
            scratch.found.clear();
            let extra = scratch.next_epoch();
            self.spread(scratch, p, &[u], extra, base);
            let mut found = std::mem::take(&mut scratch.found);
            let b = ordered_benefit(self.economics, &mut found);
            scratch.found = found;
            b
        });
        Ok(self.mean(&values))
    }
}

/// Reachability state of a growing seed set: one bitset per sample.
pub struct SampleCover {
    covered: Vec<FixedBitSet>,
}

impl BenefitOracle for BenefitEstimator<'_> {
    type Cover = SampleCover;

    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn economics(&self) -> &NodeEconomics {
        self.economics
    }

    fn empty_cover(&self) -> SampleCover {
        SampleCover {
            covered: vec![FixedBitSet::with_capacity(self.graph.node_count()); self.samples],
        }
    }

    fn gain(&self, cover: &SampleCover, u: NodeId) -> f64 {
        let values = self.per_sample(|scratch, p| {
            let covered = &cover.covered[p];
            if covered.contains(u) {
                return 0.0;
            }
            let key = sample_key(self.seed, p);
            let epoch = scratch.next_epoch();
            scratch.found.clear();
            let Scratch {
                mark, stack, found, ..
            } = scratch;
            mark[u] = epoch;
            stack.push(u);
            while let Some(x) = stack.pop() {
                if self.economics.benefit(x) > 0.0 {
                    found.push(x);
                }
                for (v, arc) in self.graph.out_arcs(x) {
                    if mark[v] < epoch
                        && !covered.contains(v)
                        && arc_is_live(key, arc, self.graph.arc_probability(arc))
                    {
                        mark[v] = epoch;
                        stack.push(v);
                    }
                }
            }
            ordered_benefit(self.economics, found)
        });
        self.mean(&values)
    }

    fn insert(&self, cover: &mut SampleCover, u: NodeId) {
        self.install(|| {
            cover
                .covered
                .par_iter_mut()
                .enumerate()
                .with_min_len(32)
                .for_each_init(Vec::new, |stack, (p, covered)| {
                    if covered.put(u) {
                        return;
                    }
                    let key = sample_key(self.seed, p);
                    stack.push(u);
                    while let Some(x) = stack.pop() {
                        for (v, arc) in self.graph.out_arcs(x) {
                            if !covered.contains(v)
                                && arc_is_live(key, arc, self.graph.arc_probability(arc))
                            {
                                covered.insert(v);
                                stack.push(v);
                            }
                        }
                    }
                })
        })
    }

    fn value(&self, cover: &SampleCover) -> f64 {
        let targets = self.economics.targets();
        let values: Vec<f64> = self.install(|| {
            cover
                .covered
                .par_iter()
                .with_min_len(32)
                .map(|covered| {
                    crate::sum(
                        targets
                            .iter()
                            .filter(|&&t| covered.contains(t))
                            .map(|&t| self.economics.benefit(t)),
                    )
                })
                .collect()
        });
        self.mean(&values)
    }

    fn benefit(&self, seeds: &[NodeId]) -> f64 {
        self.mean(&self.per_sample(|scratch, p| self.sample_benefit(scratch, p, seeds)))
    }
}

/// Exact expected benefit for tiny graphs, usable as a selection oracle.
///
/// Enumerates every live-edge scenario once and stores, per scenario, the
/// reach of every node as a bitmask.
pub struct ExactOracle<'a> {
    economics: &'a NodeEconomics,
    n: usize,
    weights: Vec<f64>,
    reach: Vec<Vec<u64>>,
}

impl<'a> ExactOracle<'a> {
    pub fn new(graph: &SocialGraph, economics: &'a NodeEconomics) -> Result<Self, DiffusionError> {
        check_instance(graph, economics)?;
        let n = graph.node_count();
        if n > 64 {
            return Err(DiffusionError::TooManyNodes { n });
        }
        let m = graph.edge_count();
        if m > EXACT_ORACLE_MAX_ARCS {
            return Err(DiffusionError::TooManyEdges {
                m,
                limit: EXACT_ORACLE_MAX_ARCS,
            });
        }
        let arcs = graph.arcs();
        let mut weights = Vec::new();
        let mut reach = Vec::new();
        for mask in 0u32..(1u32 << m) {
            let weight: f64 = arcs
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    if mask >> i & 1 == 1 {
                        a.probability
                    } else {
                        1.0 - a.probability
                    }
                })
                .product();
            if weight == 0.0 {
                continue;
            }
            let mut out = vec![0u64; n];
            for (i, a) in arcs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    out[a.source] |= 1 << a.target;
                }
            }
            let per_node = (0..n)
                .map(|u| {
                    let mut seen = 1u64 << u;
                    let mut frontier = seen;
                    while frontier != 0 {
                        let x = frontier.trailing_zeros() as usize;
                        frontier &= frontier - 1;
                        let new = out[x] & !seen;
                        seen |= new;
                        frontier |= new;
                    }
                    seen
                })
                .collect();
            weights.push(weight);
            reach.push(per_node);
        }
        Ok(Self {
            economics,
            n,
            weights,
            reach,
        })
    }

    pub fn scenario_count(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    fn mask_benefit(&self, mut mask: u64) -> f64 {
        let mut total = 0.0;
        while mask != 0 {
            let u = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            total += self.economics.benefit(u);
        }
        total
    }
}

impl BenefitOracle for ExactOracle<'_> {
    /// Reached-node mask per scenario.
    type Cover = Vec<u64>;

    fn node_count(&self) -> usize {
        self.n
    }

    fn economics(&self) -> &NodeEconomics {
        self.economics
    }

    fn empty_cover(&self) -> Vec<u64> {
        vec![0; self.weights.len()]
    }

    fn gain(&self, cover: &Vec<u64>, u: NodeId) -> f64 {
        crate::sum(
            self.weights
                .iter()
                .zip(&self.reach)
                .zip(cover)
                .map(|((w, reach), c)| w * self.mask_benefit(reach[u] & !c)),
        )
    }

    fn insert(&self, cover: &mut Vec<u64>, u: NodeId) {
        for (c, reach) in cover.iter_mut().zip(&self.reach) {
            *c |= reach[u];
        }
    }

    fn value(&self, cover: &Vec<u64>) -> f64 {
        crate::sum(
            self.weights
                .iter()
                .zip(cover)
                .map(|(w, c)| w * self.mask_benefit(*c)),
        )
    }
}
