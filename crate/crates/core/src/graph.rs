//! Social network model, edge-list I/O and the assignment schemes for edge
//! probabilities, node costs, targets and benefits.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use log::warn;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Dense node identifier in `[0, n)`.
pub type NodeId = usize;

/// Lower bound applied to degree-proportional costs so isolated nodes keep a
/// strictly positive cost.
pub const MIN_COST: f64 = 1e-6;

/// The three probabilities of the trivalency setting.
pub const TRIVALENCY: [f64; 3] = [0.1, 0.01, 0.001];

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: probability {value} outside (0, 1]")]
    ProbabilityRange { line: usize, value: f64 },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: u64 },
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("invalid assignment scheme: {0}")]
    InvalidScheme(String),
    #[error("invalid node economics: {0}")]
    InvalidEconomics(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One input edge. Undirected edges are stored once here and expanded into
/// two arcs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    /// `0.0` until probabilities are assigned.
    pub probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub source: NodeId,
    pub target: NodeId,
    pub probability: f64,
    /// Index of the originating entry in [`SocialGraph::edges`].
    pub edge: usize,
}

/// Compressed adjacency for one direction.
#[derive(Debug, Clone, Default)]
struct Adjacency {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    arc_ids: Vec<usize>,
}

impl Adjacency {
    fn build(n: usize, arcs: &[Arc], forward: bool) -> Self {
        let endpoint = |a: &Arc| if forward { a.source } else { a.target };
        let other = |a: &Arc| if forward { a.target } else { a.source };
        let mut offsets = vec![0usize; n + 1];
        for a in arcs {
            offsets[endpoint(a) + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0; arcs.len()];
        let mut arc_ids = vec![0; arcs.len()];
        for (id, a) in arcs.iter().enumerate() {
            let slot = &mut cursor[endpoint(a)];
            neighbors[*slot] = other(a);
            arc_ids[*slot] = id;
            *slot += 1;
        }
        Self {
            offsets,
            neighbors,
            arc_ids,
        }
    }

    #[inline]
    fn range(&self, u: NodeId) -> std::ops::Range<usize> {
        self.offsets[u]..self.offsets[u + 1]
    }
}

/// Directed network with influence probabilities on its arcs.
///
/// Node ids are dense; the original labels from the edge list are kept in
/// [`SocialGraph::label`]. Immutable apart from probability assignment.
#[derive(Debug, Clone)]
pub struct SocialGraph {
    directed: bool,
    labels: Vec<u64>,
    edges: Vec<Edge>,
    arcs: Vec<Arc>,
    forward: Adjacency,
    reverse: Adjacency,
}

impl SocialGraph {
    /// Builds a graph over `n` dense nodes. Edges must be free of self-loops
    /// and duplicates.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
        directed: bool,
    ) -> Result<Self, GraphError> {
        let mut list = Vec::new();
        for (i, (s, t, p)) in edges.into_iter().enumerate() {
            for v in [s, t] {
                if v >= n {
                    return Err(GraphError::NodeOutOfRange { node: v, n });
                }
            }
            if s == t {
                return Err(GraphError::SelfLoop {
                    line: i + 1,
                    node: s as u64,
                });
            }
            if !(p == 0.0 || (p > 0.0 && p <= 1.0)) {
                return Err(GraphError::ProbabilityRange {
                    line: i + 1,
                    value: p,
                });
            }
            list.push(Edge {
                source: s,
                target: t,
                probability: p,
            });
        }
        Ok(Self::assemble((0..n as u64).collect(), list, directed))
    }

    fn assemble(labels: Vec<u64>, edges: Vec<Edge>, directed: bool) -> Self {
        let n = labels.len();
        let mut arcs = Vec::with_capacity(if directed {
            edges.len()
        } else {
            2 * edges.len()
        });
        for (i, e) in edges.iter().enumerate() {
            arcs.push(Arc {
                source: e.source,
                target: e.target,
                probability: e.probability,
                edge: i,
            });
            if !directed {
                arcs.push(Arc {
                    source: e.target,
                    target: e.source,
                    probability: e.probability,
                    edge: i,
                });
            }
        }
        let forward = Adjacency::build(n, &arcs, true);
        let reverse = Adjacency::build(n, &arcs, false);
        Self {
            directed,
            labels,
            edges,
            arcs,
            forward,
            reverse,
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of directed arcs (an undirected edge counts twice).
    pub fn edge_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Edges in input order, after duplicate removal.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Original label of a dense node id.
    pub fn label(&self, u: NodeId) -> u64 {
        self.labels[u]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Out-neighbors of `u` with the arc id of each connection.
    #[inline]
    pub fn out_arcs(&self, u: NodeId) -> impl Iterator<Item = (NodeId, usize)> + '_ {
        let r = self.forward.range(u);
        self.forward.neighbors[r.clone()]
            .iter()
            .copied()
            .zip(self.forward.arc_ids[r].iter().copied())
    }

    /// In-neighbors of `u` with the arc id of each connection.
    #[inline]
    pub fn in_arcs(&self, u: NodeId) -> impl Iterator<Item = (NodeId, usize)> + '_ {
        let r = self.reverse.range(u);
        self.reverse.neighbors[r.clone()]
            .iter()
            .copied()
            .zip(self.reverse.arc_ids[r].iter().copied())
    }

    #[inline]
    pub fn out_degree(&self, u: NodeId) -> usize {
        self.forward.range(u).len()
    }

    #[inline]
    pub fn in_degree(&self, u: NodeId) -> usize {
        self.reverse.range(u).len()
    }

    /// Total degree `in + out`, counted in arcs.
    pub fn degree(&self, u: NodeId) -> usize {
        self.out_degree(u) + self.in_degree(u)
    }

    /// Number of adjacent nodes: `in + out` for directed graphs, the
    /// undirected degree otherwise.
    pub fn neighbor_degree(&self, u: NodeId) -> usize {
        if self.directed {
            self.degree(u)
        } else {
            self.out_degree(u)
        }
    }

    #[inline]
    pub fn arc_probability(&self, arc: usize) -> f64 {
        self.arcs[arc].probability
    }

    /// True once every arc has a probability in `(0, 1]`.
    pub fn probabilities_assigned(&self) -> bool {
        self.arcs.iter().all(|a| a.probability > 0.0)
    }

    pub fn check_node(&self, u: NodeId) -> Result<(), GraphError> {
        if u < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                node: u,
                n: self.node_count(),
            })
        }
    }

    fn set_edge_probabilities(&mut self, probs: &[f64]) {
        debug_assert_eq!(probs.len(), self.edges.len());
        for (e, &p) in self.edges.iter_mut().zip(probs) {
            e.probability = p;
        }
        for a in &mut self.arcs {
            a.probability = probs[a.edge];
        }
    }

    /// Writes the graph in edge-list format using the original labels.
    /// Probabilities are written with 17 significant digits and omitted while
    /// unassigned.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.edges {
            let (s, t) = (self.labels[e.source], self.labels[e.target]);
            if e.probability > 0.0 {
                writeln!(out, "{s} {t} {:.16e}", e.probability)?;
            } else {
                writeln!(out, "{s} {t}")?;
            }
        }
        Ok(())
    }
}

/// Reads a whitespace-separated `src dst [prob]` edge list.
///
/// Labels are remapped to dense ids in order of first appearance. Lines that
/// are blank or start with `#` are skipped. Missing probabilities are stored
/// as `0.0` and must be assigned before simulation.
pub fn load_edge_list<R: BufRead>(input: R, directed: bool) -> Result<SocialGraph, GraphError> {
    let mut labels = Vec::new();
    let mut dense: HashMap<u64, NodeId> = HashMap::new();
    let mut edges: Vec<Option<(Edge, usize)>> = Vec::new();
    let mut seen: HashMap<(NodeId, NodeId), usize> = HashMap::new();

    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(GraphError::Parse {
                line: line_no,
                message: format!("expected `src dst [prob]`, got {} fields", fields.len()),
            });
        }
        let parse_id = |s: &str| {
            s.parse::<u64>().map_err(|_| GraphError::Parse {
                line: line_no,
                message: format!("invalid node id `{s}`"),
            })
        };
        let (a, b) = (parse_id(fields[0])?, parse_id(fields[1])?);
        let probability = match fields.get(2) {
            Some(s) => {
                let p: f64 = s.parse().map_err(|_| GraphError::Parse {
                    line: line_no,
                    message: format!("invalid probability `{s}`"),
                })?;
                if !(p > 0.0 && p <= 1.0) {
                    return Err(GraphError::ProbabilityRange {
                        line: line_no,
                        value: p,
                    });
                }
                p
            }
            None => 0.0,
        };
        if a == b {
            return Err(GraphError::SelfLoop {
                line: line_no,
                node: a,
            });
        }
        let mut intern = |label: u64| {
            *dense.entry(label).or_insert_with(|| {
                labels.push(label);
                labels.len() - 1
            })
        };
        let (s, t) = (intern(a), intern(b));
        let key = if directed {
            (s, t)
        } else {
            (s.min(t), s.max(t))
        };
        if let Some(prev) = seen.insert(key, edges.len()) {
            let (_, prev_line) = edges[prev].take().expect("duplicate tracked once");
            warn!("line {line_no}: duplicate edge {a} {b} replaces line {prev_line}");
        }
        edges.push(Some((
            Edge {
                source: s,
                target: t,
                probability,
            },
            line_no,
        )));
    }

    let edges = edges.into_iter().flatten().map(|(e, _)| e).collect();
    Ok(SocialGraph::assemble(labels, edges, directed))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbabilityScheme {
    /// Every edge gets the same probability.
    Uniform(f64),
    /// Each edge draws uniformly from `{0.1, 0.01, 0.001}`.
    Trivalency,
}

impl ProbabilityScheme {
    /// Setting code used in result tables: `U` or `T`.
    pub fn code(&self) -> &'static str {
        match self {
            ProbabilityScheme::Uniform(_) => "U",
            ProbabilityScheme::Trivalency => "T",
        }
    }

    fn validate(&self) -> Result<(), GraphError> {
        match *self {
            ProbabilityScheme::Uniform(p) if !(p > 0.0 && p <= 1.0) => Err(
                GraphError::InvalidScheme(format!("uniform probability {p} outside (0, 1]")),
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ProbabilityScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbabilityScheme::Uniform(p) => write!(f, "uniform:{p}"),
            ProbabilityScheme::Trivalency => f.write_str("trivalency"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostScheme {
    RandomUniform {
        lo: f64,
        hi: f64,
    },
    /// `n * deg(u) / (2m)` with `deg` the total arc degree.
    DegreeProportional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenefitScheme {
    RandomUniform { lo: f64, hi: f64 },
    Unit,
}

/// Complete description of how a loaded graph is turned into a problem
/// instance.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentScheme {
    pub probability: ProbabilityScheme,
    pub cost: CostScheme,
    pub benefit: BenefitScheme,
    pub target_fraction: f64,
    pub seed: u64,
}

impl AssignmentScheme {
    /// Random setting: costs from `[1, 50]`, target benefits from `[50, 100]`.
    pub fn random(probability: ProbabilityScheme, seed: u64) -> Self {
        Self {
            probability,
            cost: CostScheme::RandomUniform { lo: 1.0, hi: 50.0 },
            benefit: BenefitScheme::RandomUniform {
                lo: 50.0,
                hi: 100.0,
            },
            target_fraction: 0.2,
            seed,
        }
    }

    /// Degree-proportional costs with unit benefits.
    pub fn degree_proportional(probability: ProbabilityScheme, seed: u64) -> Self {
        Self {
            probability,
            cost: CostScheme::DegreeProportional,
            benefit: BenefitScheme::Unit,
            target_fraction: 0.2,
            seed,
        }
    }

    /// Setting code used in result tables: `R` or `D`.
    pub fn cost_code(&self) -> &'static str {
        match self.cost {
            CostScheme::RandomUniform { .. } => "R",
            CostScheme::DegreeProportional => "D",
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        self.probability.validate()?;
        if !(self.target_fraction > 0.0 && self.target_fraction <= 1.0) {
            return Err(GraphError::InvalidScheme(format!(
                "target fraction {} outside (0, 1]",
                self.target_fraction
            )));
        }
        if let CostScheme::RandomUniform { lo, hi } = self.cost {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(GraphError::InvalidScheme(format!(
                    "cost range [{lo}, {hi}] must satisfy 0 < lo <= hi"
                )));
            }
        }
        if let BenefitScheme::RandomUniform { lo, hi } = self.benefit {
            if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
                return Err(GraphError::InvalidScheme(format!(
                    "benefit range [{lo}, {hi}] must satisfy 0 <= lo <= hi"
                )));
            }
        }
        Ok(())
    }

    /// Assigns probabilities in place and returns the node economics, each
    /// from its own seed-derived stream.
    pub fn apply(&self, graph: &mut SocialGraph) -> Result<NodeEconomics, GraphError> {
        self.validate()?;
        assign_probabilities(graph, self.probability, crate::hash::derive(self.seed, 1))?;
        assign_economics(graph, self, crate::hash::derive(self.seed, 2))
    }
}

/// Sets every edge probability according to `scheme`. Undirected edges get a
/// single draw shared by both arcs; draws follow edge input order.
pub fn assign_probabilities(
    graph: &mut SocialGraph,
    scheme: ProbabilityScheme,
    seed: u64,
) -> Result<(), GraphError> {
    scheme.validate()?;
    let probs: Vec<f64> = match scheme {
        ProbabilityScheme::Uniform(p) => vec![p; graph.edges.len()],
        ProbabilityScheme::Trivalency => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..graph.edges.len())
                .map(|_| TRIVALENCY[rng.gen_range(0..TRIVALENCY.len())])
                .collect()
        }
    };
    graph.set_edge_probabilities(&probs);
    Ok(())
}

/// Number of targets drawn for a fraction of `n` nodes.
pub fn target_count(fraction: f64, n: usize) -> usize {
    // the epsilon keeps e.g. 0.29 * 100 from flooring to 28
    (((fraction * n as f64) + 1e-9).floor() as usize).min(n)
}

/// Draws targets, costs and benefits. Deterministic for a fixed seed.
pub fn assign_economics(
    graph: &SocialGraph,
    scheme: &AssignmentScheme,
    seed: u64,
) -> Result<NodeEconomics, GraphError> {
    scheme.validate()?;
    let n = graph.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut targets =
        index::sample(&mut rng, n, target_count(scheme.target_fraction, n)).into_vec();
    targets.sort_unstable();

    let cost: Vec<f64> = match scheme.cost {
        CostScheme::RandomUniform { lo, hi } => (0..n).map(|_| rng.gen_range(lo..=hi)).collect(),
        CostScheme::DegreeProportional => degree_proportional_costs(graph)
            .into_iter()
            .map(|c| c.max(MIN_COST))
            .collect(),
    };

    let mut benefit = vec![0.0; n];
    for &t in &targets {
        benefit[t] = match scheme.benefit {
            BenefitScheme::RandomUniform { lo, hi } => rng.gen_range(lo..=hi),
            BenefitScheme::Unit => 1.0,
        };
    }
    NodeEconomics::new(cost, targets, benefit)
}

/// Unclamped degree-proportional costs `n * deg(u) / (2m)`.
pub fn degree_proportional_costs(graph: &SocialGraph) -> Vec<f64> {
    let n = graph.node_count();
    let m = graph.edge_count();
    if m == 0 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|u| n as f64 * graph.degree(u) as f64 / (2.0 * m as f64))
        .collect()
}

/// Per-node costs, the target set and per-node benefits.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEconomics {
    cost: Vec<f64>,
    targets: Vec<NodeId>,
    benefit: Vec<f64>,
}

impl NodeEconomics {
    /// Validates and builds economics. `targets` may be in any order and is
    /// stored sorted.
    pub fn new(
        cost: Vec<f64>,
        mut targets: Vec<NodeId>,
        benefit: Vec<f64>,
    ) -> Result<Self, GraphError> {
        let n = cost.len();
        if benefit.len() != n {
            return Err(GraphError::InvalidEconomics(format!(
                "{} costs but {} benefits",
                n,
                benefit.len()
            )));
        }
        if let Some((u, c)) = cost
            .iter()
            .enumerate()
            .find(|(_, c)| !(**c > 0.0 && c.is_finite()))
        {
            return Err(GraphError::InvalidEconomics(format!(
                "cost of node {u} is {c}, must be positive"
            )));
        }
        targets.sort_unstable();
        targets.dedup();
        if let Some(&t) = targets.iter().find(|&&t| t >= n) {
            return Err(GraphError::NodeOutOfRange { node: t, n });
        }
        let mut is_target = vec![false; n];
        for &t in &targets {
            is_target[t] = true;
        }
        for (u, &b) in benefit.iter().enumerate() {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(GraphError::InvalidEconomics(format!(
                    "benefit of node {u} is {b}"
                )));
            }
            if b > 0.0 && !is_target[u] {
                return Err(GraphError::InvalidEconomics(format!(
                    "node {u} has benefit {b} but is not a target"
                )));
            }
        }
        Ok(Self {
            cost,
            targets,
            benefit,
        })
    }

    /// Every node a target with the given benefits, all costs `cost`.
    pub fn uniform_cost(cost: f64, benefit: Vec<f64>) -> Result<Self, GraphError> {
        let targets = benefit
            .iter()
            .enumerate()
            .filter(|(_, b)| **b > 0.0)
            .map(|(u, _)| u)
            .collect();
        Self::new(vec![cost; benefit.len()], targets, benefit)
    }

    pub fn node_count(&self) -> usize {
        self.cost.len()
    }

    #[inline]
    pub fn cost(&self, u: NodeId) -> f64 {
        self.cost[u]
    }

    #[inline]
    pub fn benefit(&self, u: NodeId) -> f64 {
        self.benefit[u]
    }

    pub fn costs(&self) -> &[f64] {
        &self.cost
    }

    pub fn benefits(&self) -> &[f64] {
        &self.benefit
    }

    /// Target ids in ascending order.
    pub fn targets(&self) -> &[NodeId] {
        &self.targets
    }

    pub fn total_cost(&self, seeds: &[NodeId]) -> f64 {
        crate::sum(seeds.iter().map(|&u| self.cost[u]))
    }

    /// Sum of all target benefits, the largest achievable earned benefit.
    pub fn total_benefit(&self) -> f64 {
        crate::sum(self.targets.iter().map(|&t| self.benefit[t]))
    }
}
