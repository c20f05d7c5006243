//! Experiment runner: budget sweeps over the selection algorithms with
//! deterministic seeding and held-out Monte Carlo evaluation.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{degree_discount_select, max_degree_select, single_discount_select};
use crate::diffusion::{BenefitEstimator, DiffusionError};
use crate::graph::{load_edge_list, AssignmentScheme, GraphError, ProbabilityScheme, SocialGraph};
use crate::greedy::{lazy_greedy_select, modified_greedy_select, GreedyOptions};
use crate::hash::derive;
use crate::hop::{hop_based_select, HopConfig};
use crate::selection::{SelectionError, SelectionResult};

/// Graphs above this size need `allow_slow_igaag` to run the eager greedy.
pub const IGAAG_NODE_LIMIT: usize = 5000;

/// Exact CSV header.
pub const CSV_HEADER: &str =
    "dataset,algorithm,prob_setting,cost_setting,budget,seed_count,spent,benefit_mean,benefit_std,eval_count,seconds";

// Seed streams derived from the master seed.
const STREAM_ASSIGNMENT: u64 = 0;
const STREAM_SELECTION: u64 = 1;
const STREAM_HELD_OUT: u64 = 1_000;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("failed to read graph {path}: {source}")]
    Graph { path: PathBuf, source: GraphError },
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit code: 2 for configuration errors, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Modified greedy (eager) with the approximation guarantee.
    Igaag,
    /// Lazy greedy.
    Igaip,
    /// Hop-based heuristic.
    Hbh,
    MaxDeg,
    DegDis,
    SinDis,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Igaag,
        Algorithm::Igaip,
        Algorithm::Hbh,
        Algorithm::MaxDeg,
        Algorithm::DegDis,
        Algorithm::SinDis,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Igaag => "igaag",
            Algorithm::Igaip => "igaip",
            Algorithm::Hbh => "hbh",
            Algorithm::MaxDeg => "maxdeg",
            Algorithm::DegDis => "degdis",
            Algorithm::SinDis => "sindis",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown algorithm `{s}`")))
    }
}

/// Parses `uniform:P` or `trivalency`.
pub fn parse_probability_scheme(s: &str) -> Result<ProbabilityScheme, HarnessError> {
    if s == "trivalency" {
        return Ok(ProbabilityScheme::Trivalency);
    }
    let p = s
        .strip_prefix("uniform:")
        .and_then(|p| p.parse::<f64>().ok())
        .ok_or_else(|| HarnessError::Config(format!("bad probability setting `{s}`")))?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(HarnessError::Config(format!(
            "uniform probability {p} outside (0, 1]"
        )));
    }
    Ok(ProbabilityScheme::Uniform(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EconomicsSetting {
    /// Costs from `[1, 50]`, target benefits from `[50, 100]`.
    Random,
    /// Degree-proportional costs, unit benefits.
    DegreeProportional,
}

impl EconomicsSetting {
    /// The budget sweep used for this setting when none is given.
    pub fn default_budgets(&self) -> Vec<f64> {
        match self {
            EconomicsSetting::Random => (1..=8).map(|i| 2000.0 * i as f64).collect(),
            EconomicsSetting::DegreeProportional => (1..=8).map(|i| 100.0 * i as f64).collect(),
        }
    }
}

impl FromStr for EconomicsSetting {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(EconomicsSetting::Random),
            "degprop" => Ok(EconomicsSetting::DegreeProportional),
            _ => Err(HarnessError::Config(format!("unknown cost setting `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub graph: PathBuf,
    pub directed: bool,
    pub probability: ProbabilityScheme,
    pub economics: EconomicsSetting,
    pub target_fraction: f64,
    pub budgets: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    /// Live-edge samples per estimator.
    pub samples: usize,
    pub hop: HopConfig,
    pub seed: u64,
    /// Independent held-out estimators averaged for the reported benefit.
    pub reps: usize,
    pub out: Option<PathBuf>,
    /// Estimator worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Write measured seconds; when off the column is written as 0.
    pub timing: bool,
    pub allow_slow_igaag: bool,
    pub greedy: GreedyOptions,
}

impl ExperimentConfig {
    pub fn new(graph: impl Into<PathBuf>) -> Self {
        Self {
            graph: graph.into(),
            directed: false,
            probability: ProbabilityScheme::Uniform(0.1),
            economics: EconomicsSetting::Random,
            target_fraction: 0.2,
            budgets: EconomicsSetting::Random.default_budgets(),
            algorithms: vec![
                Algorithm::Igaag,
                Algorithm::Igaip,
                Algorithm::Hbh,
                Algorithm::MaxDeg,
                Algorithm::DegDis,
                Algorithm::SinDis,
            ],
            samples: 10_000,
            hop: HopConfig::default(),
            seed: 0,
            reps: 5,
            out: None,
            threads: None,
            timing: true,
            allow_slow_igaag: false,
            greedy: GreedyOptions::default(),
        }
    }

    pub fn assignment(&self) -> AssignmentScheme {
        let seed = derive(self.seed, STREAM_ASSIGNMENT);
        let mut scheme = match self.economics {
            EconomicsSetting::Random => AssignmentScheme::random(self.probability, seed),
            EconomicsSetting::DegreeProportional => {
                AssignmentScheme::degree_proportional(self.probability, seed)
            }
        };
        scheme.target_fraction = self.target_fraction;
        scheme
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let config = |m: String| Err(HarnessError::Config(m));
        if self.budgets.is_empty() {
            return config("budget list is empty".into());
        }
        if let Some(b) = self.budgets.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return config(format!("budget {b} must be positive"));
        }
        if self.algorithms.is_empty() {
            return config("algorithm list is empty".into());
        }
        if self.samples == 0 {
            return config("sample count must be at least 1".into());
        }
        if self.reps == 0 {
            return config("evaluation repetitions must be at least 1".into());
        }
        if self.threads == Some(0) {
            return config("thread count must be at least 1".into());
        }
        self.hop
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.assignment()
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))
    }

    fn dataset_name(&self) -> String {
        self.graph
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "graph".into())
    }
}

/// One (budget, algorithm) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub algorithm: String,
    pub prob_setting: String,
    pub cost_setting: String,
    pub budget: f64,
    pub seed_count: usize,
    pub spent: f64,
    pub benefit_mean: f64,
    pub benefit_std: f64,
    pub eval_count: usize,
    pub seconds: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = crate::sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

pub fn load_graph(path: &Path, directed: bool) -> Result<SocialGraph, HarnessError> {
    let wrap = |source| HarnessError::Graph {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(|e| wrap(GraphError::Io(e)))?;
    load_edge_list(BufReader::new(file), directed).map_err(wrap)
}

/// Runs one selection algorithm on a prepared instance.
pub fn run_algorithm(
    algorithm: Algorithm,
    graph: &SocialGraph,
    estimator: &BenefitEstimator<'_>,
    probability: ProbabilityScheme,
    hop: &HopConfig,
    greedy: GreedyOptions,
    budget: f64,
) -> Result<SelectionResult, SelectionError> {
    let economics = crate::diffusion::BenefitOracle::economics(estimator);
    match algorithm {
        Algorithm::Igaag => modified_greedy_select(estimator, budget, greedy),
        Algorithm::Igaip => lazy_greedy_select(estimator, budget, greedy),
        Algorithm::Hbh => hop_based_select::<BenefitEstimator>(graph, economics, hop, budget, None),
        Algorithm::MaxDeg => max_degree_select(graph, economics, budget),
        Algorithm::DegDis => {
            let p = match probability {
                ProbabilityScheme::Uniform(p) => Some(p),
                ProbabilityScheme::Trivalency => None,
            };
            degree_discount_select(graph, economics, budget, p)
        }
        Algorithm::SinDis => single_discount_select(graph, economics, budget),
    }
}

/// Runs the sweep and, when `config.out` is set, writes the CSV atomically.
///
/// Every algorithm sees the same graph, probabilities, costs, targets and
/// benefits. Reported benefit comes from `reps` held-out estimators whose
/// samples are independent of the selection-time estimator.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    config.validate()?;
    let mut graph = load_graph(&config.graph, config.directed)?;
    if config.algorithms.contains(&Algorithm::Igaag)
        && graph.node_count() > IGAAG_NODE_LIMIT
        && !config.allow_slow_igaag
    {
        return Err(HarnessError::Config(format!(
            "igaag on {} nodes needs --allow-slow-igaag (limit {IGAAG_NODE_LIMIT})",
            graph.node_count()
        )));
    }
    let scheme = config.assignment();
    let economics = scheme
        .apply(&mut graph)
        .map_err(|e| HarnessError::Config(e.to_string()))?;

    let pool = match config.threads {
        Some(t) => Some(Arc::new(
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| HarnessError::Config(e.to_string()))?,
        )),
        None => None,
    };
    fn attach<'a>(
        est: BenefitEstimator<'a>,
        pool: &Option<Arc<rayon::ThreadPool>>,
    ) -> BenefitEstimator<'a> {
        match pool {
            Some(p) => est.with_pool(p.clone()),
            None => est,
        }
    }
    let selection = attach(
        BenefitEstimator::new(
            &graph,
            &economics,
            config.samples,
            derive(config.seed, STREAM_SELECTION),
        )?,
        &pool,
    );
    let held_out: Vec<BenefitEstimator> = (0..config.reps)
        .map(|k| {
            BenefitEstimator::new(
                &graph,
                &economics,
                config.samples,
                derive(config.seed, STREAM_HELD_OUT + k as u64),
            )
            .map(|est| attach(est, &pool))
        })
        .collect::<Result<_, _>>()?;

    let dataset = config.dataset_name();
    let mut rows = Vec::with_capacity(config.budgets.len() * config.algorithms.len());
    for &budget in &config.budgets {
        for &algorithm in &config.algorithms {
            let start = Instant::now();
            let result = run_algorithm(
                algorithm,
                &graph,
                &selection,
                config.probability,
                &config.hop,
                config.greedy,
                budget,
            )?;
            let seconds = if config.timing {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            };
            let benefits = held_out
                .iter()
                .map(|est| est.estimate_benefit(&result.seeds))
                .collect::<Result<Vec<_>, _>>()?;
            let (benefit_mean, benefit_std) = mean_std(&benefits);
            info!(
                "{dataset} {algorithm} B={budget}: {} seeds, benefit {benefit_mean:.3}",
                result.seeds.len()
            );
            rows.push(ResultRow {
                dataset: dataset.clone(),
                algorithm: algorithm.name().into(),
                prob_setting: scheme.probability.code().into(),
                cost_setting: scheme.cost_code().into(),
                budget,
                seed_count: result.seeds.len(),
                spent: result.spent,
                benefit_mean,
                benefit_std,
                eval_count: result.evaluations,
                seconds,
            });
        }
    }
    if let Some(out) = &config.out {
        write_csv_atomic(out, &rows)?;
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ResultRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(HarnessError::Config(format!(
            "unexpected CSV header `{}`",
            header.join(",")
        )));
    }
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn write_csv_atomic(path: &Path, rows: &[ResultRow]) -> Result<(), HarnessError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut file = BufWriter::new(File::create(&tmp)?);
        write_csv(&mut file, rows)?;
        file.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    /// Uniform random undirected graph with `round(n * d / 2)` edges.
    Random { avg_degree: f64 },
    /// Preferential attachment: each new node links to `m0` existing nodes
    /// chosen proportionally to degree.
    Preferential { m0: usize },
}

/// Generates an undirected edge list over nodes `0..n`. Deterministic per
/// seed.
pub fn generate_synthetic(
    kind: SyntheticKind,
    n: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n < 2 {
        return Ok(Vec::new());
    }
    match kind {
        SyntheticKind::Random { avg_degree } => {
            if !(avg_degree >= 0.0 && avg_degree.is_finite()) {
                return Err(HarnessError::Config(format!(
                    "invalid average degree {avg_degree}"
                )));
            }
            let pairs = n * (n - 1) / 2;
            let m = (n as f64 * avg_degree / 2.0).round() as usize;
            if m > pairs {
                return Err(HarnessError::Config(format!(
                    "{m} edges requested but only {pairs} node pairs exist"
                )));
            }
            let mut seen = HashSet::with_capacity(m);
            let mut edges = Vec::with_capacity(m);
            while edges.len() < m {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a != b && seen.insert((a.min(b), a.max(b))) {
                    edges.push((a, b));
                }
            }
            Ok(edges)
        }
        SyntheticKind::Preferential { m0 } => {
            if m0 == 0 {
                return Err(HarnessError::Config("attachment count must be >= 1".into()));
            }
            let core = (m0 + 1).min(n);
            let mut edges = Vec::new();
            // every endpoint occurrence, so uniform picks are degree-weighted
            let mut endpoints = Vec::new();
            for a in 0..core {
                for b in (a + 1)..core {
                    edges.push((a, b));
                    endpoints.extend([a, b]);
                }
            }
            let mut picked = Vec::with_capacity(m0);
            for v in core..n {
                picked.clear();
                while picked.len() < m0 {
                    let u = endpoints[rng.gen_range(0..endpoints.len())];
                    if !picked.contains(&u) {
                        picked.push(u);
                    }
                }
                for &u in &picked {
                    edges.push((v, u));
                    endpoints.extend([v, u]);
                }
            }
            Ok(edges)
        }
    }
}

pub fn write_edges<W: Write>(mut out: W, edges: &[(usize, usize)]) -> std::io::Result<()> {
    for (a, b) in edges {
        writeln!(out, "{a} {b}")?;
    }
    Ok(())
}
