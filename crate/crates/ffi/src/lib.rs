//! C ABI over `ebm-core`.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free` function. Every fallible call returns an [`EbmStatus`];
//! on failure a message is available from [`ebm_last_error_message`] until the
//! next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ebm_core::baselines::{degree_discount_select, max_degree_select, single_discount_select};
use ebm_core::diffusion::{BenefitEstimator, DiffusionError};
use ebm_core::graph::{
    assign_economics, assign_probabilities, load_edge_list, AssignmentScheme, GraphError,
    NodeEconomics, ProbabilityScheme, SocialGraph,
};
use ebm_core::greedy::{lazy_greedy_select, modified_greedy_select, GreedyOptions};
use ebm_core::hop::{hop_based_select, HopConfig};
use ebm_core::{SelectionError, SelectionResult};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    /// Probabilities or economics have not been assigned yet.
    NotReady = 5,
    Selection = 6,
    Internal = 7,
}

/// Selection algorithms.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbmAlgorithm {
    Igaag = 0,
    Igaip = 1,
    Hbh = 2,
    MaxDeg = 3,
    DegDis = 4,
    SinDis = 5,
}

/// Cost and benefit setting.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbmEconomics {
    /// Costs in `[1, 50]`, target benefits in `[50, 100]`.
    Random = 0,
    /// Degree-proportional costs, unit benefits.
    DegreeProportional = 1,
}

/// Selection parameters. Obtain defaults from [`ebm_select_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EbmSelectOptions {
    pub algorithm: EbmAlgorithm,
    pub budget: f64,
    /// Live-edge samples for the greedy algorithms.
    pub samples: usize,
    pub seed: u64,
    pub hops: usize,
    pub alpha: f64,
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    /// Nonzero keeps buying zero-gain nodes while budget remains.
    pub strict: u8,
}

/// A loaded network with its assigned probabilities and economics.
pub struct EbmGraph {
    graph: SocialGraph,
    probability: Option<ProbabilityScheme>,
    economics: Option<NodeEconomics>,
}

/// A selected seed set.
pub struct EbmResult {
    inner: SelectionResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(EbmStatus, String);

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        let status = match e {
            GraphError::Io(_) => EbmStatus::Io,
            GraphError::Parse { .. }
            | GraphError::ProbabilityRange { .. }
            | GraphError::SelfLoop { .. } => EbmStatus::Parse,
            _ => EbmStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<DiffusionError> for Failure {
    fn from(e: DiffusionError) -> Self {
        let status = match e {
            DiffusionError::UnassignedProbabilities => EbmStatus::NotReady,
            _ => EbmStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<SelectionError> for Failure {
    fn from(e: SelectionError) -> Self {
        let status = match e {
            SelectionError::Diffusion(DiffusionError::UnassignedProbabilities) => {
                EbmStatus::NotReady
            }
            SelectionError::InvalidBudget(_) | SelectionError::InvalidParameter(_) => {
                EbmStatus::InvalidArgument
            }
            _ => EbmStatus::Selection,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(EbmStatus::InvalidArgument, message.into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EbmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EbmStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EbmStatus::Internal
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(EbmStatus::NullPointer, "null handle".into()))
}

unsafe fn borrow_mut<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(EbmStatus::NullPointer, "null handle".into()))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(EbmStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid("string is not valid UTF-8"))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            EbmStatus::NullPointer,
            "null output pointer".into(),
        ));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn wrap(graph: SocialGraph) -> EbmGraph {
    EbmGraph {
        graph,
        probability: None,
        economics: None,
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ebm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads an edge list from a file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ebm_graph_load_file(
    path: *const c_char,
    directed: u8,
    out: *mut *mut EbmGraph,
) -> EbmStatus {
    guard(|| {
        let path = text(path)?;
        let file = File::open(path).map_err(|e| Failure(EbmStatus::Io, format!("{path}: {e}")))?;
        let graph = load_edge_list(BufReader::new(file), directed != 0)?;
        store(out, wrap(graph))
    })
}

/// Parses an edge list held in memory.
///
/// # Safety
/// `edges` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ebm_graph_load_str(
    edges: *const c_char,
    directed: u8,
    out: *mut *mut EbmGraph,
) -> EbmStatus {
    guard(|| {
        let edges = text(edges)?;
        let graph = load_edge_list(edges.as_bytes(), directed != 0)?;
        store(out, wrap(graph))
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `graph` must come from a load call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ebm_graph_free(graph: *mut EbmGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of nodes, 0 for null.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ebm_graph_node_count(graph: *const EbmGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.node_count())
}

/// Number of arcs (undirected edges count twice), 0 for null.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ebm_graph_arc_count(graph: *const EbmGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.edge_count())
}

unsafe fn assign(graph: *mut EbmGraph, probability: ProbabilityScheme, seed: u64) -> EbmStatus {
    guard(|| {
        let g = borrow_mut(graph)?;
        assign_probabilities(&mut g.graph, probability, seed)?;
        g.probability = Some(probability);
        Ok(())
    })
}

/// Assigns the same probability `p` in `(0, 1]` to every arc.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ebm_graph_assign_uniform(graph: *mut EbmGraph, p: f64) -> EbmStatus {
    assign(graph, ProbabilityScheme::Uniform(p), 0)
}

/// Draws each edge's probability from {0.1, 0.01, 0.001}.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ebm_graph_assign_trivalency(graph: *mut EbmGraph, seed: u64) -> EbmStatus {
    assign(graph, ProbabilityScheme::Trivalency, seed)
}

/// Assigns costs, targets and benefits. `target_fraction` of the nodes
/// become targets.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ebm_graph_assign_economics(
    graph: *mut EbmGraph,
    setting: EbmEconomics,
    target_fraction: f64,
    seed: u64,
) -> EbmStatus {
    guard(|| {
        let g = borrow_mut(graph)?;
        let probability = g
            .probability
            .ok_or_else(|| Failure(EbmStatus::NotReady, "assign probabilities first".into()))?;
        let mut scheme = match setting {
            EbmEconomics::Random => AssignmentScheme::random(probability, seed),
            EbmEconomics::DegreeProportional => {
                AssignmentScheme::degree_proportional(probability, seed)
            }
        };
        scheme.target_fraction = target_fraction;
        scheme.validate()?;
        let economics = assign_economics(&g.graph, &scheme, seed)?;
        g.economics = Some(economics);
        Ok(())
    })
}

/// Default options: IGAIP, budget 1, 10000 samples, 2 hops, alpha 0.1.
#[no_mangle]
pub extern "C" fn ebm_select_options_default() -> EbmSelectOptions {
    let hop = HopConfig::default();
    EbmSelectOptions {
        algorithm: EbmAlgorithm::Igaip,
        budget: 1.0,
        samples: 10_000,
        seed: 0,
        hops: hop.hops,
        alpha: hop.alpha,
        threads: 0,
        strict: 0,
    }
}

fn ready(g: &EbmGraph) -> Result<&NodeEconomics, Failure> {
    if g.probability.is_none() {
        return Err(Failure(
            EbmStatus::NotReady,
            "probabilities not assigned".into(),
        ));
    }
    g.economics
        .as_ref()
        .ok_or_else(|| Failure(EbmStatus::NotReady, "economics not assigned".into()))
}

fn estimator<'a>(
    g: &'a EbmGraph,
    economics: &'a NodeEconomics,
    samples: usize,
    seed: u64,
    threads: usize,
) -> Result<BenefitEstimator<'a>, Failure> {
    let est = BenefitEstimator::new(&g.graph, economics, samples, seed)?;
    Ok(if threads > 0 {
        est.with_workers(threads)?
    } else {
        est
    })
}

/// Selects a seed set.
///
/// # Safety
/// `graph` must be a live handle, `options` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ebm_select(
    graph: *const EbmGraph,
    options: *const EbmSelectOptions,
    out: *mut *mut EbmResult,
) -> EbmStatus {
    guard(|| {
        let g = borrow(graph)?;
        let o = *borrow(options)?;
        let economics = ready(g)?;
        let greedy = GreedyOptions {
            strict: o.strict != 0,
        };
        let result = match o.algorithm {
            EbmAlgorithm::Igaag | EbmAlgorithm::Igaip => {
                let est = estimator(g, economics, o.samples, o.seed, o.threads)?;
                if o.algorithm == EbmAlgorithm::Igaag {
                    modified_greedy_select(&est, o.budget, greedy)?
                } else {
                    lazy_greedy_select(&est, o.budget, greedy)?
                }
            }
            EbmAlgorithm::Hbh => {
                let hop = HopConfig::new(o.hops, o.alpha)?;
                hop_based_select::<BenefitEstimator>(&g.graph, economics, &hop, o.budget, None)?
            }
            EbmAlgorithm::MaxDeg => max_degree_select(&g.graph, economics, o.budget)?,
            EbmAlgorithm::DegDis => {
                let p = match g.probability {
                    Some(ProbabilityScheme::Uniform(p)) => Some(p),
                    _ => None,
                };
                degree_discount_select(&g.graph, economics, o.budget, p)?
            }
            EbmAlgorithm::SinDis => single_discount_select(&g.graph, economics, o.budget)?,
        };
        store(out, EbmResult { inner: result })
    })
}

/// Monte Carlo estimate of the expected earned benefit of `seeds`.
///
/// # Safety
/// `graph` must be a live handle, `seeds` point to `count` node ids (or be
/// null when `count` is 0) and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ebm_estimate_benefit(
    graph: *const EbmGraph,
    seeds: *const usize,
    count: usize,
    samples: usize,
    seed: u64,
    out: *mut f64,
) -> EbmStatus {
    guard(|| {
        let g = borrow(graph)?;
        let economics = ready(g)?;
        let seeds: &[usize] = if count == 0 {
            &[]
        } else if seeds.is_null() {
            return Err(Failure(EbmStatus::NullPointer, "null seed array".into()));
        } else {
            std::slice::from_raw_parts(seeds, count)
        };
        let value = estimator(g, economics, samples, seed, 0)?.estimate_benefit(seeds)?;
        *borrow_mut(out)? = value;
        Ok(())
    })
}

/// Number of seeds, 0 for null.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ebm_result_seed_count(result: *const EbmResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.seeds.len())
}

/// Copies up to `capacity` seeds, in selection order, into `buffer` and
/// returns how many were written.
///
/// # Safety
/// `result` must be null or a live handle; `buffer` must hold `capacity`
/// elements.
#[no_mangle]
pub unsafe extern "C" fn ebm_result_seeds(
    result: *const EbmResult,
    buffer: *mut usize,
    capacity: usize,
) -> usize {
    let Some(r) = result.as_ref() else { return 0 };
    if buffer.is_null() {
        return 0;
    }
    let k = r.inner.seeds.len().min(capacity);
    ptr::copy_nonoverlapping(r.inner.seeds.as_ptr(), buffer, k);
    k
}

/// Total cost of the seeds.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ebm_result_spent(result: *const EbmResult) -> f64 {
    result.as_ref().map_or(0.0, |r| r.inner.spent)
}

/// Benefit under the selection-time estimator, or NaN when the algorithm
/// does not compute one.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ebm_result_benefit(result: *const EbmResult) -> f64 {
    result
        .as_ref()
        .and_then(|r| r.inner.estimated_benefit)
        .unwrap_or(f64::NAN)
}

/// Benefit-function evaluations spent by the selection.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ebm_result_evaluations(result: *const EbmResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.evaluations)
}

/// Releases a result. Null is ignored.
///
/// # Safety
/// `result` must come from [`ebm_select`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ebm_result_free(result: *mut EbmResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
