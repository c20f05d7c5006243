#ifndef EBM_H
#define EBM_H

#pragma once

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum EbmStatus {
  EBM_STATUS_OK = 0,
  EBM_STATUS_NULL_POINTER = 1,
  EBM_STATUS_INVALID_ARGUMENT = 2,
  EBM_STATUS_IO = 3,
  EBM_STATUS_PARSE = 4,
  /**
   * Probabilities or economics have not been assigned yet.
   */
  EBM_STATUS_NOT_READY = 5,
  EBM_STATUS_SELECTION = 6,
  EBM_STATUS_INTERNAL = 7,
} EbmStatus;

/**
 * Cost and benefit setting.
 */
typedef enum EbmEconomics {
  /**
   * Costs in `[1, 50]`, target benefits in `[50, 100]`.
   */
  EBM_ECONOMICS_RANDOM = 0,
  /**
   * Degree-proportional costs, unit benefits.
   */
  EBM_ECONOMICS_DEGREE_PROPORTIONAL = 1,
} EbmEconomics;

/**
 * Selection algorithms.
 */
typedef enum EbmAlgorithm {
  EBM_ALGORITHM_IGAAG = 0,
  EBM_ALGORITHM_IGAIP = 1,
  EBM_ALGORITHM_HBH = 2,
  EBM_ALGORITHM_MAX_DEG = 3,
  EBM_ALGORITHM_DEG_DIS = 4,
  EBM_ALGORITHM_SIN_DIS = 5,
} EbmAlgorithm;

/**
 * A loaded network with its assigned probabilities and economics.
 */
typedef struct EbmGraph EbmGraph;

/**
 * A selected seed set.
 */
typedef struct EbmResult EbmResult;

/**
 * Selection parameters. Obtain defaults from [`ebm_select_options_default`].
 */
typedef struct EbmSelectOptions {
  enum EbmAlgorithm algorithm;
  double budget;
  /**
   * Live-edge samples for the greedy algorithms.
   */
  size_t samples;
  uint64_t seed;
  size_t hops;
  double alpha;
  /**
   * Worker threads; 0 uses the global pool.
   */
  size_t threads;
  /**
   * Nonzero keeps buying zero-gain nodes while budget remains.
   */
  uint8_t strict;
} EbmSelectOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *ebm_last_error_message(void);

/**
 * Loads an edge list from a file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum EbmStatus ebm_graph_load_file(const char *path, uint8_t directed, struct EbmGraph **out);

/**
 * Parses an edge list held in memory.
 *
 * # Safety
 * `edges` must be a NUL-terminated string and `out` a valid pointer.
 */
enum EbmStatus ebm_graph_load_str(const char *edges, uint8_t directed, struct EbmGraph **out);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `graph` must come from a load call and not be used afterwards.
 */
void ebm_graph_free(struct EbmGraph *graph);

/**
 * Number of nodes, 0 for null.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t ebm_graph_node_count(const struct EbmGraph *graph);

/**
 * Number of arcs (undirected edges count twice), 0 for null.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t ebm_graph_arc_count(const struct EbmGraph *graph);

/**
 * Assigns the same probability `p` in `(0, 1]` to every arc.
 *
 * # Safety
 * `graph` must be a live handle.
 */
enum EbmStatus ebm_graph_assign_uniform(struct EbmGraph *graph, double p);

/**
 * Draws each edge's probability from {0.1, 0.01, 0.001}.
 *
 * # Safety
 * `graph` must be a live handle.
 */
enum EbmStatus ebm_graph_assign_trivalency(struct EbmGraph *graph, uint64_t seed);

/**
 * Assigns costs, targets and benefits. `target_fraction` of the nodes
 * become targets.
 *
 * # Safety
 * `graph` must be a live handle.
 */
enum EbmStatus ebm_graph_assign_economics(struct EbmGraph *graph,
                                          enum EbmEconomics setting,
                                          double target_fraction,
                                          uint64_t seed);

/**
 * Default options: IGAIP, budget 1, 10000 samples, 2 hops, alpha 0.1.
 */
struct EbmSelectOptions ebm_select_options_default(void);

/**
 * Selects a seed set.
 *
 * # Safety
 * `graph` must be a live handle, `options` and `out` valid pointers.
 */
enum EbmStatus ebm_select(const struct EbmGraph *graph,
                          const struct EbmSelectOptions *options,
                          struct EbmResult **out);

/**
 * Monte Carlo estimate of the expected earned benefit of `seeds`.
 *
 * # Safety
 * `graph` must be a live handle, `seeds` point to `count` node ids (or be
 * null when `count` is 0) and `out` be a valid pointer.
 */
enum EbmStatus ebm_estimate_benefit(const struct EbmGraph *graph,
                                    const size_t *seeds,
                                    size_t count,
                                    size_t samples,
                                    uint64_t seed,
                                    double *out);

/**
 * Number of seeds, 0 for null.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t ebm_result_seed_count(const struct EbmResult *result);

/**
 * Copies up to `capacity` seeds, in selection order, into `buffer` and
 * returns how many were written.
 *
 * # Safety
 * `result` must be null or a live handle; `buffer` must hold `capacity`
 * elements.
 */
size_t ebm_result_seeds(const struct EbmResult *result, size_t *buffer, size_t capacity);

/**
 * Total cost of the seeds.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
double ebm_result_spent(const struct EbmResult *result);

/**
 * Benefit under the selection-time estimator, or NaN when the algorithm
 * does not compute one.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
double ebm_result_benefit(const struct EbmResult *result);

/**
 * Benefit-function evaluations spent by the selection.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t ebm_result_evaluations(const struct EbmResult *result);

/**
 * Releases a result. Null is ignored.
 *
 * # Safety
 * `result` must come from [`ebm_select`] and not be used afterwards.
 */
void ebm_result_free(struct EbmResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EBM_H */
