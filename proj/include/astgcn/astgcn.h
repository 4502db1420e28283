/*
 * C interface to the AST-GCN traffic forecasting library.
 *
 * All functions return astgcn_status (ASTGCN_OK on success); on failure,
 * astgcn_last_error() holds a thread-local message describing what went
 * wrong. Objects are opaque handles created and destroyed through matching
 * _free functions. Matrix buffers are row-major double arrays owned by the
 * caller.
 */
#ifndef ASTGCN_H
#define ASTGCN_H

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define ASTGCN_API __attribute__((visibility("default")))
#else
#define ASTGCN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum astgcn_status {
  ASTGCN_OK = 0,
  ASTGCN_E_IO = 1,
  ASTGCN_E_EMPTY_FILE = 2,
  ASTGCN_E_RAGGED_ROWS = 3,
  ASTGCN_E_NON_NUMERIC_CELL = 4,
  ASTGCN_E_NON_SQUARE = 5,
  ASTGCN_E_ASYMMETRIC = 6,
  ASTGCN_E_NEGATIVE_ENTRY = 7,
  ASTGCN_E_DIMENSION_MISMATCH = 8,
  ASTGCN_E_SHAPE_MISMATCH = 9,
  ASTGCN_E_TAPE_MISMATCH = 10,
  ASTGCN_E_DEGENERATE_SPLIT = 11,
  ASTGCN_E_UNKNOWN_CATEGORY = 12,
  ASTGCN_E_NODE_COUNT_MISMATCH = 13,
  ASTGCN_E_LENGTH_MISMATCH = 14,
  ASTGCN_E_INDEX_OUT_OF_RANGE = 15,
  ASTGCN_E_NON_FINITE = 16,
  ASTGCN_E_DIVERGENCE = 17,
  ASTGCN_E_ZERO_VARIANCE = 18,
  ASTGCN_E_CONFIG = 19,
  ASTGCN_E_CHECKPOINT = 20,
  ASTGCN_E_INVALID_ARGUMENT = 21,
  ASTGCN_E_UNKNOWN = 22
} astgcn_status;

typedef struct astgcn_graph astgcn_graph;
typedef struct astgcn_config astgcn_config;
typedef struct astgcn_model astgcn_model;

/* Library version string ("major.minor.patch"). */
ASTGCN_API const char* astgcn_version(void);

/* Thread-local message of the most recent failure; empty string if none. */
ASTGCN_API const char* astgcn_last_error(void);

/* ------------------------------------------------------------------ graph */

/* Builds a road graph from a row-major n*n adjacency buffer, validating
 * symmetry and non-negativity and precomputing the normalized propagation
 * matrix. */
ASTGCN_API astgcn_status astgcn_graph_build(const double* adjacency,
                                            int32_t nodes,
                                            astgcn_graph** out_graph);

/* Loads an adjacency CSV (n rows of n values, no header). */
ASTGCN_API astgcn_status astgcn_graph_load_csv(const char* path,
                                               astgcn_graph** out_graph);

ASTGCN_API int32_t astgcn_graph_nodes(const astgcn_graph* graph);

/* Copies the n*n propagation matrix into out (row-major, caller-allocated). */
ASTGCN_API astgcn_status astgcn_graph_propagation(const astgcn_graph* graph,
                                                  double* out);

/* out = propagation * features, features and out are nodes*cols row-major. */
ASTGCN_API astgcn_status astgcn_graph_propagate(const astgcn_graph* graph,
                                                const double* features,
                                                int32_t cols, double* out);

ASTGCN_API void astgcn_graph_free(astgcn_graph* graph);

/* ----------------------------------------------------------------- config */

/* A fresh config with the paper-protocol defaults. Never returns NULL. */
ASTGCN_API astgcn_config* astgcn_config_create(void);

/* Applies a flat `key = value` config file on top of the current values. */
ASTGCN_API astgcn_status astgcn_config_load_file(astgcn_config* config,
                                                 const char* path);

ASTGCN_API astgcn_status astgcn_config_set(astgcn_config* config,
                                           const char* key, const char* value);

/* Writes the value into buffer (NUL-terminated, truncating if needed);
 * returns the full length through out_length when non-NULL. */
ASTGCN_API astgcn_status astgcn_config_get(const astgcn_config* config,
                                           const char* key, char* buffer,
                                           size_t buffer_size,
                                           size_t* out_length);

ASTGCN_API void astgcn_config_free(astgcn_config* config);

/* ---------------------------------------------------------------- metrics */

typedef struct astgcn_metrics {
  double rmse;
  double mae;
  double accuracy;
  double r2;
  double var;
  /* 0 when the corresponding metric is undefined (constant or all-zero
   * truth); the doubles above are then not meaningful. */
  int32_t accuracy_defined;
  int32_t r2_defined;
  int32_t var_defined;
} astgcn_metrics;

/* All five forecasting metrics over flattened rows*cols row-major buffers. */
ASTGCN_API astgcn_status astgcn_compute_metrics(const double* y_true,
                                                const double* y_pred,
                                                int32_t rows, int32_t cols,
                                                astgcn_metrics* out);

/* ------------------------------------------------------------------ model */

ASTGCN_API astgcn_status astgcn_model_load(const char* checkpoint_path,
                                           astgcn_model** out_model);

ASTGCN_API astgcn_status astgcn_model_save(const astgcn_model* model,
                                           const char* checkpoint_path);

ASTGCN_API int32_t astgcn_model_nodes(const astgcn_model* model);
ASTGCN_API int32_t astgcn_model_horizon(const astgcn_model* model);
ASTGCN_API int32_t astgcn_model_seq_len(const astgcn_model* model);
ASTGCN_API int32_t astgcn_model_window_m(const astgcn_model* model);
/* Encoded attribute widths the model was trained with (0 when disabled). */
ASTGCN_API int32_t astgcn_model_static_width(const astgcn_model* model);
ASTGCN_API int32_t astgcn_model_dynamic_width(const astgcn_model* model);
ASTGCN_API double astgcn_model_max_speed(const astgcn_model* model);

/* Predicts raw-scale speeds from a raw-scale input window.
 *
 *   window         seq_len * nodes row-major raw speeds (time-major)
 *   static_attrs   nodes * static_width encoded values; NULL if width 0
 *   dynamic_window (seq_len + window_m) * dynamic_width encoded values,
 *                  one row per time step starting window_m steps before the
 *                  window (replicate the first row if no history exists);
 *                  each value is broadcast to all nodes. NULL if width 0.
 *   out            nodes * horizon row-major raw-scale predictions
 */
ASTGCN_API astgcn_status astgcn_model_predict(const astgcn_model* model,
                                              const astgcn_graph* graph,
                                              const double* window,
                                              const double* static_attrs,
                                              const double* dynamic_window,
                                              double* out);

ASTGCN_API void astgcn_model_free(astgcn_model* model);

/* ------------------------------------------------------- experiment runs */

/* Writes synthetic adjacency/speeds/poi/weather CSVs under out_dir. */
ASTGCN_API astgcn_status astgcn_run_synth(const astgcn_config* config);

/* Trains per config; writes checkpoint.json and loss_history.csv under
 * out_dir. out_final_loss may be NULL. */
ASTGCN_API astgcn_status astgcn_run_train(const astgcn_config* config,
                                          double* out_final_loss);

/* Evaluates a checkpoint; writes report.csv, predictions.csv and chart.svg
 * under out_dir. */
ASTGCN_API astgcn_status astgcn_run_eval(const astgcn_config* config,
                                         const char* checkpoint_path);

/* Trains the four attribute settings and writes ablation_report.csv. */
ASTGCN_API astgcn_status astgcn_run_ablate(const astgcn_config* config);

/* Noise grids over a trained checkpoint; writes perturbation_report.csv. */
ASTGCN_API astgcn_status astgcn_run_perturb(const astgcn_config* config,
                                            const char* checkpoint_path);

/* grid_kind is "epochs" or "units"; writes sweep_<grid>.csv. */
ASTGCN_API astgcn_status astgcn_run_sweep(const astgcn_config* config,
                                          const char* grid_kind);

#ifdef __cplusplus
}
#endif

#endif /* ASTGCN_H */
