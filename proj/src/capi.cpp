#include "astgcn/astgcn.h"

#include <cstring>
#include <string>

#include "astgcn/augment.hpp"
#include "astgcn/checkpoint.hpp"
#include "astgcn/config.hpp"
#include "astgcn/error.hpp"
#include "astgcn/experiment.hpp"
#include "astgcn/graph.hpp"
#include "astgcn/metrics.hpp"
#include "astgcn/model.hpp"

struct astgcn_graph {
  astgcn::RoadGraph graph;
};

struct astgcn_config {
  astgcn::ExperimentConfig config;
};

struct astgcn_model {
  astgcn::Checkpoint checkpoint;
};

namespace {

thread_local std::string g_last_error;

astgcn_status map_code(astgcn::ErrorCode code) {
  using astgcn::ErrorCode;
  switch (code) {
    case ErrorCode::io_error: return ASTGCN_E_IO;
    case ErrorCode::empty_file: return ASTGCN_E_EMPTY_FILE;
    case ErrorCode::ragged_rows: return ASTGCN_E_RAGGED_ROWS;
    case ErrorCode::non_numeric_cell: return ASTGCN_E_NON_NUMERIC_CELL;
    case ErrorCode::non_square: return ASTGCN_E_NON_SQUARE;
    case ErrorCode::asymmetric: return ASTGCN_E_ASYMMETRIC;
    case ErrorCode::negative_entry: return ASTGCN_E_NEGATIVE_ENTRY;
    case ErrorCode::dimension_mismatch: return ASTGCN_E_DIMENSION_MISMATCH;
    case ErrorCode::shape_mismatch: return ASTGCN_E_SHAPE_MISMATCH;
    case ErrorCode::tape_mismatch: return ASTGCN_E_TAPE_MISMATCH;
    case ErrorCode::degenerate_split: return ASTGCN_E_DEGENERATE_SPLIT;
    case ErrorCode::unknown_category: return ASTGCN_E_UNKNOWN_CATEGORY;
    case ErrorCode::node_count_mismatch: return ASTGCN_E_NODE_COUNT_MISMATCH;
    case ErrorCode::length_mismatch: return ASTGCN_E_LENGTH_MISMATCH;
    case ErrorCode::index_out_of_range: return ASTGCN_E_INDEX_OUT_OF_RANGE;
    case ErrorCode::non_finite_activation: return ASTGCN_E_NON_FINITE;
    case ErrorCode::divergence_detected: return ASTGCN_E_DIVERGENCE;
    case ErrorCode::zero_variance: return ASTGCN_E_ZERO_VARIANCE;
    case ErrorCode::config_error: return ASTGCN_E_CONFIG;
    case ErrorCode::checkpoint_error: return ASTGCN_E_CHECKPOINT;
    case ErrorCode::invalid_argument: return ASTGCN_E_INVALID_ARGUMENT;
  }
  return ASTGCN_E_UNKNOWN;
}

template <typename Fn>
astgcn_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ASTGCN_OK;
  } catch (const astgcn::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ASTGCN_E_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return ASTGCN_E_UNKNOWN;
  }
}

astgcn_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return ASTGCN_E_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* astgcn_version(void) { return "1.0.0"; }

const char* astgcn_last_error(void) { return g_last_error.c_str(); }

astgcn_status astgcn_graph_build(const double* adjacency, int32_t nodes,
                                 astgcn_graph** out_graph) {
  if (!adjacency || !out_graph) return null_argument("adjacency/out_graph");
  return guarded([&] {
    const Eigen::Map<
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>>
        view(adjacency, nodes, nodes);
    *out_graph = new astgcn_graph{astgcn::build_graph(astgcn::Matrix(view))};
  });
}

astgcn_status astgcn_graph_load_csv(const char* path,
                                    astgcn_graph** out_graph) {
  if (!path || !out_graph) return null_argument("path/out_graph");
  return guarded(
      [&] { *out_graph = new astgcn_graph{astgcn::load_adjacency_csv(path)}; });
}

int32_t astgcn_graph_nodes(const astgcn_graph* graph) {
  return graph ? static_cast<int32_t>(graph->graph.nodes()) : 0;
}

astgcn_status astgcn_graph_propagation(const astgcn_graph* graph,
                                       double* out) {
  if (!graph || !out) return null_argument("graph/out");
  return guarded([&] {
    const astgcn::Matrix& p = graph->graph.propagation;
    for (astgcn::Index r = 0; r < p.rows(); ++r) {
      for (astgcn::Index c = 0; c < p.cols(); ++c) {
        out[r * p.cols() + c] = p(r, c);
      }
    }
  });
}

astgcn_status astgcn_graph_propagate(const astgcn_graph* graph,
                                     const double* features, int32_t cols,
                                     double* out) {
  if (!graph || !features || !out) return null_argument("graph/features/out");
  return guarded([&] {
    const astgcn::Index n = graph->graph.nodes();
    const Eigen::Map<
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>>
        view(features, n, cols);
    const astgcn::Matrix result =
        astgcn::propagate(graph->graph, astgcn::Matrix(view));
    for (astgcn::Index r = 0; r < n; ++r) {
      for (astgcn::Index c = 0; c < cols; ++c) {
        out[r * cols + c] = result(r, c);
      }
    }
  });
}

void astgcn_graph_free(astgcn_graph* graph) { delete graph; }

astgcn_config* astgcn_config_create(void) { return new astgcn_config{}; }

astgcn_status astgcn_config_load_file(astgcn_config* config,
                                      const char* path) {
  if (!config || !path) return null_argument("config/path");
  return guarded([&] { astgcn::apply_config_file(config->config, path); });
}

astgcn_status astgcn_config_set(astgcn_config* config, const char* key,
                                const char* value) {
  if (!config || !key || !value) return null_argument("config/key/value");
  return guarded([&] { config->config.set(key, value); });
}

astgcn_status astgcn_config_get(const astgcn_config* config, const char* key,
                                char* buffer, size_t buffer_size,
                                size_t* out_length) {
  if (!config || !key) return null_argument("config/key");
  return guarded([&] {
    const std::string value = config->config.get(key);
    if (out_length) *out_length = value.size();
    if (buffer && buffer_size > 0) {
      const size_t n = std::min(buffer_size - 1, value.size());
      std::memcpy(buffer, value.data(), n);
      buffer[n] = '\0';
    }
  });
}

void astgcn_config_free(astgcn_config* config) { delete config; }

astgcn_status astgcn_compute_metrics(const double* y_true,
                                     const double* y_pred, int32_t rows,
                                     int32_t cols, astgcn_metrics* out) {
  if (!y_true || !y_pred || !out) return null_argument("y_true/y_pred/out");
  return guarded([&] {
    const Eigen::Map<
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>>
        truth(y_true, rows, cols), pred(y_pred, rows, cols);
    const astgcn::MetricReport report =
        astgcn::compute_metrics(astgcn::Matrix(truth), astgcn::Matrix(pred));
    out->rmse = report.rmse;
    out->mae = report.mae;
    out->accuracy = report.accuracy.value_or(0.0);
    out->r2 = report.r2.value_or(0.0);
    out->var = report.var.value_or(0.0);
    out->accuracy_defined = report.accuracy.has_value() ? 1 : 0;
    out->r2_defined = report.r2.has_value() ? 1 : 0;
    out->var_defined = report.var.has_value() ? 1 : 0;
  });
}

astgcn_status astgcn_model_load(const char* checkpoint_path,
                                astgcn_model** out_model) {
  if (!checkpoint_path || !out_model) return null_argument("path/out_model");
  return guarded([&] {
    *out_model = new astgcn_model{astgcn::load_checkpoint(checkpoint_path)};
  });
}

astgcn_status astgcn_model_save(const astgcn_model* model,
                                const char* checkpoint_path) {
  if (!model || !checkpoint_path) return null_argument("model/path");
  return guarded(
      [&] { astgcn::save_checkpoint(checkpoint_path, model->checkpoint); });
}

int32_t astgcn_model_nodes(const astgcn_model* model) {
  return model ? static_cast<int32_t>(model->checkpoint.params.dims.nodes) : 0;
}

int32_t astgcn_model_horizon(const astgcn_model* model) {
  return model ? static_cast<int32_t>(model->checkpoint.params.dims.horizon)
               : 0;
}

int32_t astgcn_model_seq_len(const astgcn_model* model) {
  return model ? static_cast<int32_t>(model->checkpoint.seq_len) : 0;
}

int32_t astgcn_model_window_m(const astgcn_model* model) {
  return model ? model->checkpoint.spec.window_m : 0;
}

int32_t astgcn_model_static_width(const astgcn_model* model) {
  if (!model || !model->checkpoint.spec.use_static) return 0;
  return static_cast<int32_t>(model->checkpoint.static_encoding.width());
}

int32_t astgcn_model_dynamic_width(const astgcn_model* model) {
  if (!model || !model->checkpoint.spec.use_dynamic) return 0;
  return static_cast<int32_t>(model->checkpoint.dynamic_encoding.width());
}

double astgcn_model_max_speed(const astgcn_model* model) {
  return model ? model->checkpoint.max_speed : 0.0;
}

astgcn_status astgcn_model_predict(const astgcn_model* model,
                                   const astgcn_graph* graph,
                                   const double* window,
                                   const double* static_attrs,
                                   const double* dynamic_window, double* out) {
  if (!model || !graph || !window || !out) {
    return null_argument("model/graph/window/out");
  }
  return guarded([&] {
    using astgcn::Index;
    using astgcn::Matrix;
    const astgcn::Checkpoint& ckpt = model->checkpoint;
    const Index n = ckpt.params.dims.nodes;
    const Index seq_len = ckpt.seq_len;
    const Index m = ckpt.spec.window_m;
    const Index p =
        ckpt.spec.use_static ? ckpt.static_encoding.width() : Index{0};
    const Index w =
        ckpt.spec.use_dynamic ? ckpt.dynamic_encoding.width() : Index{0};
    if (graph->graph.nodes() != n) {
      astgcn::fail(astgcn::ErrorCode::node_count_mismatch,
                   "graph/model node counts differ");
    }
    if (p > 0 && !static_attrs) {
      astgcn::fail(astgcn::ErrorCode::invalid_argument,
                   "model uses static attributes; static_attrs is NULL");
    }
    if (w > 0 && !dynamic_window) {
      astgcn::fail(astgcn::ErrorCode::invalid_argument,
                   "model uses dynamic attributes; dynamic_window is NULL");
    }

    astgcn::AttributeBundle attrs;
    attrs.static_encoding = ckpt.static_encoding;
    attrs.dynamic_encoding = ckpt.dynamic_encoding;
    attrs.static_attrs = Matrix::Zero(n, p);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < p; ++j) {
        attrs.static_attrs(i, j) = static_attrs[i * p + j];
      }
    }
    // The dynamic buffer starts m steps before the window; values broadcast
    // to all nodes.
    const Index context = seq_len + m;
    attrs.dynamic_attrs.assign(static_cast<std::size_t>(w),
                               Matrix::Zero(context, n));
    for (Index t = 0; t < context; ++t) {
      for (Index j = 0; j < w; ++j) {
        attrs.dynamic_attrs[static_cast<std::size_t>(j)].row(t).setConstant(
            dynamic_window[t * w + j]);
      }
    }

    Matrix normalized = Matrix::Zero(context, n);
    for (Index t = 0; t < seq_len; ++t) {
      for (Index i = 0; i < n; ++i) {
        normalized(m + t, i) = window[t * n + i] / ckpt.max_speed;
      }
    }
    const astgcn::WindowedSample sample{{m, m + seq_len},
                                        {m + seq_len, m + seq_len}};
    const auto sequence =
        astgcn::augment_sequence(normalized, attrs, ckpt.spec, sample);
    const Matrix predictions =
        astgcn::forward(sequence, ckpt.params, graph->graph);
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < predictions.cols(); ++k) {
        out[i * predictions.cols() + k] = predictions(i, k) * ckpt.max_speed;
      }
    }
  });
}

void astgcn_model_free(astgcn_model* model) { delete model; }

astgcn_status astgcn_run_synth(const astgcn_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] { astgcn::run_synth(config->config); });
}

astgcn_status astgcn_run_train(const astgcn_config* config,
                               double* out_final_loss) {
  if (!config) return null_argument("config");
  return guarded([&] {
    const astgcn::TrainOutputs outputs = astgcn::run_train(config->config);
    if (out_final_loss) *out_final_loss = outputs.final_loss;
  });
}

astgcn_status astgcn_run_eval(const astgcn_config* config,
                              const char* checkpoint_path) {
  if (!config || !checkpoint_path) return null_argument("config/checkpoint");
  return guarded(
      [&] { astgcn::run_eval(config->config, checkpoint_path); });
}

astgcn_status astgcn_run_ablate(const astgcn_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] { astgcn::run_ablate(config->config); });
}

astgcn_status astgcn_run_perturb(const astgcn_config* config,
                                 const char* checkpoint_path) {
  if (!config || !checkpoint_path) return null_argument("config/checkpoint");
  return guarded(
      [&] { astgcn::run_perturb(config->config, checkpoint_path); });
}

astgcn_status astgcn_run_sweep(const astgcn_config* config,
                               const char* grid_kind) {
  if (!config || !grid_kind) return null_argument("config/grid_kind");
  return guarded([&] { astgcn::run_sweep(config->config, grid_kind); });
}

}  // extern "C"
