#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "astgcn/graph.hpp"
#include "astgcn/types.hpp"

namespace astgcn {

struct ModelDims {
  Index nodes = 0;          // n
  Index feature_width = 0;  // F, augmented input width
  Index gc_units = 0;       // g, graph-convolution output width
  Index hidden_units = 0;   // h
  Index horizon = 0;        // T_out
  int gc_layers = 1;

  Index parameter_count() const;
  void validate() const;
  bool operator==(const ModelDims&) const = default;
};

struct GcLayer {
  Matrix weight;   // F x g for the first layer, g x g after
  RowVector bias;  // g
};

/// All trainable weights and biases. The same struct doubles as the gradient
/// container (same shape family).
struct ModelParameters {
  ModelDims dims;
  std::vector<GcLayer> gc;
  Matrix update_weight;     // (g+h) x h
  Matrix reset_weight;      // (g+h) x h
  Matrix candidate_weight;  // (g+h) x h
  RowVector update_bias, reset_bias, candidate_bias;  // h
  Matrix output_weight;  // h x T_out
  RowVector output_bias;  // T_out
};

/// Flat view over every parameter array, in a fixed order (gc layers, gate
/// weights, gate biases, output head). Drives the optimizer, serialization,
/// and finite-difference checks.
struct ParamSlice {
  const char* name;
  double* data;
  Index size;
  bool is_weight;  // false for biases (excluded from the regularizer)
};
std::vector<ParamSlice> parameter_slices(ModelParameters& params);

struct ConstParamSlice {
  const char* name;
  const double* data;
  Index size;
  bool is_weight;
};
std::vector<ConstParamSlice> parameter_slices(const ModelParameters& params);

ModelParameters zeros_like(const ModelParameters& params);

/// Xavier-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero biases.
/// Deterministic in the seed.
ModelParameters init_params(const ModelDims& dims, std::uint64_t seed);

/// Propagation applied per batch block: rows are batch-stacked node blocks
/// of size n, and each block is multiplied by the graph's propagation
/// matrix.
Matrix propagate_blocks(const RoadGraph& graph, const Matrix& stacked,
                        Index batch);

/// Graph convolution of (batch*n) x F features: prop * E * W + b per layer,
/// ReLU between layers, no activation after the last (the GRU gate
/// nonlinearities follow immediately). Errors: shape_mismatch.
Matrix gc(const ModelParameters& params, const RoadGraph& graph,
          const Matrix& features, Index batch = 1);

/// Cached intermediates of one cell step, kept for backpropagation.
struct GcCache {
  std::vector<Matrix> propagated;  // per layer: prop * layer_input
  std::vector<Matrix> pre;         // per non-final layer: pre-activation
};

struct TapeStep {
  GcCache gc;
  Matrix gate_input;       // [gc_out | h_prev]
  Matrix candidate_input;  // [gc_out | reset .* h_prev]
  Matrix update, reset, candidate;
  Matrix hidden_prev;
};

struct CellState {
  Matrix hidden;  // (batch*n) x h, every entry in (-1, 1) from h_0 = 0
  TapeStep cache;
};

/// One gated step: update/reset gates on [gc(E_t) | h_prev], candidate on
/// [gc(E_t) | r .* h_prev], new hidden u .* h_prev + (1-u) .* c.
/// Errors: shape_mismatch, non_finite_activation.
CellState cell_step(const Matrix& features_t, const Matrix& hidden_prev,
                    const ModelParameters& params, const RoadGraph& graph,
                    Index batch = 1);

struct Tape {
  ModelDims dims;
  Index batch = 1;
  std::vector<TapeStep> steps;
  Matrix hidden_last;
  Matrix predictions;  // (batch*n) x T_out, normalized scale
};

/// Unrolls the cell over the input sequence from h_0 = 0 and applies the
/// linear output head. Each sequence element is (batch*n) x F (batch = 1 for
/// a single sample). Records intermediates into `tape` when given.
Matrix forward(std::span<const Matrix> sequence, const ModelParameters& params,
               const RoadGraph& graph, Index batch = 1, Tape* tape = nullptr);

/// Exact reverse-mode gradients of every parameter for a forward tape and an
/// upstream prediction gradient. Errors: tape_mismatch.
ModelParameters backward(const Tape& tape, const ModelParameters& params,
                         const RoadGraph& graph, const Matrix& d_predictions);

}  // namespace astgcn
