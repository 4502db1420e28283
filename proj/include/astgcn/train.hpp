#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "astgcn/augment.hpp"
#include "astgcn/dataset.hpp"
#include "astgcn/graph.hpp"
#include "astgcn/model.hpp"

namespace astgcn {

struct TrainConfig {
  double learning_rate = 0.001;
  Index batch_size = 64;
  double train_ratio = 0.8;
  int epochs = 3000;
  Index hidden_units = 100;
  Index gc_units = 0;  // 0 means "same as hidden_units"
  int gc_layers = 1;
  double lambda_reg = 1.5e-3;
  std::uint64_t seed = 1;
  Index seq_len = 4;
  Index horizon = 4;  // T_out
  int checkpoint_every = 0;  // 0 disables periodic checkpoints

  Index effective_gc_units() const {
    return gc_units > 0 ? gc_units : hidden_units;
  }
  void validate() const;
};

/// Mean squared error over all entries. Errors: shape_mismatch.
double mse(const Matrix& y_true, const Matrix& y_pred);

/// Sum of squares of all weight matrices (biases excluded).
double regularizer(const ModelParameters& params);

/// MSE + lambda * regularizer, both on the normalized scale.
double loss(const Matrix& y_true, const Matrix& y_pred,
            const ModelParameters& params, double lambda);

/// d(MSE)/d(y_pred) = 2 * (y_pred - y_true) / element_count.
Matrix loss_prediction_gradient(const Matrix& y_true, const Matrix& y_pred);

/// Adds d(lambda * regularizer)/dW = 2 * lambda * W to the weight gradients.
void add_regularizer_gradient(const ModelParameters& params, double lambda,
                              ModelParameters& grads);

/// Adam optimizer state (beta1 0.9, beta2 0.999, epsilon 1e-8).
struct AdamState {
  ModelParameters first_moment;
  ModelParameters second_moment;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};
AdamState make_adam_state(const ModelParameters& params);

/// One bias-corrected Adam update in place.
void adam_step(ModelParameters& params, ModelParameters& grads,
               AdamState& state, double learning_rate);

struct TrainResult {
  ModelParameters params;
  std::vector<double> loss_history;  // per-epoch mean mini-batch loss
};

/// Called after every `checkpoint_every` epochs and once more after the last
/// epoch (epoch is 1-based; 0 marks the pre-training state on divergence).
using CheckpointSink =
    std::function<void(int epoch, const ModelParameters& params)>;

/// Mini-batch training over the train-range windows: windows are reshuffled
/// every epoch (seeded), each batch runs one forward/backward over the
/// stacked samples, and Adam updates follow each batch. The series must
/// already be split (max_speed set). Deterministic in (config, data, seed).
/// Errors: divergence_detected (loss became non-finite; the last finite
/// parameters are handed to the sink before throwing).
TrainResult train(const TrainConfig& config, const RoadGraph& graph,
                  const SpeedSeries& series, const AttributeBundle& attrs,
                  const AugmentSpec& spec, const SplitRanges& split,
                  const CheckpointSink& on_checkpoint = {});

/// Stacks the augmented input steps and normalized targets of a window
/// range: step j of the result holds rows [sample, node] of E_{start+j}.
void assemble_batch(const std::vector<Matrix>& augmented,
                    const Matrix& normalized_speeds,
                    std::span<const WindowedSample> windows,
                    std::vector<Matrix>& step_inputs, Matrix& targets);

}  // namespace astgcn
