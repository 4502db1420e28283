#include "astgcn/train.hpp"

#include <cmath>
#include <string>

#include "astgcn/error.hpp"
#include "astgcn/rng.hpp"

namespace astgcn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || batch_size < 1 || epochs < 0 ||
      hidden_units < 1 || gc_units < 0 || gc_layers < 1 ||
      lambda_reg < 0.0 || seq_len < 1 || horizon < 1 ||
      checkpoint_every < 0) {
    fail(ErrorCode::invalid_argument, "invalid training configuration");
  }
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    fail(ErrorCode::invalid_argument, "train_ratio must lie in (0, 1)");
  }
}

double mse(const Matrix& y_true, const Matrix& y_pred) {
  if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols()) {
    fail(ErrorCode::shape_mismatch,
         "loss shapes differ: " + std::to_string(y_true.rows()) + "x" +
             std::to_string(y_true.cols()) + " vs " +
             std::to_string(y_pred.rows()) + "x" +
             std::to_string(y_pred.cols()));
  }
  return (y_pred - y_true).squaredNorm() /
         static_cast<double>(y_true.size());
}

double regularizer(const ModelParameters& params) {
  double sum = 0.0;
  for (const ConstParamSlice& slice : parameter_slices(params)) {
    if (!slice.is_weight) continue;
    for (Index i = 0; i < slice.size; ++i) sum += slice.data[i] * slice.data[i];
  }
  return sum;
}

double loss(const Matrix& y_true, const Matrix& y_pred,
            const ModelParameters& params, double lambda) {
  return mse(y_true, y_pred) + lambda * regularizer(params);
}

Matrix loss_prediction_gradient(const Matrix& y_true, const Matrix& y_pred) {
  if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols()) {
    fail(ErrorCode::shape_mismatch, "gradient shapes differ");
  }
  return (y_pred - y_true) * (2.0 / static_cast<double>(y_true.size()));
}

void add_regularizer_gradient(const ModelParameters& params, double lambda,
                              ModelParameters& grads) {
  if (lambda == 0.0) return;
  const auto param_slices = parameter_slices(params);
  const auto grad_slices = parameter_slices(grads);
  for (std::size_t s = 0; s < param_slices.size(); ++s) {
    if (!param_slices[s].is_weight) continue;
    for (Index i = 0; i < param_slices[s].size; ++i) {
      grad_slices[s].data[i] += 2.0 * lambda * param_slices[s].data[i];
    }
  }
}

AdamState make_adam_state(const ModelParameters& params) {
  AdamState state;
  state.first_moment = zeros_like(params);
  state.second_moment = zeros_like(params);
  return state;
}

void adam_step(ModelParameters& params, ModelParameters& grads,
               AdamState& state, double learning_rate) {
  ++state.step;
  const double bias1 =
      1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bias2 =
      1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const auto param_slices = parameter_slices(params);
  const auto grad_slices = parameter_slices(grads);
  const auto m_slices = parameter_slices(state.first_moment);
  const auto v_slices = parameter_slices(state.second_moment);
  for (std::size_t s = 0; s < param_slices.size(); ++s) {
    double* p = param_slices[s].data;
    const double* g = grad_slices[s].data;
    double* m = m_slices[s].data;
    double* v = v_slices[s].data;
    for (Index i = 0; i < param_slices[s].size; ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      p[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

void assemble_batch(const std::vector<Matrix>& augmented,
                    const Matrix& normalized_speeds,
                    std::span<const WindowedSample> windows,
                    std::vector<Matrix>& step_inputs, Matrix& targets) {
  const Index batch = static_cast<Index>(windows.size());
  const Index nodes = normalized_speeds.cols();
  const Index seq_len = windows.front().input.length();
  const Index horizon = windows.front().target.length();
  const Index width = augmented.front().cols();

  step_inputs.assign(static_cast<std::size_t>(seq_len),
                     Matrix(batch * nodes, width));
  targets.resize(batch * nodes, horizon);
  for (Index b = 0; b < batch; ++b) {
    const WindowedSample& window = windows[static_cast<std::size_t>(b)];
    for (Index j = 0; j < seq_len; ++j) {
      step_inputs[static_cast<std::size_t>(j)].middleRows(b * nodes, nodes) =
          augmented[static_cast<std::size_t>(window.input.begin + j)];
    }
    for (Index k = 0; k < horizon; ++k) {
      targets.block(b * nodes, k, nodes, 1) =
          normalized_speeds.row(window.target.begin + k).transpose();
    }
  }
}

TrainResult train(const TrainConfig& config, const RoadGraph& graph,
                  const SpeedSeries& series, const AttributeBundle& attrs,
                  const AugmentSpec& spec, const SplitRanges& split,
                  const CheckpointSink& on_checkpoint) {
  config.validate();
  const Matrix normalized = series.normalized();

  ModelDims dims;
  dims.nodes = series.nodes();
  dims.feature_width = spec.width(attrs.static_width(), attrs.dynamic_width());
  dims.gc_units = config.effective_gc_units();
  dims.hidden_units = config.hidden_units;
  dims.horizon = config.horizon;
  dims.gc_layers = config.gc_layers;

  TrainResult result;
  result.params = init_params(dims, config.seed);
  if (config.epochs == 0) return result;

  const std::vector<Matrix> augmented = augment_series(normalized, attrs, spec);
  std::vector<WindowedSample> windows =
      make_windows(split.train, config.seq_len, config.horizon);

  AdamState adam = make_adam_state(result.params);
  Rng shuffle_rng(derive_seed(config.seed, 0xA5));
  ModelParameters last_good = result.params;

  std::vector<Matrix> step_inputs;
  Matrix targets;
  Tape tape;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(windows);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < windows.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t count = std::min(
          static_cast<std::size_t>(config.batch_size), windows.size() - start);
      const std::span<const WindowedSample> batch(&windows[start], count);
      assemble_batch(augmented, normalized, batch, step_inputs, targets);

      Matrix predictions;
      double batch_loss = std::numeric_limits<double>::quiet_NaN();
      try {
        predictions = forward(step_inputs, result.params, graph,
                              static_cast<Index>(count), &tape);
        batch_loss =
            loss(targets, predictions, result.params, config.lambda_reg);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::non_finite_activation) throw;
      }
      if (!std::isfinite(batch_loss)) {
        if (on_checkpoint) on_checkpoint(0, last_good);
        fail(ErrorCode::divergence_detected,
             "training loss became non-finite at epoch " +
                 std::to_string(epoch));
      }
      last_good = result.params;

      ModelParameters grads =
          backward(tape, result.params, graph,
                   loss_prediction_gradient(targets, predictions));
      add_regularizer_gradient(result.params, config.lambda_reg, grads);
      adam_step(result.params, grads, adam, config.learning_rate);

      epoch_loss += batch_loss * static_cast<double>(count);
      seen += count;
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(seen));
    if (on_checkpoint && config.checkpoint_every > 0 &&
        epoch % config.checkpoint_every == 0 && epoch != config.epochs) {
      on_checkpoint(epoch, result.params);
    }
  }
  if (on_checkpoint) on_checkpoint(config.epochs, result.params);
  return result;
}

}  // namespace astgcn
