#include "astgcn/model.hpp"

#include <cmath>
#include <string>

#include "astgcn/error.hpp"
#include "astgcn/rng.hpp"

namespace astgcn {

Index ModelDims::parameter_count() const {
  Index count = 0;
  Index in = feature_width;
  for (int layer = 0; layer < gc_layers; ++layer) {
    count += in * gc_units + gc_units;
    in = gc_units;
  }
  count += 3 * ((gc_units + hidden_units) * hidden_units + hidden_units);
  count += hidden_units * horizon + horizon;
  return count;
}

void ModelDims::validate() const {
  if (nodes < 1 || feature_width < 1 || gc_units < 1 || hidden_units < 1 ||
      horizon < 1 || gc_layers < 1) {
    fail(ErrorCode::invalid_argument,
         "model dims must all be positive (nodes " + std::to_string(nodes) +
             ", features " + std::to_string(feature_width) + ", gc " +
             std::to_string(gc_units) + ", hidden " +
             std::to_string(hidden_units) + ", horizon " +
             std::to_string(horizon) + ", layers " +
             std::to_string(gc_layers) + ")");
  }
}

std::vector<ParamSlice> parameter_slices(ModelParameters& params) {
  std::vector<ParamSlice> slices;
  for (std::size_t layer = 0; layer < params.gc.size(); ++layer) {
    slices.push_back({"gc_weight", params.gc[layer].weight.data(),
                      params.gc[layer].weight.size(), true});
    slices.push_back({"gc_bias", params.gc[layer].bias.data(),
                      params.gc[layer].bias.size(), false});
  }
  slices.push_back({"update_weight", params.update_weight.data(),
                    params.update_weight.size(), true});
  slices.push_back({"reset_weight", params.reset_weight.data(),
                    params.reset_weight.size(), true});
  slices.push_back({"candidate_weight", params.candidate_weight.data(),
                    params.candidate_weight.size(), true});
  slices.push_back({"update_bias", params.update_bias.data(),
                    params.update_bias.size(), false});
  slices.push_back({"reset_bias", params.reset_bias.data(),
                    params.reset_bias.size(), false});
  slices.push_back({"candidate_bias", params.candidate_bias.data(),
                    params.candidate_bias.size(), false});
  slices.push_back({"output_weight", params.output_weight.data(),
                    params.output_weight.size(), true});
  slices.push_back({"output_bias", params.output_bias.data(),
                    params.output_bias.size(), false});
  return slices;
}

std::vector<ConstParamSlice> parameter_slices(const ModelParameters& params) {
  const auto mutable_slices =
      parameter_slices(const_cast<ModelParameters&>(params));
  std::vector<ConstParamSlice> slices;
  slices.reserve(mutable_slices.size());
  for (const ParamSlice& s : mutable_slices) {
    slices.push_back({s.name, s.data, s.size, s.is_weight});
  }
  return slices;
}

namespace {

ModelParameters make_shaped(const ModelDims& dims) {
  dims.validate();
  ModelParameters params;
  params.dims = dims;
  Index in = dims.feature_width;
  for (int layer = 0; layer < dims.gc_layers; ++layer) {
    params.gc.push_back(
        {Matrix::Zero(in, dims.gc_units), RowVector::Zero(dims.gc_units)});
    in = dims.gc_units;
  }
  const Index gate_in = dims.gc_units + dims.hidden_units;
  params.update_weight = Matrix::Zero(gate_in, dims.hidden_units);
  params.reset_weight = Matrix::Zero(gate_in, dims.hidden_units);
  params.candidate_weight = Matrix::Zero(gate_in, dims.hidden_units);
  params.update_bias = RowVector::Zero(dims.hidden_units);
  params.reset_bias = RowVector::Zero(dims.hidden_units);
  params.candidate_bias = RowVector::Zero(dims.hidden_units);
  params.output_weight = Matrix::Zero(dims.hidden_units, dims.horizon);
  params.output_bias = RowVector::Zero(dims.horizon);
  return params;
}

void fill_xavier(Matrix& weight, Rng& rng) {
  const double bound =
      std::sqrt(6.0 / static_cast<double>(weight.rows() + weight.cols()));
  double* data = weight.data();
  for (Index i = 0; i < weight.size(); ++i) {
    data[i] = rng.uniform(-bound, bound);
  }
}

Matrix sigmoid(const Matrix& x) {
  return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

void check_features(const Matrix& features, const ModelDims& dims,
                    Index batch) {
  if (batch < 1) fail(ErrorCode::invalid_argument, "batch must be >= 1");
  if (features.rows() != batch * dims.nodes ||
      features.cols() != dims.feature_width) {
    fail(ErrorCode::shape_mismatch,
         "features are " + std::to_string(features.rows()) + "x" +
             std::to_string(features.cols()) + ", expected " +
             std::to_string(batch * dims.nodes) + "x" +
             std::to_string(dims.feature_width));
  }
}

Matrix gc_cached(const ModelParameters& params, const RoadGraph& graph,
                 const Matrix& features, Index batch, GcCache* cache) {
  check_features(features, params.dims, batch);
  Matrix layer_input = features;
  Matrix out;
  const int layers = params.dims.gc_layers;
  for (int layer = 0; layer < layers; ++layer) {
    Matrix propagated = propagate_blocks(graph, layer_input, batch);
    out = propagated * params.gc[static_cast<std::size_t>(layer)].weight;
    out.rowwise() += params.gc[static_cast<std::size_t>(layer)].bias;
    if (cache) cache->propagated.push_back(std::move(propagated));
    if (layer + 1 < layers) {
      if (cache) cache->pre.push_back(out);
      layer_input = out.cwiseMax(0.0);  // ReLU between layers only
    }
  }
  return out;
}

Matrix step_impl(const Matrix& features_t, const Matrix& hidden_prev,
                 const ModelParameters& params, const RoadGraph& graph,
                 Index batch, TapeStep* step) {
  const ModelDims& dims = params.dims;
  if (hidden_prev.rows() != batch * dims.nodes ||
      hidden_prev.cols() != dims.hidden_units) {
    fail(ErrorCode::shape_mismatch,
         "hidden state is " + std::to_string(hidden_prev.rows()) + "x" +
             std::to_string(hidden_prev.cols()) + ", expected " +
             std::to_string(batch * dims.nodes) + "x" +
             std::to_string(dims.hidden_units));
  }
  const Index rows = batch * dims.nodes;
  const Index g = dims.gc_units;
  const Index h = dims.hidden_units;

  GcCache gc_cache;
  const Matrix conv =
      gc_cached(params, graph, features_t, batch, step ? &gc_cache : nullptr);

  Matrix gate_input(rows, g + h);
  gate_input.leftCols(g) = conv;
  gate_input.rightCols(h) = hidden_prev;

  Matrix update = gate_input * params.update_weight;
  update.rowwise() += params.update_bias;
  update = sigmoid(update);

  Matrix reset = gate_input * params.reset_weight;
  reset.rowwise() += params.reset_bias;
  reset = sigmoid(reset);

  Matrix candidate_input(rows, g + h);
  candidate_input.leftCols(g) = conv;
  candidate_input.rightCols(h) = reset.cwiseProduct(hidden_prev);

  Matrix candidate = candidate_input * params.candidate_weight;
  candidate.rowwise() += params.candidate_bias;
  candidate = candidate.array().tanh().matrix();

  Matrix hidden = update.cwiseProduct(hidden_prev) +
                  (1.0 - update.array()).matrix().cwiseProduct(candidate);
  if (!hidden.allFinite()) {
    fail(ErrorCode::non_finite_activation,
         "non-finite hidden state (diverging parameters?)");
  }

  if (step) {
    step->gc = std::move(gc_cache);
    step->gate_input = std::move(gate_input);
    step->candidate_input = std::move(candidate_input);
    step->update = std::move(update);
    step->reset = std::move(reset);
    step->candidate = std::move(candidate);
    step->hidden_prev = hidden_prev;
  }
  return hidden;
}

// Accumulates gc-layer gradients for one step given d(gc output).
void gc_backward(const TapeStep& step, const ModelParameters& params,
                 const RoadGraph& graph, Index batch, const Matrix& d_out,
                 ModelParameters& grads) {
  Matrix d = d_out;
  for (int layer = params.dims.gc_layers - 1; layer >= 0; --layer) {
    const auto idx = static_cast<std::size_t>(layer);
    grads.gc[idx].weight.noalias() +=
        step.gc.propagated[idx].transpose() * d;
    grads.gc[idx].bias += d.colwise().sum();
    if (layer > 0) {
      // d(prev activation) = prop^T (d W^T); propagation is symmetric.
      Matrix d_hidden = propagate_blocks(
          graph, d * params.gc[idx].weight.transpose(), batch);
      d = d_hidden.cwiseProduct(
          (step.gc.pre[idx - 1].array() > 0.0).cast<double>().matrix());
    }
  }
}

}  // namespace

ModelParameters zeros_like(const ModelParameters& params) {
  return make_shaped(params.dims);
}

ModelParameters init_params(const ModelDims& dims, std::uint64_t seed) {
  ModelParameters params = make_shaped(dims);
  Rng rng(seed);
  for (auto& layer : params.gc) fill_xavier(layer.weight, rng);
  fill_xavier(params.update_weight, rng);
  fill_xavier(params.reset_weight, rng);
  fill_xavier(params.candidate_weight, rng);
  fill_xavier(params.output_weight, rng);
  return params;
}

Matrix propagate_blocks(const RoadGraph& graph, const Matrix& stacked,
                        Index batch) {
  const Index n = graph.nodes();
  if (stacked.rows() != batch * n) {
    fail(ErrorCode::shape_mismatch,
         "stacked rows (" + std::to_string(stacked.rows()) +
             ") are not batch (" + std::to_string(batch) + ") x nodes (" +
             std::to_string(n) + ")");
  }
  if (batch == 1) return graph.propagation * stacked;
  Matrix out(stacked.rows(), stacked.cols());
  for (Index b = 0; b < batch; ++b) {
    out.middleRows(b * n, n).noalias() =
        graph.propagation * stacked.middleRows(b * n, n);
  }
  return out;
}

Matrix gc(const ModelParameters& params, const RoadGraph& graph,
          const Matrix& features, Index batch) {
  return gc_cached(params, graph, features, batch, nullptr);
}

CellState cell_step(const Matrix& features_t, const Matrix& hidden_prev,
                    const ModelParameters& params, const RoadGraph& graph,
                    Index batch) {
  CellState state;
  state.hidden =
      step_impl(features_t, hidden_prev, params, graph, batch, &state.cache);
  return state;
}

Matrix forward(std::span<const Matrix> sequence, const ModelParameters& params,
               const RoadGraph& graph, Index batch, Tape* tape) {
  if (sequence.empty()) {
    fail(ErrorCode::invalid_argument, "input sequence is empty");
  }
  const ModelDims& dims = params.dims;
  Matrix hidden = Matrix::Zero(batch * dims.nodes, dims.hidden_units);
  if (tape) {
    tape->dims = dims;
    tape->batch = batch;
    tape->steps.clear();
    tape->steps.resize(sequence.size());
  }
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    hidden = step_impl(sequence[t], hidden, params, graph, batch,
                       tape ? &tape->steps[t] : nullptr);
  }
  Matrix predictions = hidden * params.output_weight;
  predictions.rowwise() += params.output_bias;
  if (tape) {
    tape->hidden_last = std::move(hidden);
    tape->predictions = predictions;
  }
  return predictions;
}

ModelParameters backward(const Tape& tape, const ModelParameters& params,
                         const RoadGraph& graph, const Matrix& d_predictions) {
  if (tape.steps.empty()) {
    fail(ErrorCode::tape_mismatch, "tape has no recorded steps");
  }
  if (!(params.dims == tape.dims)) {
    fail(ErrorCode::tape_mismatch, "parameters do not match the tape's dims");
  }
  if (d_predictions.rows() != tape.predictions.rows() ||
      d_predictions.cols() != tape.predictions.cols()) {
    fail(ErrorCode::tape_mismatch,
         "prediction gradient is " + std::to_string(d_predictions.rows()) +
             "x" + std::to_string(d_predictions.cols()) + ", tape recorded " +
             std::to_string(tape.predictions.rows()) + "x" +
             std::to_string(tape.predictions.cols()));
  }

  const Index g = tape.dims.gc_units;
  const Index h = tape.dims.hidden_units;
  ModelParameters grads = make_shaped(tape.dims);

  grads.output_weight.noalias() = tape.hidden_last.transpose() * d_predictions;
  grads.output_bias = d_predictions.colwise().sum();
  Matrix d_hidden = d_predictions * params.output_weight.transpose();

  for (std::size_t t = tape.steps.size(); t-- > 0;) {
    const TapeStep& step = tape.steps[t];
    const Matrix& u = step.update;
    const Matrix& c = step.candidate;
    const Matrix& h_prev = step.hidden_prev;

    // h = u .* h_prev + (1 - u) .* c
    const Matrix d_update = d_hidden.cwiseProduct(h_prev - c);
    const Matrix d_candidate =
        d_hidden.cwiseProduct((1.0 - u.array()).matrix());
    Matrix d_hidden_prev = d_hidden.cwiseProduct(u);

    const Matrix d_candidate_pre =
        d_candidate.cwiseProduct((1.0 - c.array().square()).matrix());
    grads.candidate_weight.noalias() +=
        step.candidate_input.transpose() * d_candidate_pre;
    grads.candidate_bias += d_candidate_pre.colwise().sum();
    const Matrix d_candidate_input =
        d_candidate_pre * params.candidate_weight.transpose();

    const Matrix d_gated = d_candidate_input.rightCols(h);  // d(r .* h_prev)
    const Matrix d_reset = d_gated.cwiseProduct(h_prev);
    d_hidden_prev += d_gated.cwiseProduct(step.reset);

    const Matrix d_update_pre = d_update.cwiseProduct(
        u.cwiseProduct((1.0 - u.array()).matrix()));
    const Matrix d_reset_pre = d_reset.cwiseProduct(step.reset.cwiseProduct(
        (1.0 - step.reset.array()).matrix()));
    grads.update_weight.noalias() +=
        step.gate_input.transpose() * d_update_pre;
    grads.update_bias += d_update_pre.colwise().sum();
    grads.reset_weight.noalias() += step.gate_input.transpose() * d_reset_pre;
    grads.reset_bias += d_reset_pre.colwise().sum();

    Matrix d_gate_input = d_update_pre * params.update_weight.transpose();
    d_gate_input.noalias() += d_reset_pre * params.reset_weight.transpose();

    const Matrix d_conv =
        d_gate_input.leftCols(g) + d_candidate_input.leftCols(g);
    d_hidden_prev += d_gate_input.rightCols(h);

    gc_backward(step, params, graph, tape.batch, d_conv, grads);
    d_hidden = std::move(d_hidden_prev);
  }
  return grads;
}

}  // namespace astgcn
