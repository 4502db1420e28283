#include "astgcn/eval.hpp"

#include <algorithm>
#include <string>

#include "astgcn/error.hpp"
#include "astgcn/rng.hpp"

namespace astgcn {

Matrix predict_windows(const ModelParameters& params, const RoadGraph& graph,
                       const std::vector<Matrix>& augmented,
                       std::span<const WindowedSample> windows, Index nodes,
                       Index batch_cap) {
  if (windows.empty()) {
    fail(ErrorCode::invalid_argument, "no windows to predict");
  }
  const Index horizon = params.dims.horizon;
  Matrix stacked(static_cast<Index>(windows.size()) * nodes, horizon);
  // assemble_batch also gathers targets; a zero matrix stands in for them.
  const Matrix no_targets =
      Matrix::Zero(static_cast<Index>(augmented.size()), nodes);
  std::vector<Matrix> step_inputs;
  Matrix targets;
  for (std::size_t start = 0; start < windows.size();
       start += static_cast<std::size_t>(batch_cap)) {
    const std::size_t count =
        std::min(static_cast<std::size_t>(batch_cap), windows.size() - start);
    const std::span<const WindowedSample> chunk(&windows[start], count);
    assemble_batch(augmented, no_targets, chunk, step_inputs, targets);
    stacked.middleRows(static_cast<Index>(start) * nodes,
                       static_cast<Index>(count) * nodes) =
        forward(step_inputs, params, graph, static_cast<Index>(count));
  }
  return stacked;
}

MetricReport evaluate_horizon_step(const Matrix& stacked_predictions,
                                   std::span<const WindowedSample> windows,
                                   const SpeedSeries& series,
                                   Index horizon_step) {
  const Index nodes = series.nodes();
  const Index count = static_cast<Index>(windows.size());
  if (horizon_step < 1 || horizon_step > stacked_predictions.cols()) {
    fail(ErrorCode::index_out_of_range,
         "horizon step " + std::to_string(horizon_step) +
             " outside the model horizon of " +
             std::to_string(stacked_predictions.cols()));
  }
  Matrix truth(count, nodes);
  Matrix predicted(count, nodes);
  for (Index w = 0; w < count; ++w) {
    const Index t =
        windows[static_cast<std::size_t>(w)].target.begin + horizon_step - 1;
    truth.row(w) = series.values.row(t);
    predicted.row(w) = stacked_predictions.col(horizon_step - 1)
                           .segment(w * nodes, nodes)
                           .transpose() *
                       series.max_speed;
  }
  MetricReport report = compute_metrics(truth, predicted);
  report.horizon_minutes =
      static_cast<int>(horizon_step) * series.interval_minutes;
  return report;
}

std::vector<MetricReport> evaluate_horizons_with_inputs(
    const ModelParameters& params, const RoadGraph& graph,
    const Matrix& normalized_inputs, const SpeedSeries& series,
    const AttributeBundle& attrs, const AugmentSpec& spec,
    const TimeRange& test_range, Index seq_len,
    const std::vector<Index>& horizon_steps) {
  const auto windows = make_windows(test_range, seq_len, params.dims.horizon);
  const auto augmented = augment_series(normalized_inputs, attrs, spec);
  const Matrix predictions =
      predict_windows(params, graph, augmented, windows, series.nodes());
  std::vector<MetricReport> reports;
  reports.reserve(horizon_steps.size());
  for (Index step : horizon_steps) {
    reports.push_back(
        evaluate_horizon_step(predictions, windows, series, step));
  }
  return reports;
}

std::vector<MetricReport> evaluate_horizons(
    const ModelParameters& params, const RoadGraph& graph,
    const SpeedSeries& series, const AttributeBundle& attrs,
    const AugmentSpec& spec, const TimeRange& test_range, Index seq_len,
    const std::vector<Index>& horizon_steps) {
  return evaluate_horizons_with_inputs(params, graph, series.normalized(),
                                       series, attrs, spec, test_range,
                                       seq_len, horizon_steps);
}

Matrix perturb_inputs(const Matrix& normalized, const TimeRange& range,
                      NoiseKind kind, double param, std::uint64_t seed,
                      double max_speed) {
  if (!(param >= 0.0)) {
    fail(ErrorCode::invalid_argument, "noise parameter must be >= 0");
  }
  if (range.begin < 0 || range.end > normalized.rows()) {
    fail(ErrorCode::index_out_of_range, "perturbation range outside series");
  }
  Matrix out = normalized;
  Rng rng(seed);
  for (Index t = range.begin; t < range.end; ++t) {
    for (Index i = 0; i < out.cols(); ++i) {
      if (kind == NoiseKind::gaussian) {
        out(t, i) += param * rng.normal();
      } else {
        out(t, i) +=
            (static_cast<double>(rng.poisson(param)) - param) / max_speed;
      }
    }
  }
  return out;
}

std::vector<AblationSetting> ablation_settings(const AugmentSpec& base) {
  AugmentSpec none = base, poi = base, weather = base, both = base;
  none.use_static = false;
  none.use_dynamic = false;
  poi.use_static = true;
  poi.use_dynamic = false;
  weather.use_static = false;
  weather.use_dynamic = true;
  both.use_static = true;
  both.use_dynamic = true;
  return {{"tgcn", none},
          {"poi", poi},
          {"weather", weather},
          {"weather+poi", both}};
}

std::vector<AblationResult> run_ablation(
    const TrainConfig& config, const RoadGraph& graph,
    const SpeedSeries& series, const AttributeBundle& attrs,
    const AugmentSpec& base, const SplitRanges& split,
    const std::vector<Index>& horizon_steps) {
  std::vector<AblationResult> results;
  for (const AblationSetting& setting : ablation_settings(base)) {
    AblationResult result;
    result.setting = setting;
    result.train = train(config, graph, series, attrs, setting.spec, split);
    result.reports =
        evaluate_horizons(result.train.params, graph, series, attrs,
                          setting.spec, split.test, config.seq_len,
                          horizon_steps);
    for (MetricReport& report : result.reports) {
      report.setting_label = setting.label;
    }
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace astgcn
