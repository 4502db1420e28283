#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "astgcn/metrics.hpp"
#include "astgcn/train.hpp"

namespace astgcn {

/// Normalized predictions for a list of windows, stacked as one
/// (windows * n) x T_out matrix (row block b holds window b's nodes).
/// Windows are processed in chunks of at most batch_cap samples.
Matrix predict_windows(const ModelParameters& params, const RoadGraph& graph,
                       const std::vector<Matrix>& augmented,
                       std::span<const WindowedSample> windows, Index nodes,
                       Index batch_cap = 256);

/// Scores one horizon step (1-based): that step's prediction column against
/// the true raw speeds, denormalized before the metrics.
MetricReport evaluate_horizon_step(const Matrix& stacked_predictions,
                                   std::span<const WindowedSample> windows,
                                   const SpeedSeries& series,
                                   Index horizon_step);

/// One report per requested horizon step over the test-range windows.
/// Pre: every step is within the model's horizon.
std::vector<MetricReport> evaluate_horizons(
    const ModelParameters& params, const RoadGraph& graph,
    const SpeedSeries& series, const AttributeBundle& attrs,
    const AugmentSpec& spec, const TimeRange& test_range, Index seq_len,
    const std::vector<Index>& horizon_steps);

/// Same, but augmenting from a caller-supplied normalized speed matrix
/// (used by the perturbation harness; truth still comes from the series).
std::vector<MetricReport> evaluate_horizons_with_inputs(
    const ModelParameters& params, const RoadGraph& graph,
    const Matrix& normalized_inputs, const SpeedSeries& series,
    const AttributeBundle& attrs, const AugmentSpec& spec,
    const TimeRange& test_range, Index seq_len,
    const std::vector<Index>& horizon_steps);

enum class NoiseKind { gaussian, poisson };

/// Copy of the normalized speed matrix with noise added over `range` rows:
/// gaussian adds N(0, sigma^2); poisson adds centered (P(lambda) - lambda)
/// scaled by 1 / max_speed. Deterministic in the seed.
Matrix perturb_inputs(const Matrix& normalized, const TimeRange& range,
                      NoiseKind kind, double param, std::uint64_t seed,
                      double max_speed);

/// The four attribute settings of the ablation protocol, sharing window_m.
struct AblationSetting {
  std::string label;  // tgcn | poi | weather | weather+poi
  AugmentSpec spec;
};
std::vector<AblationSetting> ablation_settings(const AugmentSpec& base);

struct AblationResult {
  AblationSetting setting;
  TrainResult train;
  std::vector<MetricReport> reports;  // one per requested horizon
};

/// Trains the four settings from the same seed and scores each on the test
/// range. Labels follow the data semantics: static attributes are "poi",
/// dynamic are "weather", none is "tgcn".
std::vector<AblationResult> run_ablation(
    const TrainConfig& config, const RoadGraph& graph,
    const SpeedSeries& series, const AttributeBundle& attrs,
    const AugmentSpec& base, const SplitRanges& split,
    const std::vector<Index>& horizon_steps);

}  // namespace astgcn
