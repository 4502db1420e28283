#include "astgcn/synthetic.hpp"

#include <cmath>

#include "astgcn/error.hpp"
#include "astgcn/rng.hpp"

namespace astgcn {

const std::vector<std::string>& default_poi_vocabulary() {
  static const std::vector<std::string> vocab = {
      "catering",  "enterprise", "shopping", "transportation", "education",
      "living",    "medical",    "accommodation", "other"};
  return vocab;
}

const std::vector<std::string>& default_weather_vocabulary() {
  static const std::vector<std::string> vocab = {"sunny", "cloudy", "fog",
                                                 "light rain", "heavy rain"};
  return vocab;
}

bool in_dining_hours(Index step, int interval_minutes) {
  const int minutes_per_day = 24 * 60;
  const int minute =
      static_cast<int>((step * interval_minutes) % minutes_per_day);
  const int hour = minute / 60;
  return (hour >= 11 && hour < 13) || (hour >= 17 && hour < 20);
}

double dining_affinity(Index poi_index, Index num_classes) {
  if (num_classes <= 1) return 1.0;
  return static_cast<double>(num_classes - 1 - poi_index) /
         static_cast<double>(num_classes - 1);
}

namespace {

Matrix random_connected_adjacency(Index n, Rng& rng) {
  Matrix adjacency = Matrix::Zero(n, n);
  // Ring keeps the graph connected; random chords add structure.
  for (Index i = 0; i < n; ++i) {
    const Index j = (i + 1) % n;
    adjacency(i, j) = 1.0;
    adjacency(j, i) = 1.0;
  }
  const Index chords = n / 2;
  for (Index k = 0; k < chords; ++k) {
    const Index a = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    const Index b = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    if (a != b) {
      adjacency(a, b) = 1.0;
      adjacency(b, a) = 1.0;
    }
  }
  return adjacency;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticOptions& options) {
  if (options.nodes < 2) {
    fail(ErrorCode::invalid_argument, "synthetic data needs nodes >= 2");
  }
  if (options.steps < 200) {
    fail(ErrorCode::invalid_argument, "synthetic data needs steps >= 200");
  }
  const Index n = options.nodes;
  const Index total = options.steps;

  Rng graph_rng(derive_seed(options.seed, 0));
  Rng attr_rng(derive_seed(options.seed, 1));
  Rng noise_rng(derive_seed(options.seed, 2));

  SyntheticData data;
  data.graph = build_graph(random_connected_adjacency(n, graph_rng));

  // Static POI class per node.
  const auto& poi_vocab = default_poi_vocabulary();
  const Index poi_classes = static_cast<Index>(poi_vocab.size());
  std::vector<Index> poi_index(static_cast<std::size_t>(n));
  data.node_poi.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Index c = static_cast<Index>(
        attr_rng.below(static_cast<std::uint64_t>(poi_classes)));
    poi_index[static_cast<std::size_t>(i)] = c;
    data.node_poi[static_cast<std::size_t>(i)] =
        poi_vocab[static_cast<std::size_t>(c)];
  }

  // Weather: persistent walk over severity-ordered classes (stay with
  // probability 0.9, otherwise move one class up or down, clamped).
  const auto& weather_vocab = default_weather_vocabulary();
  const Index weather_classes = static_cast<Index>(weather_vocab.size());
  data.step_weather.resize(static_cast<std::size_t>(total));
  data.weather_severity.resize(static_cast<std::size_t>(total));
  Index state = static_cast<Index>(
      attr_rng.below(static_cast<std::uint64_t>(weather_classes)));
  for (Index t = 0; t < total; ++t) {
    const double move = attr_rng.uniform();
    if (move >= 0.9) {
      state += (move < 0.95) ? -1 : 1;
      state = std::max<Index>(0, std::min(weather_classes - 1, state));
    }
    data.step_weather[static_cast<std::size_t>(t)] =
        weather_vocab[static_cast<std::size_t>(state)];
    data.weather_severity[static_cast<std::size_t>(t)] =
        static_cast<double>(state) / static_cast<double>(weather_classes - 1);
  }

  // Per-node sinusoid parameters.
  Vector base(n), amplitude(n), phase(n);
  for (Index i = 0; i < n; ++i) {
    base(i) = 50.0 + noise_rng.uniform(-5.0, 5.0);
    amplitude(i) = 8.0 + noise_rng.uniform(0.0, 4.0);
    phase(i) = noise_rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  }

  const Index steps_per_day =
      static_cast<Index>(24 * 60 / options.interval_minutes);
  Matrix speeds(total, n);
  Vector ar_state = Vector::Zero(n);
  Vector innovations(n);
  // The noise has a local part (per-node AR(1), mixed by the propagation
  // matrix) and a slow network-wide part. The common component is what makes
  // the planted weather effect non-trivial: a global additive shift cannot
  // be separated from it by averaging speeds across nodes, so the severity
  // is only identifiable through the attribute channel.
  double common = 0.0;
  for (Index t = 0; t < total; ++t) {
    for (Index i = 0; i < n; ++i) innovations(i) = 2.0 * noise_rng.normal();
    ar_state = 0.5 * ar_state + innovations;
    common = 0.95 * common + 0.7 * noise_rng.normal();
    const Vector smoothed =
        data.graph.propagation * ar_state + Vector::Constant(n, common);

    const double severity = data.weather_severity[static_cast<std::size_t>(t)];
    const bool dining = in_dining_hours(t, options.interval_minutes);
    const double angle = 2.0 * 3.14159265358979323846 *
                         static_cast<double>(t % steps_per_day) /
                         static_cast<double>(steps_per_day);
    for (Index i = 0; i < n; ++i) {
      double value = base(i) + amplitude(i) * std::sin(angle + phase(i)) +
                     smoothed(i) - options.effect_size * severity;
      if (dining) {
        value -= options.effect_size *
                 dining_affinity(poi_index[static_cast<std::size_t>(i)],
                                 poi_classes);
      }
      speeds(t, i) = std::max(0.0, value);
    }
  }

  data.series.values = std::move(speeds);
  data.series.interval_minutes = options.interval_minutes;

  // Encode the attributes the same way the CSV loaders would.
  data.attrs.static_encoding = {options.encoding, poi_vocab};
  data.attrs.dynamic_encoding = {options.encoding, weather_vocab};
  data.attrs.static_attrs =
      Matrix::Zero(n, data.attrs.static_encoding.width());
  for (Index i = 0; i < n; ++i) {
    const Index c = poi_index[static_cast<std::size_t>(i)];
    if (options.encoding == EncodingMode::ordinal) {
      data.attrs.static_attrs(i, 0) =
          data.attrs.static_encoding.ordinal_value(c);
    } else {
      data.attrs.static_attrs(i, c) = 1.0;
    }
  }
  const Index w = data.attrs.dynamic_encoding.width();
  data.attrs.dynamic_attrs.assign(static_cast<std::size_t>(w),
                                  Matrix::Zero(total, n));
  for (Index t = 0; t < total; ++t) {
    const auto& token = data.step_weather[static_cast<std::size_t>(t)];
    const Index c = data.attrs.dynamic_encoding.category_index(token, "synthetic");
    if (options.encoding == EncodingMode::ordinal) {
      data.attrs.dynamic_attrs[0].row(t).setConstant(
          data.attrs.dynamic_encoding.ordinal_value(c));
    } else {
      data.attrs.dynamic_attrs[static_cast<std::size_t>(c)].row(t).setOnes();
    }
  }
  return data;
}

}  // namespace astgcn
