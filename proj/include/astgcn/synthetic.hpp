#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "astgcn/dataset.hpp"
#include "astgcn/graph.hpp"

namespace astgcn {

/// Canonical vocabularies: nine POI classes and five weather classes, in the
/// order used for ordinal encoding (weather severity ascends).
const std::vector<std::string>& default_poi_vocabulary();
const std::vector<std::string>& default_weather_vocabulary();

struct SyntheticOptions {
  Index nodes = 20;
  Index steps = 2000;
  std::uint64_t seed = 1;
  double effect_size = 10.0;
  int interval_minutes = 15;
  EncodingMode encoding = EncodingMode::ordinal;
};

struct SyntheticData {
  RoadGraph graph;
  SpeedSeries series;
  AttributeBundle attrs;
  std::vector<std::string> node_poi;      // raw category per node
  std::vector<std::string> step_weather;  // raw category per time step
  std::vector<double> weather_severity;   // ordinal severity per time step
};

/// Synthetic traffic with planted attribute effects: per-node daily sinusoid
/// plus graph-smoothed AR(1) noise, minus effect_size * weather severity,
/// minus a POI-class-dependent drop during dining hours. effect_size == 0
/// makes speeds statistically independent of both attributes. Deterministic
/// in the seed.
/// Pre: nodes >= 2, steps >= 200.
SyntheticData generate_synthetic(const SyntheticOptions& options);

/// True if the step falls in the planted dining hours (11-13h and 17-20h).
bool in_dining_hours(Index step, int interval_minutes);

/// Dining-hour speed drop factor for a POI class index (1 for the first
/// class, descending linearly to 0 for the last).
double dining_affinity(Index poi_index, Index num_classes);

}  // namespace astgcn
