#pragma once

#include <string>
#include <vector>

#include "astgcn/types.hpp"

namespace astgcn {

struct ChartSeries {
  std::string label;
  std::string color;
  std::vector<double> values;
};

/// Standalone SVG line chart: one polyline per series over a shared x axis,
/// with a simple frame, y-axis ticks, and a legend. No external plotting
/// dependency; CSV stays the canonical output and charts are derived from it.
void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label,
                          const std::vector<double>& x,
                          const std::vector<ChartSeries>& series);

}  // namespace astgcn
