#include "astgcn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "astgcn/csv.hpp"
#include "astgcn/error.hpp"

namespace astgcn {

namespace {

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

}  // namespace

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label,
                          const std::vector<double>& x,
                          const std::vector<ChartSeries>& series) {
  if (series.empty() || x.empty()) {
    fail(ErrorCode::invalid_argument, "chart needs at least one point");
  }
  for (const ChartSeries& s : series) {
    if (s.values.size() != x.size()) {
      fail(ErrorCode::shape_mismatch,
           "series '" + s.label + "' length does not match the x axis");
    }
  }

  const double width = 960, height = 480;
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = *std::min_element(x.begin(), x.end());
  double x_max = *std::max_element(x.begin(), x.end());
  double y_min = series[0].values[0], y_max = y_min;
  for (const ChartSeries& s : series) {
    for (double v : s.values) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const auto to_px = [&](double xv, double yv) {
    const double px = left + (xv - x_min) / (x_max - x_min) * plot_w;
    const double py = top + (1.0 - (yv - y_min) / (y_max - y_min)) * plot_h;
    return std::pair<double, double>(px, py);
  };

  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write chart: " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n"
      << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << escape_xml(title) << "</text>\n";

  // frame and y ticks
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  const int ticks = 5;
  for (int k = 0; k <= ticks; ++k) {
    const double yv = y_min + (y_max - y_min) * k / ticks;
    const auto [px, py] = to_px(x_min, yv);
    out << "<line x1=\"" << left << "\" y1=\"" << py << "\" x2=\""
        << left + plot_w << "\" y2=\"" << py
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << format_double(std::round(yv * 100.0) / 100.0) << "</text>\n";
    (void)px;
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">"
      << escape_xml(x_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << series[s].color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto [px, py] = to_px(x[i], series[s].values[i]);
      if (i) out << ' ';
      out << format_double(std::round(px * 100.0) / 100.0) << ','
          << format_double(std::round(py * 100.0) / 100.0);
    }
    out << "\"/>\n";
    // legend entry
    const double lx = left + 10;
    const double ly = top + 16 + 18 * static_cast<double>(s);
    out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24
        << "\" y2=\"" << ly << "\" stroke=\"" << series[s].color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(series[s].label) << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) fail(ErrorCode::io_error, "chart write failed: " + path);
}

}  // namespace astgcn
