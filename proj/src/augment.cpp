#include "astgcn/augment.hpp"

#include <algorithm>
#include <string>

#include "astgcn/error.hpp"

namespace astgcn {

Matrix augment_step(const Vector& x_t, const Matrix& static_attrs,
                    const std::vector<Matrix>& dynamic_attrs, Index t,
                    const AugmentSpec& spec) {
  const Index n = x_t.size();
  if (spec.window_m < 0) {
    fail(ErrorCode::invalid_argument, "window_m must be non-negative");
  }
  if (spec.use_static && static_attrs.rows() != n) {
    fail(ErrorCode::shape_mismatch,
         "static attribute rows (" + std::to_string(static_attrs.rows()) +
             ") do not match node count (" + std::to_string(n) + ")");
  }
  for (const Matrix& channel : dynamic_attrs) {
    if (spec.use_dynamic && channel.cols() != n) {
      fail(ErrorCode::shape_mismatch,
           "dynamic attribute columns (" + std::to_string(channel.cols()) +
               ") do not match node count (" + std::to_string(n) + ")");
    }
    if (spec.use_dynamic && (t < 0 || t >= channel.rows())) {
      fail(ErrorCode::index_out_of_range,
           "time index " + std::to_string(t) + " outside dynamic series of " +
               std::to_string(channel.rows()) + " steps");
    }
  }

  const Index p = spec.use_static ? static_attrs.cols() : 0;
  const Index w = spec.use_dynamic ? static_cast<Index>(dynamic_attrs.size()) : 0;
  Matrix out(n, spec.width(p, w));
  out.col(0) = x_t;
  Index col = 1;
  if (spec.use_static) {
    out.block(0, col, n, p) = static_attrs;
    col += p;
  }
  if (spec.use_dynamic) {
    for (Index j = 0; j < w; ++j) {
      const Matrix& channel = dynamic_attrs[static_cast<std::size_t>(j)];
      for (int k = spec.window_m; k >= 0; --k) {
        const Index when = std::max<Index>(0, t - k);  // replicate the start
        out.col(col++) = channel.row(when).transpose();
      }
    }
  }
  return out;
}

std::vector<Matrix> augment_sequence(const Matrix& normalized_speeds,
                                     const AttributeBundle& attrs,
                                     const AugmentSpec& spec,
                                     const WindowedSample& window) {
  if (window.input.begin < 0 || window.input.end > normalized_speeds.rows()) {
    fail(ErrorCode::index_out_of_range,
         "window [" + std::to_string(window.input.begin) + "," +
             std::to_string(window.input.end) + ") outside series of " +
             std::to_string(normalized_speeds.rows()) + " steps");
  }
  std::vector<Matrix> sequence;
  sequence.reserve(static_cast<std::size_t>(window.input.length()));
  for (Index t = window.input.begin; t < window.input.end; ++t) {
    sequence.push_back(augment_step(normalized_speeds.row(t).transpose(),
                                    attrs.static_attrs, attrs.dynamic_attrs, t,
                                    spec));
  }
  return sequence;
}

std::vector<Matrix> augment_series(const Matrix& normalized_speeds,
                                   const AttributeBundle& attrs,
                                   const AugmentSpec& spec) {
  const Index total = normalized_speeds.rows();
  std::vector<Matrix> series;
  series.reserve(static_cast<std::size_t>(total));
  for (Index t = 0; t < total; ++t) {
    series.push_back(augment_step(normalized_speeds.row(t).transpose(),
                                  attrs.static_attrs, attrs.dynamic_attrs, t,
                                  spec));
  }
  return series;
}

}  // namespace astgcn
