#pragma once

#include <optional>
#include <string>

#include "astgcn/types.hpp"

namespace astgcn {

/// One row of the evaluation tables. accuracy is undefined when the truth
/// matrix is all zero; r2 and var are undefined when the truth is constant
/// (surfaced as empty optionals, never as silent NaN).
struct MetricReport {
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> accuracy;  // 1 - ||y - yhat||_F / ||y||_F
  std::optional<double> r2;        // 1 - SS_res / SS_tot, grand mean
  std::optional<double> var;       // 1 - Var(y - yhat) / Var(y)
  int horizon_minutes = 0;
  std::string setting_label;
};

/// All five metrics over the flattened matrices, on the denormalized (raw
/// speed) scale. Pre: same shape, at least 2 elements.
/// Errors: shape_mismatch, invalid_argument.
MetricReport compute_metrics(const Matrix& y_true, const Matrix& y_pred);

}  // namespace astgcn
