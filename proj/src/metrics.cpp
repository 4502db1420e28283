#include "astgcn/metrics.hpp"

#include <cmath>
#include <string>

#include "astgcn/error.hpp"

namespace astgcn {

MetricReport compute_metrics(const Matrix& y_true, const Matrix& y_pred) {
  if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols()) {
    fail(ErrorCode::shape_mismatch,
         "metric shapes differ: " + std::to_string(y_true.rows()) + "x" +
             std::to_string(y_true.cols()) + " vs " +
             std::to_string(y_pred.rows()) + "x" +
             std::to_string(y_pred.cols()));
  }
  const Index count = y_true.size();
  if (count < 2) {
    fail(ErrorCode::invalid_argument,
         "metrics need at least 2 elements, got " + std::to_string(count));
  }
  const double n = static_cast<double>(count);
  const Matrix residual = y_true - y_pred;

  MetricReport report;
  report.rmse = std::sqrt(residual.squaredNorm() / n);
  report.mae = residual.cwiseAbs().sum() / n;

  const double truth_norm = y_true.norm();
  if (truth_norm > 0.0) {
    report.accuracy = 1.0 - residual.norm() / truth_norm;
  }

  const double truth_mean = y_true.sum() / n;
  const double total_ss = (y_true.array() - truth_mean).square().sum();
  if (total_ss > 0.0) {
    report.r2 = 1.0 - residual.squaredNorm() / total_ss;
    const double residual_mean = residual.sum() / n;
    const double residual_var =
        (residual.array() - residual_mean).square().sum() / n;
    report.var = 1.0 - residual_var / (total_ss / n);
  }
  return report;
}

}  // namespace astgcn
