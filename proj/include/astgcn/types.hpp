#pragma once

#include <Eigen/Dense>

namespace astgcn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

/// Half-open interval [begin, end) of time-step indices.
struct TimeRange {
  Index begin = 0;
  Index end = 0;

  Index length() const { return end - begin; }
  bool contains(Index t) const { return t >= begin && t < end; }
};

}  // namespace astgcn
