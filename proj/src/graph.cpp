#include "astgcn/graph.hpp"

#include <cmath>
#include <string>

#include "astgcn/csv.hpp"
#include "astgcn/error.hpp"

namespace astgcn {

namespace {
constexpr double kSymmetryTolerance = 1e-9;
}

RoadGraph build_graph(const Matrix& adjacency) {
  const Index n = adjacency.rows();
  if (adjacency.cols() != n) {
    fail(ErrorCode::non_square,
         "adjacency must be square, got " + std::to_string(n) + "x" +
             std::to_string(adjacency.cols()));
  }
  if (n == 0) fail(ErrorCode::non_square, "adjacency is empty");
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (adjacency(i, j) < 0.0) {
        fail(ErrorCode::negative_entry,
             "negative adjacency entry at (" + std::to_string(i) + "," +
                 std::to_string(j) + ")");
      }
      if (j > i &&
          std::abs(adjacency(i, j) - adjacency(j, i)) > kSymmetryTolerance) {
        fail(ErrorCode::asymmetric,
             "adjacency asymmetric at (" + std::to_string(i) + "," +
                 std::to_string(j) + "): " + format_double(adjacency(i, j)) +
                 " vs " + format_double(adjacency(j, i)));
      }
    }
  }

  // Degrees of A + I; the self-loop keeps every degree strictly positive.
  Vector inv_sqrt_degree(n);
  for (Index i = 0; i < n; ++i) {
    inv_sqrt_degree(i) = 1.0 / std::sqrt(adjacency.row(i).sum() + 1.0);
  }

  // Upper triangle computed once, lower mirrored, so the result is symmetric
  // to the bit.
  Matrix propagation(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const double with_loop = adjacency(i, j) + (i == j ? 1.0 : 0.0);
      const double value = inv_sqrt_degree(i) * with_loop * inv_sqrt_degree(j);
      propagation(i, j) = value;
      propagation(j, i) = value;
    }
  }
  return RoadGraph{adjacency, std::move(propagation)};
}

Matrix propagate(const RoadGraph& graph, const Matrix& features) {
  if (features.rows() != graph.nodes()) {
    fail(ErrorCode::dimension_mismatch,
         "feature rows (" + std::to_string(features.rows()) +
             ") do not match node count (" + std::to_string(graph.nodes()) +
             ")");
  }
  return graph.propagation * features;
}

RoadGraph load_adjacency_csv(const std::string& path) {
  return build_graph(read_numeric_csv(path));
}

void write_adjacency_csv(const std::string& path, const Matrix& adjacency) {
  write_numeric_csv(path, adjacency);
}

}  // namespace astgcn
