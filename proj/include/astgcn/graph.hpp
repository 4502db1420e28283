#pragma once

#include <string>

#include "astgcn/types.hpp"

namespace astgcn {

/// Road network with the precomputed symmetric-normalized propagation matrix
/// used by every graph convolution. Immutable after construction; safe to
/// share across threads.
struct RoadGraph {
  Matrix adjacency;    // n x n, non-negative, symmetric; stored as given
  Matrix propagation;  // D^{-1/2} (A + I) D^{-1/2}, exactly symmetric

  Index nodes() const { return adjacency.rows(); }
};

/// Validates the adjacency matrix (square, symmetric within 1e-9, entries
/// >= 0) and precomputes the propagation matrix. The self-loop added before
/// normalization guarantees strictly positive degrees.
/// Errors: non_square, asymmetric, negative_entry (each names the offending
/// index).
RoadGraph build_graph(const Matrix& adjacency);

/// One propagation product: returns propagation * features.
/// Errors: dimension_mismatch.
Matrix propagate(const RoadGraph& graph, const Matrix& features);

/// Adjacency CSV: n rows of n comma-separated values, no header.
RoadGraph load_adjacency_csv(const std::string& path);
void write_adjacency_csv(const std::string& path, const Matrix& adjacency);

}  // namespace astgcn
