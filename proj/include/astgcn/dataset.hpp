#pragma once

#include <string>
#include <vector>

#include "astgcn/types.hpp"

namespace astgcn {

/// Per-node speed time series, stored time-major (T x n, raw units).
/// max_speed is the maximum over the training partition only and is set by
/// chronological_split.
struct SpeedSeries {
  Matrix values;           // T x n raw speeds
  double max_speed = 0.0;  // unset until split
  int interval_minutes = 15;

  Index steps() const { return values.rows(); }
  Index nodes() const { return values.cols(); }

  /// values / max_speed. Training-partition values land in [0, 1]; test
  /// values may exceed 1.
  Matrix normalized() const;
};

enum class EncodingMode { ordinal, one_hot };

/// A categorical channel description: the vocabulary order is the encoding
/// order (ordinal severity/index, or one-hot column position).
struct CategoricalEncoding {
  EncodingMode mode = EncodingMode::ordinal;
  std::vector<std::string> vocabulary;

  Index width() const {
    if (vocabulary.empty()) return 0;
    return mode == EncodingMode::ordinal
               ? 1
               : static_cast<Index>(vocabulary.size());
  }

  /// Index of a token in the vocabulary. Errors: unknown_category
  /// (names the token; `where` describes the file position).
  Index category_index(const std::string& token, const std::string& where) const;

  /// Ordinal value of class k: k / (size - 1), or 0 for a single class.
  double ordinal_value(Index category) const;
};

/// Static matrix S (n x p) and dynamic channels D (w matrices, each T x n),
/// all entries encoded into [0, 1].
struct AttributeBundle {
  Matrix static_attrs;                // n x p (p == 0 when absent)
  std::vector<Matrix> dynamic_attrs;  // w channels of T x n
  CategoricalEncoding static_encoding;
  CategoricalEncoding dynamic_encoding;

  Index static_width() const { return static_attrs.cols(); }
  Index dynamic_width() const { return static_cast<Index>(dynamic_attrs.size()); }
};

/// One training/evaluation sample: seq_len input steps followed immediately
/// by t_out target steps. Windows never straddle the train/test boundary.
struct WindowedSample {
  TimeRange input;
  TimeRange target;
};

struct SplitRanges {
  TimeRange train;
  TimeRange test;
};

/// Loads a rectangular numeric CSV as a speed series. The paper's layout has
/// nodes as rows and timestamps as columns; pass nodes_as_rows=false for the
/// transposed orientation. Stored time-major either way.
/// Errors: io_error, empty_file, ragged_rows, non_numeric_cell.
SpeedSeries load_speed_csv(const std::string& path, int interval_minutes,
                           bool nodes_as_rows);

void write_speed_csv(const std::string& path, const SpeedSeries& series,
                     bool nodes_as_rows);

/// Chronological split: train = first floor(T * ratio) steps, test = rest.
/// Sets series.max_speed from the train range only.
/// Errors: invalid_argument (ratio out of (0,1)), degenerate_split (either
/// side shorter than seq_len + t_out).
SplitRanges chronological_split(SpeedSeries& series, double train_ratio,
                                Index seq_len, Index t_out);

/// All stride-1 windows inside the range: count = len - seq_len - t_out + 1.
/// Errors: degenerate_split.
std::vector<WindowedSample> make_windows(const TimeRange& range, Index seq_len,
                                         Index t_out);

/// Static attribute CSV: header line, then one `node_id,category` row per
/// node; node ids must cover 0..n-1. expected_nodes == 0 skips the node-count
/// check. Errors: unknown_category, node_count_mismatch.
Matrix load_static_attrs(const std::string& path,
                         const CategoricalEncoding& encoding,
                         Index expected_nodes);

/// Dynamic attribute CSV: header line, then either `timestamp,category`
/// (broadcast to all nodes) or `timestamp,node_id,category` rows covering the
/// full grid. expected_steps == 0 skips the length check vs the speed series.
/// Errors: unknown_category, length_mismatch, node_count_mismatch.
std::vector<Matrix> load_dynamic_attrs(const std::string& path,
                                       const CategoricalEncoding& encoding,
                                       Index nodes, Index expected_steps);

/// Writers for the same formats (used by the synthetic generator).
void write_static_attrs_csv(const std::string& path,
                            const std::vector<std::string>& node_categories);
void write_dynamic_attrs_csv(const std::string& path,
                             const std::vector<std::string>& step_categories);

}  // namespace astgcn
