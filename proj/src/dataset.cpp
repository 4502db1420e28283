#include "astgcn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "astgcn/csv.hpp"
#include "astgcn/error.hpp"

namespace astgcn {

namespace {

Index parse_index(const std::string& text, const std::string& where) {
  long long value = 0;
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size() ||
      value < 0) {
    fail(ErrorCode::non_numeric_cell,
         where + ": expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<Index>(value);
}

}  // namespace

Matrix SpeedSeries::normalized() const {
  if (!(max_speed > 0.0)) {
    fail(ErrorCode::invalid_argument,
         "max_speed is not set; run chronological_split first");
  }
  return values / max_speed;
}

Index CategoricalEncoding::category_index(const std::string& token,
                                          const std::string& where) const {
  const auto it = std::find(vocabulary.begin(), vocabulary.end(), token);
  if (it == vocabulary.end()) {
    fail(ErrorCode::unknown_category,
         where + ": unknown category '" + token + "'");
  }
  return static_cast<Index>(it - vocabulary.begin());
}

double CategoricalEncoding::ordinal_value(Index category) const {
  const Index size = static_cast<Index>(vocabulary.size());
  if (size <= 1) return 0.0;
  return static_cast<double>(category) / static_cast<double>(size - 1);
}

SpeedSeries load_speed_csv(const std::string& path, int interval_minutes,
                           bool nodes_as_rows) {
  Matrix raw = read_numeric_csv(path);
  SpeedSeries series;
  series.values = nodes_as_rows ? Matrix(raw.transpose()) : std::move(raw);
  series.interval_minutes = interval_minutes;
  return series;
}

void write_speed_csv(const std::string& path, const SpeedSeries& series,
                     bool nodes_as_rows) {
  if (nodes_as_rows) {
    write_numeric_csv(path, series.values.transpose());
  } else {
    write_numeric_csv(path, series.values);
  }
}

SplitRanges chronological_split(SpeedSeries& series, double train_ratio,
                                Index seq_len, Index t_out) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    fail(ErrorCode::invalid_argument,
         "train_ratio must lie in (0, 1), got " + format_double(train_ratio));
  }
  const Index total = series.steps();
  const Index cut = static_cast<Index>(
      std::floor(static_cast<double>(total) * train_ratio));
  SplitRanges split{{0, cut}, {cut, total}};
  const Index needed = seq_len + t_out;
  if (split.train.length() < needed || split.test.length() < needed) {
    fail(ErrorCode::degenerate_split,
         "split too short: train " + std::to_string(split.train.length()) +
             ", test " + std::to_string(split.test.length()) +
             ", need at least " + std::to_string(needed) + " steps each");
  }
  series.max_speed =
      series.values.block(0, 0, cut, series.nodes()).maxCoeff();
  return split;
}

std::vector<WindowedSample> make_windows(const TimeRange& range, Index seq_len,
                                         Index t_out) {
  if (seq_len < 1 || t_out < 1) {
    fail(ErrorCode::invalid_argument, "seq_len and t_out must be >= 1");
  }
  const Index count = range.length() - seq_len - t_out + 1;
  if (count < 1) {
    fail(ErrorCode::degenerate_split,
         "range of length " + std::to_string(range.length()) +
             " cannot hold a " + std::to_string(seq_len) + "+" +
             std::to_string(t_out) + " window");
  }
  std::vector<WindowedSample> windows;
  windows.reserve(static_cast<std::size_t>(count));
  for (Index start = range.begin; start + seq_len + t_out <= range.end;
       ++start) {
    windows.push_back(WindowedSample{{start, start + seq_len},
                                     {start + seq_len, start + seq_len + t_out}});
  }
  return windows;
}

Matrix load_static_attrs(const std::string& path,
                         const CategoricalEncoding& encoding,
                         Index expected_nodes) {
  const auto rows = read_csv_cells(path);
  if (rows.size() < 2) {
    fail(ErrorCode::empty_file, path + ": no data rows after header");
  }
  const Index n = static_cast<Index>(rows.size()) - 1;
  if (expected_nodes > 0 && n != expected_nodes) {
    fail(ErrorCode::node_count_mismatch,
         path + ": " + std::to_string(n) + " nodes, expected " +
             std::to_string(expected_nodes));
  }
  std::vector<Index> categories(static_cast<std::size_t>(n), -1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = path + ": row " + std::to_string(r);
    if (rows[r].size() != 2) {
      fail(ErrorCode::ragged_rows, where + ": expected node_id,category");
    }
    const Index node = parse_index(rows[r][0], where);
    if (node >= n || categories[static_cast<std::size_t>(node)] >= 0) {
      fail(ErrorCode::node_count_mismatch,
           where + ": node ids must cover 0.." + std::to_string(n - 1) +
               " exactly once (got " + std::to_string(node) + ")");
    }
    categories[static_cast<std::size_t>(node)] =
        encoding.category_index(rows[r][1], where);
  }

  Matrix attrs = Matrix::Zero(n, encoding.width());
  for (Index i = 0; i < n; ++i) {
    const Index cat = categories[static_cast<std::size_t>(i)];
    if (encoding.mode == EncodingMode::ordinal) {
      attrs(i, 0) = encoding.ordinal_value(cat);
    } else {
      attrs(i, cat) = 1.0;
    }
  }
  return attrs;
}

std::vector<Matrix> load_dynamic_attrs(const std::string& path,
                                       const CategoricalEncoding& encoding,
                                       Index nodes, Index expected_steps) {
  const auto rows = read_csv_cells(path);
  if (rows.size() < 2) {
    fail(ErrorCode::empty_file, path + ": no data rows after header");
  }
  const bool per_node = rows[1].size() == 3;

  // Pass 1: category index per (t, node).
  Index steps = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = path + ": row " + std::to_string(r);
    if (rows[r].size() != (per_node ? 3u : 2u)) {
      fail(ErrorCode::ragged_rows,
           where + (per_node ? ": expected timestamp,node_id,category"
                             : ": expected timestamp,category"));
    }
    steps = std::max(steps, parse_index(rows[r][0], where) + 1);
  }
  if (expected_steps > 0 && steps != expected_steps) {
    fail(ErrorCode::length_mismatch,
         path + ": " + std::to_string(steps) + " time steps, expected " +
             std::to_string(expected_steps) + " (speed series length)");
  }

  Matrix category(steps, nodes);
  category.setConstant(-1.0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = path + ": row " + std::to_string(r);
    const Index t = parse_index(rows[r][0], where);
    const Index cat = encoding.category_index(rows[r].back(), where);
    if (per_node) {
      const Index node = parse_index(rows[r][1], where);
      if (node >= nodes) {
        fail(ErrorCode::node_count_mismatch,
             where + ": node id " + std::to_string(node) + " out of range for " +
                 std::to_string(nodes) + " nodes");
      }
      category(t, node) = static_cast<double>(cat);
    } else {
      category.row(t).setConstant(static_cast<double>(cat));
    }
  }
  if ((category.array() < 0.0).any()) {
    fail(ErrorCode::length_mismatch,
         path + ": missing rows; every timestamp" +
             std::string(per_node ? " and node" : "") + " must be covered");
  }

  // Pass 2: encode into channels.
  const Index width = encoding.width();
  std::vector<Matrix> channels(static_cast<std::size_t>(width),
                               Matrix::Zero(steps, nodes));
  for (Index t = 0; t < steps; ++t) {
    for (Index i = 0; i < nodes; ++i) {
      const Index cat = static_cast<Index>(category(t, i));
      if (encoding.mode == EncodingMode::ordinal) {
        channels[0](t, i) = encoding.ordinal_value(cat);
      } else {
        channels[static_cast<std::size_t>(cat)](t, i) = 1.0;
      }
    }
  }
  return channels;
}

void write_static_attrs_csv(const std::string& path,
                            const std::vector<std::string>& node_categories) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write file: " + path);
  out << "node_id,category\n";
  for (std::size_t i = 0; i < node_categories.size(); ++i) {
    out << i << ',' << node_categories[i] << '\n';
  }
}

void write_dynamic_attrs_csv(const std::string& path,
                             const std::vector<std::string>& step_categories) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write file: " + path);
  out << "timestamp,category\n";
  for (std::size_t t = 0; t < step_categories.size(); ++t) {
    out << t << ',' << step_categories[t] << '\n';
  }
}

}  // namespace astgcn
