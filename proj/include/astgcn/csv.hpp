#pragma once

#include <string>
#include <vector>

#include "astgcn/types.hpp"

namespace astgcn {

/// Formats a double with the shortest representation that parses back to the
/// identical value (std::to_chars).
std::string format_double(double value);

/// Reads a rectangular numeric CSV (no header) into a matrix.
/// Errors: io_error, empty_file, ragged_rows, non_numeric_cell
/// (row/column indices in messages are 0-based).
Matrix read_numeric_csv(const std::string& path);

/// Writes a matrix as CSV, one row per line, shortest round-trip formatting.
void write_numeric_csv(const std::string& path, const Matrix& values);

/// Reads raw CSV cells (no quoting support; fields are trimmed).
std::vector<std::vector<std::string>> read_csv_cells(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace astgcn
