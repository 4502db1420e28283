#include "astgcn/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "astgcn/error.hpp"

namespace astgcn {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  cells.push_back(trim(current));
  return cells;
}

std::vector<std::vector<std::string>> read_csv_cells(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) fail(ErrorCode::empty_file, "empty file: " + path);
  return rows;
}

Matrix read_numeric_csv(const std::string& path) {
  const auto rows = read_csv_cells(path);
  const std::size_t cols = rows.front().size();
  Matrix values(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      fail(ErrorCode::ragged_rows,
           path + ": row " + std::to_string(r) + " has " +
               std::to_string(rows[r].size()) + " cells, expected " +
               std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double value = 0.0;
      if (!parse_double(rows[r][c], value)) {
        fail(ErrorCode::non_numeric_cell,
             path + ": non-numeric cell '" + rows[r][c] + "' at row " +
                 std::to_string(r) + ", column " + std::to_string(c));
      }
      values(static_cast<Index>(r), static_cast<Index>(c)) = value;
    }
  }
  return values;
}

void write_numeric_csv(const std::string& path, const Matrix& values) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write file: " + path);
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      out << format_double(values(r, c));
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::io_error, "write failed: " + path);
}

}  // namespace astgcn
