#include "primo/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "primo/errors.hpp"

namespace primo {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return res.ec == std::errc() && res.ptr == cell.data() + cell.size();
}

std::vector<std::string_view> split_line(std::string_view line, char delimiter) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

Matrix read_numeric_matrix(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t file_row = 0;
  std::string line;
  std::vector<double> parsed;
  while (std::getline(in, line)) {
    ++file_row;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto cells = split_line(view, delimiter);

    parsed.clear();
    std::size_t bad_column = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        bad_column = c + 1;
        break;
      }
      parsed.push_back(v);
    }
    if (bad_column != 0) {
      if (rows == 0 && cols == 0) {
        cols = cells.size();  // header row
        continue;
      }
      throw ParseError("non-numeric cell '" + std::string(trim(cells[bad_column - 1])) + "'",
                       file_row, bad_column);
    }
    if (cols == 0) cols = parsed.size();
    if (parsed.size() != cols) {
      throw ShapeError("row " + std::to_string(file_row) + " has " + std::to_string(parsed.size()) +
                       " cells, expected " + std::to_string(cols));
    }
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  if (rows == 0) throw ShapeError("no numeric rows in " + path.string());

  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = values[i * cols + j];
    }
  }
  return m;
}

void write_numeric_matrix(const Matrix& m, const std::filesystem::path& path, char delimiter) {
  std::ostringstream out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << delimiter;
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << out.str();
  if (!file) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace primo
