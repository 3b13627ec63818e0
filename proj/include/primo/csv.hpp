#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "primo/linalg.hpp"

namespace primo {

/// Shortest round-trip-safe decimal (17 significant digits).
std::string format_double(double value);

/// Parse a full cell as a double; returns false on any trailing garbage.
bool parse_double(std::string_view cell, double& out);

std::vector<std::string_view> split_line(std::string_view line, char delimiter);

/// Rectangular numeric text file (CSV/TSV). A non-numeric first row is taken
/// as a header and skipped. Throws ParseError for a non-numeric cell (with its
/// 1-based file row and column) and ShapeError for ragged or empty input.
Matrix read_numeric_matrix(const std::filesystem::path& path, char delimiter = ',');

/// Writes one row per line, 17 significant digits, LF endings.
void write_numeric_matrix(const Matrix& m, const std::filesystem::path& path, char delimiter = ',');

}  // namespace primo
