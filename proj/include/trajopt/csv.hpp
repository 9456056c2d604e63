#ifndef TRAJOPT_CSV_HPP
#define TRAJOPT_CSV_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "trajopt/error.hpp"

namespace trajopt::csv {

/// Comma-separated table with a header row and numeric cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_number(const std::string& cell, bool& ok) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  ok = ec == std::errc() && ptr == last;
  return v;
}

/// Reads a numeric CSV. Failures raise ingestion errors naming the file and line.
inline Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), ErrorCode::ingestion, path.string() + ": cannot open file");
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    detail::require(cells.size() == t.header.size(), ErrorCode::ingestion,
                     path.string() + ":" + std::to_string(lineno) + ": expected " +
                         std::to_string(t.header.size()) + " fields, found " + std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      bool ok = false;
      row[i] = parse_number(cells[i], ok);
      detail::require(ok, ErrorCode::ingestion,
                      path.string() + ":" + std::to_string(lineno) + ": cannot parse '" + cells[i] +
                          "' in column '" + t.header[i] + "'");
    }
    t.rows.push_back(std::move(row));
  }
  detail::require(!t.header.empty(), ErrorCode::ingestion, path.string() + ": empty file");
  return t;
}

/// Shortest round-trip decimal representation.
inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

inline void write(const std::filesystem::path& path, const Table& t) {
  std::ofstream out(path, std::ios::binary);
  detail::require(static_cast<bool>(out), ErrorCode::io, path.string() + ": cannot open for writing");
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  detail::require(static_cast<bool>(out), ErrorCode::io, path.string() + ": write failed");
}

}  // namespace trajopt::csv

#endif  // TRAJOPT_CSV_HPP
