#pragma once

// Minimal comma-separated reader with header lookup. Not installed.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bayesid/errors.hpp"

namespace bayesid::detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Shortest text that parses back to the same double.
inline std::string format_real(double x) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

class CsvTable {
 public:
  static CsvTable read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    CsvTable t;
    t.source_ = path.string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty() || trim(line)[0] == '#') continue;
      if (t.header_.empty()) {
        t.header_ = split_csv_line(line);
        for (std::size_t i = 0; i < t.header_.size(); ++i) t.index_[t.header_[i]] = i;
        continue;
      }
      auto cells = split_csv_line(line);
      if (cells.size() != t.header_.size())
        throw ParseError(t.source_ + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(t.header_.size()) + " fields, got " +
                             std::to_string(cells.size()),
                         line_no, cells.size() < t.header_.size() ? t.header_[cells.size()] : "");
      t.rows_.push_back(std::move(cells));
      t.line_numbers_.push_back(line_no);
    }
    if (t.header_.empty()) throw ParseError(t.source_ + ": missing header line", 1, "");
    return t;
  }

  void require(const std::string& column) const {
    if (!index_.count(column))
      throw ParseError(source_ + ": missing column \"" + column + "\"", 1, column);
  }

  std::size_t rows() const { return rows_.size(); }
  std::size_t line(std::size_t row) const { return line_numbers_[row]; }

  double real(std::size_t row, const std::string& column) const {
    require(column);
    const std::string& cell = rows_[row][index_.at(column)];
    double value = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    const auto res = std::from_chars(first, last, value);
    if (cell.empty() || res.ec != std::errc() || res.ptr != last)
      throw ParseError(source_ + ":" + std::to_string(line(row)) + ": column \"" + column +
                           "\": cannot parse \"" + cell + "\" as a number",
                       line(row), column);
    return value;
  }

  int integer(std::size_t row, const std::string& column) const {
    const double v = real(row, column);
    if (v != static_cast<int>(v))
      throw ParseError(source_ + ":" + std::to_string(line(row)) + ": column \"" + column +
                           "\": expected an integer",
                       line(row), column);
    return static_cast<int>(v);
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> line_numbers_;
};

}  // namespace bayesid::detail
