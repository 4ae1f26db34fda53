#pragma once

#include <concepts>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace npf {

/// Shortest round-trip-safe text for a real: 17 significant digits.
std::string format_real(double x);

/// Comma-separated writer with a fixed header. Reals are written with 17
/// significant digits so a parse of the file reproduces the exact doubles.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);

  std::size_t columns() const noexcept { return columns_; }

  template <class... Cells>
  void row(const Cells&... cells) {
    std::string line;
    bool first = true;
    (append(line, first, cells), ...);
    finish(line, sizeof...(Cells));
  }

  void row_values(std::span<const double> cells);
  /// Leading integer key followed by reals.
  void row_keyed(std::size_t key, std::span<const double> cells);

 private:
  static void sep(std::string& line, bool& first) {
    if (!first) line.push_back(',');
    first = false;
  }
  static void append(std::string& line, bool& first, double v) {
    sep(line, first);
    line += format_real(v);
  }
  template <std::integral I>
  static void append(std::string& line, bool& first, I v) {
    sep(line, first);
    line += std::to_string(v);
  }
  static void append(std::string& line, bool& first, const std::string& v) {
    sep(line, first);
    line += v;
  }
  static void append(std::string& line, bool& first, const char* v) {
    append(line, first, std::string(v));
  }
  void finish(const std::string& line, std::size_t cells);

  std::ostream& os_;
  std::size_t columns_;
};

/// A parsed numeric CSV file.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
};

/// Parse a CSV whose first line is a header and whose cells are all numeric.
/// Throws std::runtime_error with the line number on malformed input.
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

}  // namespace npf
