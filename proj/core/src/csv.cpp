#include "npf/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace npf {

std::string format_real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf, end);
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header)
    : os_(os), columns_(header.size()) {
  std::string line;
  bool first = true;
  for (const auto& h : header) append(line, first, h);
  os_ << line << '\n';
}

void CsvWriter::row_values(std::span<const double> cells) {
  std::string line;
  bool first = true;
  for (double v : cells) append(line, first, v);
  finish(line, cells.size());
}

void CsvWriter::row_keyed(std::size_t key, std::span<const double> cells) {
  std::string line;
  bool first = true;
  append(line, first, key);
  for (double v : cells) append(line, first, v);
  finish(line, cells.size() + 1);
}

void CsvWriter::finish(const std::string& line, std::size_t cells) {
  if (cells != columns_) {
    throw std::logic_error("CsvWriter: row has " + std::to_string(cells) + " cells, header has " +
                           std::to_string(columns_));
  }
  os_ << line << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  throw std::out_of_range("CSV column not found: " + name);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_csv: empty input");
  table.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw std::runtime_error("read_csv: line " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(table.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc{} || ptr != c.data() + c.size()) {
        throw std::runtime_error("read_csv: line " + std::to_string(lineno) +
                                 ": not a number: '" + c + "'");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

}  // namespace npf
