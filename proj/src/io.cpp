#include "qmpemba/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmpemba {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (x == 0.0) return std::signbit(x) ? "-0" : "0";
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string json_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return nlohmann::json(*s).dump();
  if (const auto* d = std::get_if<double>(&c); d && !std::isfinite(*d)) return "null";
  return cell_text(c);
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += cell_text(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json_rows(const Table& t) {
  std::string out = "[\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += "  {";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out += ", ";
      out += nlohmann::json(t.columns[i]).dump();
      out += ": ";
      out += json_cell(t.rows[r][i]);
    }
    out += r + 1 < t.rows.size() ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

fs::path write_table(const fs::path& stem, const Table& t, bool as_json) {
  fs::path path = stem;
  path += as_json ? ".json" : ".csv";
  write_text_atomic(path, as_json ? to_json_rows(t) : to_csv(t));
  return path;
}

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::runtime_error("csv: no column '" + name + "'");
}

CsvData parse_csv(const std::string& text) {
  CsvData out;
  std::stringstream ss(text);
  std::string line;
  bool header = true;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (header) {
      out.columns = std::move(cells);
      header = false;
      continue;
    }
    if (cells.size() != out.columns.size())
      throw std::runtime_error("csv: row " + std::to_string(out.rows.size() + 1) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(out.columns.size()));
    out.rows.push_back(std::move(cells));
  }
  return out;
}

CsvData read_csv(const fs::path& path) { return parse_csv(read_text(path)); }

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(read_text(path)); }

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qmpemba
