#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qmpemba {

/// Locale-independent rendering with 17
/// significant digits, "%.17g" semantics.
std::string format_double(double x);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string to_csv(const Table& t);

/// Array of row objects, one per line.
std::string to_json_rows(const Table& t);

/// Writes `<stem>.csv` or `<stem>.json`; returns the written path.
std::filesystem::path write_table(const std::filesystem::path& stem, const Table& t, bool as_json);

/// Header plus string cells; throws std::runtime_error on ragged rows.
struct CsvData {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::size_t column(const std::string& name) const;
};
CsvData parse_csv(const std::string& text);
CsvData read_csv(const std::filesystem::path& path);

/// Two-space indented dump with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Writes `text` through a temporary file and a rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace qmpemba
