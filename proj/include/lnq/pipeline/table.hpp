#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace lnq {

/// Report serialization: tab-separated text with a header row, or one JSON
/// object per line.
enum class ReportFormat { table, json_lines };

[[nodiscard]] ReportFormat report_format_from_string(std::string_view name);
/// ".tsv" or ".jsonl".
[[nodiscard]] std::string_view report_extension(ReportFormat f) noexcept;

using Cell = std::variant<std::string, std::int64_t, double, bool>;

/// A small column-oriented report. Doubles are written in shortest
/// round-trip form, so reading a report back yields the same values.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

void write_table(std::ostream& out, const Table& table, ReportFormat format);
/// Writes `<stem>.tsv` or `<stem>.jsonl` and returns the path written.
std::filesystem::path write_table(const std::filesystem::path& stem, const Table& table, ReportFormat format);

/// Row of a report read back from disk, values in their text form.
using Record = std::map<std::string, std::string>;

/// Reads a `.tsv` or `.jsonl` report.
[[nodiscard]] std::vector<Record> read_table(const std::filesystem::path& path);

/// Shortest round-trip text for a double.
[[nodiscard]] std::string format_double(double v);

}  // namespace lnq
