#include "lnq/pipeline/table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lnq/error.hpp"

namespace lnq {

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "table" || name == "tsv") return ReportFormat::table;
  if (name == "json-lines" || name == "jsonl") return ReportFormat::json_lines;
  throw Error(ErrorCode::InvalidArgument, "unknown report format '" + std::string(name) + "'");
}

std::string_view report_extension(ReportFormat f) noexcept {
  return f == ReportFormat::table ? ".tsv" : ".jsonl";
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error(ErrorCode::LengthMismatch, "row width differs from header");
  rows.push_back(std::move(row));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else {
          return std::to_string(v);
        }
      },
      c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, c);
}

}  // namespace

void write_table(std::ostream& out, const Table& table, ReportFormat format) {
  if (format == ReportFormat::table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "\t" : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << cell_text(row[i]);
      out << '\n';
    }
    return;
  }
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
    out << obj.dump() << '\n';
  }
}

std::filesystem::path write_table(const std::filesystem::path& stem, const Table& table, ReportFormat format) {
  std::filesystem::path path = stem;
  path += std::string(report_extension(format));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  write_table(out, table, format);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
  return path;
}

std::vector<Record> read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  const auto ext = path.extension().string();
  std::vector<Record> out;
  std::string line;
  if (ext == ".jsonl") {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto obj = nlohmann::json::parse(line, nullptr, false);
      if (!obj.is_object()) throw Error(ErrorCode::CorruptFile, "bad JSON line in " + path.string());
      Record r;
      for (const auto& [k, v] : obj.items()) r[k] = v.is_string() ? v.get<std::string>() : v.dump();
      out.push_back(std::move(r));
    }
    return out;
  }
  if (ext != ".tsv") throw Error(ErrorCode::UnsupportedFormat, "reports must be .tsv or .jsonl: " + path.string());
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, '\t')) f.push_back(item);
    return f;
  };
  if (!std::getline(in, line)) return out;
  header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) throw Error(ErrorCode::CorruptFile, "ragged row in " + path.string());
    Record r;
    for (std::size_t i = 0; i < header.size(); ++i) r[header[i]] = fields[i];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lnq
