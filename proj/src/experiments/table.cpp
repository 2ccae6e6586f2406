#include "catlab/error.hpp"
#include "catlab/experiments.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cstdlib>
#include <limits>
#include <fstream>
#include <sstream>

namespace catlab::experiments {

namespace {

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return fmt::format("{:.17g}", *d);
  return csv_escape(std::get<std::string>(c));
}

Cell parse_cell(const std::string& s) {
  std::int64_t i = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty()) {
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec == std::errc() && p == last) return i;
    // from_chars for double is unavailable in GCC 11; strtod on a copy.
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (end == s.c_str() + s.size()) return d;
  }
  return s;
}

}  // namespace

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (ch == '\r' || ch == '\n') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (field_started || !field.empty() || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      field_started = false;
    } else {
      field += ch;
      field_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::InvalidArgument, "unterminated quoted CSV field");
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

ResultTable::ResultTable(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("table {}: row of {} cells for {} columns", name_, row.size(), columns_.size()));
  }
  rows_.push_back(std::move(row));
}

std::size_t ResultTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  throw Error(ErrorCode::InvalidArgument, fmt::format("table {} has no column '{}'", name_, name));
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + csv_escape(columns_[i]);
  out += "\r\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += "\r\n";
  }
  return out;
}

void ResultTable::write_csv(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, fmt::format("cannot write {}", file.string()));
  out << to_csv();
}

ResultTable ResultTable::read_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingArtifacts, fmt::format("cannot read {}", file.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  const auto records = parse_csv(buf.str());
  if (records.empty()) throw Error(ErrorCode::MissingArtifacts, fmt::format("{} is empty", file.string()));
  ResultTable t(file.stem().string(), records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    std::vector<Cell> row;
    for (const auto& f : records[r]) row.push_back(parse_cell(f));
    t.add_row(std::move(row));
  }
  return t;
}

double ResultTable::number(std::size_t row, const std::string& column_name) const {
  const Cell& c = rows_.at(row).at(column(column_name));
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  const std::string& s = std::get<std::string>(c);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw Error(ErrorCode::InvalidArgument, fmt::format("table {}: '{}' in column {} is not numeric", name_, s, column_name));
}

std::string ResultTable::text(std::size_t row, const std::string& column_name) const {
  const Cell& c = rows_.at(row).at(column(column_name));
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return format_cell(c);
}

}  // namespace catlab::experiments
