#include "cli/table.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "permorder/types.hpp"

namespace permorder::cli {

using nlohmann::json;

namespace {

std::string plain(const json& cell, const char* separator = ";") {
  if (cell.is_null()) return "";
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < cell.size(); ++i) {
      if (i > 0) out += separator;
      out += plain(cell[i], separator);
    }
    return out;
  }
  return cell.dump();
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string human(const json& cell, ColumnKind kind) {
  if (cell.is_null()) return "-";
  std::string text = plain(cell, ", ");
  if (kind == ColumnKind::rational && cell.is_string()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", to_double(parse_rational(text)));
    text += " (" + std::string(buf) + ")";
  }
  if (kind == ColumnKind::list) text = "[" + text + "]";
  return text;
}

}  // namespace

Format parse_format(std::string_view tag) {
  if (tag == "table") return Format::table;
  if (tag == "csv") return Format::csv;
  if (tag == "json") return Format::json;
  throw std::invalid_argument("unknown format '" + std::string(tag) + "'");
}

Table::Table(std::string command, std::vector<Column> columns)
    : command_(std::move(command)), columns_(std::move(columns)) {}

void Table::add_row(std::vector<json> cells) {
  if (cells.size() != columns_.size()) throw std::logic_error("row width does not match columns");
  rows_.push_back(std::move(cells));
}

void Table::render(std::ostream& out, Format format) const {
  switch (format) {
    case Format::json: {
      nlohmann::ordered_json doc;
      doc["command"] = command_;
      doc["rows"] = nlohmann::ordered_json::array();
      for (const auto& row : rows_) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < columns_.size(); ++c) obj[columns_[c].name] = row[c];
        doc["rows"].push_back(std::move(obj));
      }
      out << doc.dump(2) << '\n';
      return;
    }
    case Format::csv: {
      for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << csv_escape(columns_[c].name);
      out << '\n';
      for (const auto& row : rows_) {
        for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << csv_escape(plain(row[c]));
        out << '\n';
      }
      return;
    }
    case Format::table: {
      std::vector<std::vector<std::string>> cells;
      std::vector<std::size_t> width(columns_.size());
      for (std::size_t c = 0; c < columns_.size(); ++c) width[c] = columns_[c].name.size();
      for (const auto& row : rows_) {
        auto& line = cells.emplace_back();
        for (std::size_t c = 0; c < columns_.size(); ++c) {
          line.push_back(human(row[c], columns_[c].kind));
          width[c] = std::max(width[c], line.back().size());
        }
      }
      auto emit = [&](const std::vector<std::string>& line) {
        for (std::size_t c = 0; c < line.size(); ++c) {
          out << (c ? "  " : "") << line[c];
          if (c + 1 < line.size()) out << std::string(width[c] - line[c].size(), ' ');
        }
        out << '\n';
      };
      std::vector<std::string> header;
      for (const auto& col : columns_) header.push_back(col.name);
      emit(header);
      for (const auto& line : cells) emit(line);
      return;
    }
  }
}

}  // namespace permorder::cli
