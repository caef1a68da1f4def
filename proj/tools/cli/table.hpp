#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace permorder::cli {

enum class Format { table, csv, json };

Format parse_format(std::string_view tag);

/// How a column renders. Exact rationals are "p/q" strings everywhere; the
/// human table additionally shows a 6-significant-digit decimal.
enum class ColumnKind { integer, big, rational, list, text, real, boolean };

struct Column {
  std::string name;
  ColumnKind kind;
};

/// Rows of JSON cells. One source of truth for all three output formats, so
/// CSV and JSON carry identical numeric content.
class Table {
 public:
  Table(std::string command, std::vector<Column> columns);

  void add_row(std::vector<nlohmann::json> cells);
  std::size_t size() const { return rows_.size(); }

  void render(std::ostream& out, Format format) const;

 private:
  std::string command_;
  std::vector<Column> columns_;
  std::vector<std::vector<nlohmann::json>> rows_;
};

}  // namespace permorder::cli
