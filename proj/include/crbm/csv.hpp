#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace crbm {

constexpr int kCsvSchemaVersion = 1;

using CsvCell = std::variant<double, long long, std::string>;

// First line "# schema=<name> version=1", second "# generated=<UTC time>",
// then the column header and the rows. Reals are written with %.10e.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& schema, std::vector<std::string> columns,
            bool timestamp = true);

  void row(const std::vector<CsvCell>& cells);
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::ofstream out_;
  std::vector<std::string> columns_;
};

std::string csv_escape(const std::string& field);
std::string csv_format(const CsvCell& cell);

// Rows of a CSV file written by CsvWriter, without comment lines.
struct CsvTable {
  std::string schema;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

// Reads a file, dropping the "# generated=" line.
std::string read_without_timestamp(const std::string& path);

}  // namespace crbm
