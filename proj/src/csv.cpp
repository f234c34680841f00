#include "crbm/csv.hpp"

#include "crbm/errors.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

namespace crbm {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_format(const CsvCell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10e", *d);
    return buf;
  }
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return csv_escape(std::get<std::string>(cell));
}

CsvWriter::CsvWriter(const std::string& path, const std::string& schema, std::vector<std::string> columns,
                     bool timestamp)
    : out_(path, std::ios::trunc), columns_(std::move(columns)) {
  if (!out_) throw FormatError("csv: cannot open '" + path + "'");
  out_ << "# schema=" << schema << " version=" << kCsvSchemaVersion << '\n';
  if (timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out_ << "# generated=" << buf << '\n';
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << csv_escape(columns_[i]);
  out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != columns_.size()) throw InvalidArgument("csv: row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << csv_format(cells[i]);
  out_ << '\n';
  out_.flush();
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("csv: cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# schema=", 0) == 0) {
      const auto sp = line.find(' ', 9);
      t.schema = line.substr(9, sp == std::string::npos ? std::string::npos : sp - 9);
      continue;
    }
    if (!line.empty() && line[0] == '#') continue;
    if (!header) {
      t.columns = split_record(line);
      header = true;
    } else {
      t.rows.push_back(split_record(line));
    }
  }
  return t;
}

std::string read_without_timestamp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("csv: cannot open '" + path + "'");
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# generated=", 0) == 0) continue;
    out << line << '\n';
  }
  return out.str();
}

}  // namespace crbm
