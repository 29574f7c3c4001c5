#include "vpw/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "vpw/errors.hpp"

namespace vpw {

std::string csv_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool inq = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (inq) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        inq = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      inq = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::string& path, const std::string& schema, std::uint64_t seed,
                     const std::vector<std::string>& columns)
    : out_(path), ncol_(columns.size()) {
  if (!out_) throw FormatError("cannot write " + path);
  out_ << "# vpw " << schema << " v" << kCsvSchemaVersion << " seed=" << seed << "\r\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << quote(columns[i]);
  out_ << "\r\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncol_) throw FormatError("row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << csv_num(values[i]);
  out_ << "\r\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != ncol_) throw FormatError("row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << quote(cells[i]);
  out_ << "\r\n";
}

std::size_t CsvTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw FormatError("missing column " + name);
}

double CsvTable::num(std::size_t r, const std::string& name) const {
  return std::strtod(rows.at(r).at(col(name)).c_str(), nullptr);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path);
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.meta = line;
      continue;
    }
    if (!header) {
      t.columns = split(line);
      header = true;
    } else {
      t.rows.push_back(split(line));
    }
  }
  return t;
}

}  // namespace vpw
