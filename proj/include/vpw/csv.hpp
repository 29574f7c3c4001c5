#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace vpw {

constexpr int kCsvSchemaVersion = 1;

// 17 significant digits, scientific.
std::string csv_num(double x);

// First line: '# vpw <schema> v<version> seed=<seed>', then the column header.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& schema, std::uint64_t seed,
            const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t ncol_;
};

struct CsvTable {
  std::string meta;  // the '#' line
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const;
  double num(std::size_t r, const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace vpw
