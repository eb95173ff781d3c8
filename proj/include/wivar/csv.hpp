#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "wivar/common.hpp"

namespace wivar {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> find_column(const std::string& name) const;
  std::size_t require_column(const std::string& name) const;  // DataError
};

// Plain comma-separated UTF-8 with a header row; no quoting or embedded
// separators (the formats this project defines never need them).
CsvTable read_csv(const std::filesystem::path& path);

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  void write_row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

double parse_double(const std::string& text, const std::string& context);
long parse_long(const std::string& text, const std::string& context);

}  // namespace wivar
