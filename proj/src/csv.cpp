#include "wivar/csv.hpp"

#include <charconv>

namespace wivar {

std::optional<std::size_t> CsvTable::find_column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvTable::require_column(const std::string& name) const {
  auto idx = find_column(name);
  if (!idx) throw DataError("missing required column '" + name + "'");
  return *idx;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
    fields.back().pop_back();
  }
  return fields;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("'" + path.string() + "' is empty (no header row)");
  }
  table.columns = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split_line(line));
  }
  return table;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path) {
  std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary);  // "\n" line endings on every platform
  if (!out_) throw DataError("cannot write '" + path.string() + "'");
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw DataError("write failed for '" + path_.string() + "'");
}

double parse_double(const std::string& text, const std::string& context) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("malformed number '" + text + "' in " + context);
  }
  return value;
}

long parse_long(const std::string& text, const std::string& context) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  long value = 0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("malformed integer '" + text + "' in " + context);
  }
  return value;
}

}  // namespace wivar
