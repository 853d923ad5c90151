#include "tao/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tao/errors.hpp"

namespace tao {

std::string format_double(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return columns.at(i);
  throw std::out_of_range("CSV has no column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header)
    if (h == name) return true;
  return false;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  if (table.columns.size() != table.header.size()) throw std::invalid_argument("CSV header/column count mismatch");
  const std::size_t rows = table.rows();
  for (const auto& c : table.columns)
    if (c.size() != rows) throw std::invalid_argument("ragged CSV columns");
  std::string text;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c) text += ',';
    text += table.header[c];
  }
  text += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) text += ',';
      text += format_double(table.columns[c][r]);
    }
    text += '\n';
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (table.header.empty()) {
      table.header = fields;
      table.columns.assign(fields.size(), {});
      continue;
    }
    if (fields.size() != table.header.size())
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(table.header.size()) + " fields");
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      const auto* end = fields[c].data() + fields[c].size();
      const auto [ptr, ec] = std::from_chars(fields[c].data(), end, v);
      if (ec != std::errc{} || ptr != end)
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": field '" + table.header[c] +
                          "' is not numeric");
      table.columns[c].push_back(v);
    }
  }
  if (table.header.empty()) throw ConfigError(path.string() + ": empty CSV");
  return table;
}

}  // namespace tao
