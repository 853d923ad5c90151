#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tao {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Column-major numeric table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Throws std::out_of_range for an unknown column name.
  const std::vector<double>& column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

/// Writes header then rows, LF line endings. Throws std::runtime_error on I/O failure
/// and std::invalid_argument on ragged columns.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Reads a numeric CSV with a header row; accepts CRLF. Throws ConfigError with
/// the line number on malformed content.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace tao
