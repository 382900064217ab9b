#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace foliate::cli {

/// Shortest text that reads back to the same double, at most 17 significant
/// digits, independent of the locale.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> columns;
};

/// Writes "# columns: a,b,..." then one comma-separated row per entry, LF
/// line endings. Throws std::runtime_error naming the path on I/O failure.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Reads a file produced by write_csv.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace foliate::cli
