#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace foliate::cli {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  if (table.names.size() != table.columns.size() || table.names.empty()) {
    throw std::runtime_error("csv table for " + path.string() + " has mismatched columns");
  }
  const Eigen::Index rows = table.columns.front().size();
  for (const auto& c : table.columns) {
    if (c.size() != rows) throw std::runtime_error("csv columns differ in length: " + path.string());
  }
  std::string text = "# columns: ";
  for (std::size_t k = 0; k < table.names.size(); ++k) {
    if (k) text += ',';
    text += table.names[k];
  }
  text += '\n';
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
      if (k) text += ',';
      text += format_double(table.columns[k][r]);
    }
    text += '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::vector<std::vector<double>> cols;
  const std::string prefix = "# columns: ";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind(prefix, 0) == 0) {
      std::stringstream ss(line.substr(prefix.size()));
      for (std::string name; std::getline(ss, name, ',');) table.names.push_back(name);
      cols.resize(table.names.size());
      continue;
    }
    if (line[0] == '#') continue;
    std::size_t k = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end && k < cols.size()) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      const auto res = std::from_chars(p, comma, v);
      if (res.ec != std::errc() || res.ptr != comma) {
        throw std::runtime_error("bad number in " + path.string() + ": " + line);
      }
      cols[k++].push_back(v);
      p = comma + 1;
    }
    if (k != cols.size()) throw std::runtime_error("short row in " + path.string());
  }
  for (auto& c : cols) table.columns.push_back(Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));
  return table;
}

}  // namespace foliate::cli
