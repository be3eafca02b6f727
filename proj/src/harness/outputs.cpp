#include "mottlight/harness/outputs.hpp"

#include <cstdio>
#include <fstream>

namespace mottlight::harness {

void write_table(const std::filesystem::path& path, const Table& table) {
  if (table.header.size() != table.columns.size()) {
    throw std::invalid_argument("write_table: header and column counts differ");
  }
  const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
  for (const auto& c : table.columns) {
    if (c.size() != rows) throw std::invalid_argument("write_table: ragged columns");
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw OutputError("cannot open " + path.string() + " for writing");
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    f << (j ? "," : "") << table.header[j];
  }
  f << '\n';
  char buf[32];
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", table.columns[j][i]);
      f << (j ? "," : "") << buf;
    }
    f << '\n';
  }
  if (!f) throw OutputError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw OutputError("cannot open " + path.string() + " for writing");
  f << doc.dump(2) << '\n';
  if (!f) throw OutputError("write failed: " + path.string());
}

}  // namespace mottlight::harness
