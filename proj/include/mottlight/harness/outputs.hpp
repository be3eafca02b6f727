#pragma once

// Run outputs: comma-separated tables for series, one JSON summary per run.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mottlight::harness {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // all the same length
};

/// Values are written with 12 significant digits; identical tables give
/// identical bytes.
void write_table(const std::filesystem::path& path, const Table& table);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace mottlight::harness
