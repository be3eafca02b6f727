#pragma once

// Dispatches a scenario to the owning module and collects a RunReport.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "mottlight/harness/scenario.hpp"

namespace mottlight::harness {

struct RunOptions {
  /// Where outputs go; falls back to the scenario's output_dir. Nothing is
  /// written when both are empty.
  std::filesystem::path out_dir;
  int threads = 1;
  /// Overrides the scenario seed.
  std::optional<std::uint64_t> seed;
};

enum class ErrorCategory { config, numeric, io };

class RunError : public std::runtime_error {
 public:
  RunError(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category(category) {}
  ErrorCategory category;
};

struct RunReport {
  /// Scenario echo, derived quantities, results, comparison references and
  /// provenance. Only provenance.wall_time_s varies between identical runs.
  nlohmann::json summary;
  std::vector<std::filesystem::path> files;
};

/// Module errors are rethrown as RunError with the experiment named.
RunReport run(const ScenarioConfig& config, const RunOptions& options = {});

}  // namespace mottlight::harness
