#pragma once

// Scenario presets compiled into the library, and loading of scenarios by
// file path or preset name.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mottlight/harness/scenario.hpp"

namespace mottlight::harness {

std::vector<std::string> preset_names();
std::optional<std::string> preset_text(std::string_view name);

/// An existing file wins over a preset of the same name. Throws ParseError
/// for bad content and std::ios_base::failure when neither exists.
ScenarioConfig load_scenario(const std::string& file_or_preset);

}  // namespace mottlight::harness
