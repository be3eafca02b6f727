#include "mottlight/harness/presets.hpp"

#include <filesystem>
#include <fstream>
#include <ios>
#include <sstream>

#include "presets_data.hpp"

namespace mottlight::harness {

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : detail::embedded_presets()) out.emplace_back(name);
  return out;
}

std::optional<std::string> preset_text(std::string_view name) {
  for (const auto& [n, text] : detail::embedded_presets()) {
    if (n == name) return std::string(text);
  }
  return std::nullopt;
}

ScenarioConfig load_scenario(const std::string& file_or_preset) {
  const std::filesystem::path path(file_or_preset);
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) {
    std::ifstream f(path);
    if (!f) throw std::ios_base::failure("cannot read " + file_or_preset);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str());
  }
  if (auto text = preset_text(file_or_preset)) return parse_scenario(*text);
  throw std::ios_base::failure("no scenario file or preset named '" + file_or_preset + "'");
}

}  // namespace mottlight::harness
