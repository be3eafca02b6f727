#pragma once

#include <string_view>
#include <utility>
#include <vector>

namespace mottlight::harness::detail {

// Generated from scenarios/*.scenario at build time.
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_presets();

}  // namespace mottlight::harness::detail
