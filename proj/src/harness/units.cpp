#include "mottlight/harness/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

#include "mottlight/core/physics.hpp"

namespace mottlight::harness {

namespace {

struct UnitEntry {
  std::string_view symbol;
  double scale;
  bool cyclic;  // Hz family: already includes the 2 pi when converted
};

constexpr std::array kFrequencyUnits{
    UnitEntry{"Hz", 1.0, true},      UnitEntry{"kHz", 1e3, true},
    UnitEntry{"MHz", 1e6, true},     UnitEntry{"GHz", 1e9, true},
    UnitEntry{"rad/s", 1.0, false},  UnitEntry{"krad/s", 1e3, false},
    UnitEntry{"Mrad/s", 1e6, false}, UnitEntry{"Grad/s", 1e9, false},
    UnitEntry{"1/s", 1.0, false},    UnitEntry{"s^-1", 1.0, false},
};
constexpr std::array kTimeUnits{
    UnitEntry{"s", 1.0, false},   UnitEntry{"ms", 1e-3, false}, UnitEntry{"us", 1e-6, false},
    UnitEntry{"μs", 1e-6, false}, UnitEntry{"µs", 1e-6, false}, UnitEntry{"ns", 1e-9, false},
};
constexpr std::array kLengthUnits{
    UnitEntry{"m", 1.0, false},   UnitEntry{"mm", 1e-3, false}, UnitEntry{"um", 1e-6, false},
    UnitEntry{"μm", 1e-6, false}, UnitEntry{"µm", 1e-6, false}, UnitEntry{"nm", 1e-9, false},
};
constexpr std::array kIntensityUnits{
    UnitEntry{"W/m^2", 1.0, false},
    UnitEntry{"W/cm^2", 1e4, false},
    UnitEntry{"mW/cm^2", 10.0, false},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool consume(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  s.remove_prefix(prefix.size());
  s = trim(s);
  return true;
}

// Strips a "2pi" style prefix and its multiplication sign, if present.
bool consume_two_pi(std::string_view& s) {
  std::string_view t = s;
  if (!consume(t, "2")) return false;
  consume(t, "*");
  if (!consume(t, "pi") && !consume(t, "π")) return false;
  if (!consume(t, "*") && !consume(t, "×") && !consume(t, "x")) return false;
  s = t;
  return true;
}

template <std::size_t N>
const UnitEntry* find_unit(const std::array<UnitEntry, N>& table, std::string_view symbol) {
  for (const auto& u : table) {
    if (u.symbol == symbol) return &u;
  }
  return nullptr;
}

std::string expected_units(Dimension dim) {
  switch (dim) {
    case Dimension::angular_frequency: return "Hz, kHz, MHz, GHz, rad/s, krad/s, Mrad/s, Grad/s, 1/s";
    case Dimension::time: return "s, ms, us, ns";
    case Dimension::length: return "m, mm, um, nm";
    case Dimension::intensity: return "W/m^2, W/cm^2, mW/cm^2";
    case Dimension::dimensionless: return "no unit";
  }
  return {};
}

}  // namespace

const char* base_unit(Dimension dim) {
  switch (dim) {
    case Dimension::angular_frequency: return "rad/s";
    case Dimension::time: return "s";
    case Dimension::length: return "m";
    case Dimension::intensity: return "W/m^2";
    case Dimension::dimensionless: return "";
  }
  return "";
}

double parse_quantity(std::string_view text, Dimension dim) {
  std::string_view s = trim(text);
  if (s.empty()) throw UnitError("empty quantity");
  const bool two_pi = consume_two_pi(s);

  double number = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), number);
  if (ec != std::errc() || end == s.data()) {
    throw UnitError("cannot read a number in '" + std::string(text) + "'");
  }
  if (!std::isfinite(number)) throw UnitError("non-finite value in '" + std::string(text) + "'");
  const std::string_view unit = trim(std::string_view(end, s.data() + s.size() - end));

  if (dim == Dimension::dimensionless) {
    if (!unit.empty()) {
      throw UnitError("'" + std::string(text) + "' should be a plain number, found unit '" +
                      std::string(unit) + "'");
    }
    return two_pi ? core::kTwoPi * number : number;
  }
  if (unit.empty()) {
    throw UnitError("'" + std::string(text) + "' has no unit; expected one of " +
                    expected_units(dim));
  }

  const UnitEntry* entry = nullptr;
  switch (dim) {
    case Dimension::angular_frequency: entry = find_unit(kFrequencyUnits, unit); break;
    case Dimension::time: entry = find_unit(kTimeUnits, unit); break;
    case Dimension::length: entry = find_unit(kLengthUnits, unit); break;
    case Dimension::intensity: entry = find_unit(kIntensityUnits, unit); break;
    case Dimension::dimensionless: break;
  }
  if (!entry) {
    throw UnitError("unit '" + std::string(unit) + "' in '" + std::string(text) +
                    "' does not fit; expected one of " + expected_units(dim));
  }
  if (two_pi && dim != Dimension::angular_frequency) {
    throw UnitError("a 2pi factor only applies to frequencies: '" + std::string(text) + "'");
  }
  double value = number * entry->scale;
  if (entry->cyclic || two_pi) value *= core::kTwoPi;
  return value;
}

std::string format_quantity(double value, Dimension dim) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  std::string out(buf);
  const std::string unit = base_unit(dim);
  if (!unit.empty()) out += " " + unit;
  return out;
}

}  // namespace mottlight::harness
