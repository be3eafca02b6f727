#pragma once

// Quantities in scenario files are strings with an explicit unit. Parsed
// values are in base units: rad/s, s, m, W/m^2.
//
// Frequencies given in Hz (Hz, kHz, MHz, GHz) are read as ordinary
// frequencies and converted to angular frequency; a leading "2pi*", "2π×" or
// "2*pi*" is accepted there as notation and changes nothing, so "27 kHz" and
// "2pi*27 kHz" are the same value. With rad/s units (rad/s, krad/s, Mrad/s,
// Grad/s, 1/s, s^-1) the number is already angular and a 2pi prefix
// multiplies it: "2π×27 krad/s" equals "27 kHz".

#include <stdexcept>
#include <string>
#include <string_view>

namespace mottlight::harness {

enum class Dimension { angular_frequency, time, length, intensity, dimensionless };

class UnitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double parse_quantity(std::string_view text, Dimension dim);

/// Shortest text that parses back to exactly `value`, in the base unit.
std::string format_quantity(double value, Dimension dim);

const char* base_unit(Dimension dim);

}  // namespace mottlight::harness
