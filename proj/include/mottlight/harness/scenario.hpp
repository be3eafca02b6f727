#pragma once

// Scenario files: YAML documents describing one experiment. Every
// dimensioned value is a string with a unit (see units.hpp); parsed values
// are in base units. Defaults are the parameter sets of the bundled presets.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mottlight/core/physics.hpp"

namespace mottlight::harness {

enum class ExperimentKind { eit_scan, store, decay_scan, ramsey, deflect };

const char* to_string(ExperimentKind kind);

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, int line)
      : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line(line) {}
  int line;  // 1-based, 0 when unknown
};

struct CloudSection {
  std::array<double, 3> radii{8.6e-6, 13.1e-6, 13.1e-6};
  std::array<double, 3> lattice_wavelengths{765e-9, 844e-9, 844e-9};
  double filling = 1.0;
  /// Rescale the radii at fixed density to this atom number.
  std::optional<double> atom_number;
  std::optional<double> line_strength_factor;
  bool operator==(const CloudSection&) const = default;
};

struct ProbeBeamSection {
  double waist = 40e-6;
  double offset_y = 0.0;
  double offset_z = 0.0;
  bool operator==(const ProbeBeamSection&) const = default;
};

struct EitSection {
  double coupling_rabi = core::kTwoPi * 27e3;
  double probe_rabi = core::kTwoPi * 3.9e3;
  double pi_leak_fraction = 0.2;
  double ground_decoherence = core::kTwoPi * 10.0;  // gamma_21
  double probe_duration = 0.2;
  double scan_half_width = core::kTwoPi * 300.0;
  int scan_points = 61;
  int transverse_cells = 64;
  int propagation_slices = 32;
  std::optional<double> peak_optical_depth;
  bool operator==(const EitSection&) const = default;
};

struct StorageSection {
  double optical_depth = 6.3;
  double coupling_rabi = core::kTwoPi * 4.5e6;
  double probe_rabi = core::kTwoPi * 1.5e6;
  double probe_fwhm = 2.8e-6;
  double one_photon_detuning = 0.0;
  double storage_time = 3e-6;
  std::vector<double> storage_times;
  std::vector<double> optical_depth_sweep;
  /// Amplitude decay time of the spin coherence while dark.
  double spinwave_coherence_time = 0.436;
  int z_points = 128;
  double time_step = 0.01;  // units of 2 / Gamma
  double read_duration = 8e-6;
  std::string integrator = "rk4";  // rk4 | adiabatic
  /// Multiplicative Gaussian noise on decay-scan energies before fitting.
  double noise_fraction = 0.0;
  bool operator==(const StorageSection&) const = default;
};

struct RamseySection {
  double coherence_time = 0.436;  // amplitude decay time
  std::vector<double> dark_times;
  bool operator==(const RamseySection&) const = default;
};

struct DeflectionSection {
  double gradient_waist = 42e-6;
  double gradient_offset_y = 20e-6;
  double gradient_detuning = -core::kTwoPi * 20e9;
  double gradient_peak_intensity = 2.3e4;
  double center_shift = core::kTwoPi * 7.7e3;
  std::vector<double> interaction_times{0.0, 10e-6, 20e-6, 30e-6, 40e-6, 50e-6};
  double defocus = 1e-3;
  int grid_points = 512;
  double grid_spacing = 2e-6;
  double storage_time = 10e-3;
  std::string slope_convention = "spinwave-weighted";  // | cloud-center
  bool write_images = true;
  bool operator==(const DeflectionSection&) const = default;
};

struct ScenarioConfig {
  ExperimentKind experiment = ExperimentKind::eit_scan;
  std::string description;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  CloudSection cloud;
  ProbeBeamSection probe_beam;
  EitSection eit;
  StorageSection storage;
  RamseySection ramsey;
  DeflectionSection deflection;
  bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ParseError (with the offending line) for malformed YAML, unknown
/// keys, unit mismatches and out-of-range values.
ScenarioConfig parse_scenario(std::string_view text);

/// Full YAML rendering with every value in base units; parse_scenario of the
/// result compares equal to `config`.
std::string serialize_scenario(const ScenarioConfig& config);

}  // namespace mottlight::harness
