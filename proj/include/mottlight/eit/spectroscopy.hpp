#pragma once

// Rate-equation model of probe-induced population transfer |1> -> F=2 in an
// optically thick cloud, as a function of the two-photon detuning.
//
// The cloud is cut into transverse columns along the probe axis and each
// column into propagation slices. Within a time step the probe intensity is
// attenuated slice by slice with the local optical depth, which is scaled by
// the surviving |1> population. Atoms leave |1> at the local absorption rate
// times the branching ratio into F=2. A delta-independent pi-polarized leak
// channel pumps the same population in parallel.

#include <optional>
#include <stdexcept>
#include <vector>

#include "mottlight/cloud/cloud.hpp"
#include "mottlight/core/angular_momentum.hpp"
#include "mottlight/core/physics.hpp"

namespace mottlight::eit {

struct SpectroscopyConfig {
  /// omega_c, omega_p, gamma_31, gamma_21 are used; delta is set per point.
  core::LambdaSystem sys;
  cloud::AtomCloud cloud;
  /// Transverse probe profile. omega_p is the Rabi frequency at its peak.
  cloud::BeamProfile probe;
  double probe_duration = 0.2;
  int transverse_cells = 64;  // per axis
  int propagation_slices = 32;
  /// Omega_p^pi / Omega_p.
  double pi_leak_fraction = 0.2;
  /// Overrides the optical depth derived from the cloud geometry.
  std::optional<double> peak_optical_depth;
  double branching_to_f2 = core::d1_branching_to_f2();
  double pi_leak_branching_to_f2 = core::d1_branching_to_f2();
  /// Cross-section of the leak transition relative to the probe transition.
  double pi_leak_strength_ratio =
      core::d1_pi_leak_line_strength() / core::d1_probe_line_strength();
  /// The coupling laser stays resonant while the probe is scanned.
  bool one_photon_tracks_two_photon = true;
  double relative_tolerance = 1e-4;
  double absolute_tolerance = 1e-7;
  int max_step_halvings = 40;

  void validate() const;
  double optical_depth() const;
};

struct TransferPoint {
  double delta = 0.0;
  double fraction = 0.0;  // N2 / N
  bool out_of_regime = false;
  int accepted_steps = 0;
  int rejected_steps = 0;
  double max_population_drift = 0.0;  // max |n1 + n2 - 1| over cells and steps
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TransferPoint simulate_transfer(const SpectroscopyConfig& config, double delta);

struct LineshapeScan {
  std::vector<double> detunings;
  std::vector<double> transfer_fractions;
};

/// Evaluates simulate_transfer at every detuning, preserving order. Points
/// are independent and may be spread over `threads` workers; the result does
/// not depend on the thread count.
LineshapeScan scan_lineshape(const SpectroscopyConfig& config,
                             const std::vector<double>& detunings, int threads = 1);

enum class Feature { window, line };

class NoFeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full width at half depth of the transparency dip (window), or full width at
/// half height of the absorption envelope (line), by linear interpolation
/// between samples. Detunings must be increasing.
double extract_fwhm(const LineshapeScan& scan, Feature feature);

/// Detuning of the transparency-dip minimum and its depth below the highest
/// sample of the scan.
struct WindowSummary {
  double center = 0.0;
  double depth = 0.0;
  double floor = 0.0;
  double shoulder = 0.0;
};
WindowSummary summarize_window(const LineshapeScan& scan);

}  // namespace mottlight::eit
