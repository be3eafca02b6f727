#pragma once

// One-dimensional Maxwell-Bloch propagation of a weak probe through a
// Lambda medium: slow light, storage in the spin coherence and retrieval.
//
// Internally time is measured in units of 1/gamma_ref (gamma_ref = Gamma/2
// by default) and the medium occupies z in [0, 1]. With d = od / 2, where od
// is the resonant intensity optical depth,
//   dE/dz = i sqrt(d) P
//   dP/dt = -(g - i Delta) P + i sqrt(d) E + i (Omega_c / 2) S
//   dS/dt = -(gamma_s - i delta) S + i (Omega_c / 2) P
// with g = gamma_31 / gamma_ref. The detuning signs match
// core::susceptibility_lineshape, so a steady field obeys
// dE/dz = i d (gamma_ref / gamma_31) L E.
//
// P and S live at cell centres, E at cell faces; the discrete scheme conserves
// |E_in|^2 - |E_out|^2 = d/dt sum(|P|^2 + |S|^2) dz exactly in the absence of
// decay, so conservation errors come from the time integrator only.

#include <stdexcept>
#include <vector>

#include "mottlight/core/physics.hpp"
#include "mottlight/storage/waveforms.hpp"

namespace mottlight::storage {

enum class Integrator {
  rk4,        // explicit RK4 on (P, S)
  adiabatic,  // P eliminated; RK4 on S only. Requires gamma_31 > 0.
};

struct FieldGrid {
  int z_points = 128;
  double dt = 0.01;  // units of 1/rate_unit
  Integrator integrator = Integrator::rk4;
  /// Time after the last control breakpoint during which output is recorded.
  double read_duration = 8e-6;
  /// Spacing of the recorded output trace, units of 1/rate_unit.
  double trace_interval = 0.1;
  double rate_unit = core::rb87_d1().natural_linewidth() / 2.0;

  void validate() const;
  double dz() const { return 1.0 / z_points; }
};

class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TracePoint {
  double time;    // s
  double input;   // |E(0,t)|^2 relative to the probe peak
  double output;  // |E(1,t)|^2
};

/// Energies are time-integrated |E|^2 relative to the probe peak, in units of
/// 1/rate_unit.
struct StorageResult {
  double input_energy = 0.0;
  double leaked_energy = 0.0;     // exits before the control is switched back on
  double retrieved_energy = 0.0;  // exits afterwards
  double stored_excitation = 0.0; // sum(|P|^2 + |S|^2) dz at control switch-off
  std::vector<double> z;          // cell centres, [0, 1]
  std::vector<core::Complex> stored_spinwave;
  double efficiency_internal = 0.0;
  double efficiency_total = 0.0;
  std::vector<TracePoint> output_trace;
  /// |W_in - W_out - excitation| / W_in at the end of the run.
  double excitation_drift = 0.0;
  double final_excitation = 0.0;
  double stability_limit = 0.0;  // largest allowed dt for the integrator
  long steps = 0;
};

/// Largest time step (units of 1/rate_unit) accepted for the given setup.
double stability_limit(const FieldGrid& grid, const core::LambdaSystem& sys, double od,
                       double max_control);

/// Runs the probe `probe_in` through a medium of intensity optical depth `od`
/// driven by `control`. The spin coherence decays at sys.gamma_21.
/// Throws std::invalid_argument when dt exceeds the stability limit and
/// InstabilityError when the stored plus emitted energy outgrows the input.
StorageResult propagate(const FieldGrid& grid, const ControlWaveform& control,
                        const ProbeWaveform& probe_in, const core::LambdaSystem& sys, double od);

/// Write with sys.omega_c until the probe truncation (its peak if unset),
/// keep the control off for `storage_time`, then read. The spin coherence
/// decays at `gamma_s` (amplitude rate, 1/s) while dark.
StorageResult store_and_retrieve(const FieldGrid& grid, const core::LambdaSystem& sys, double od,
                                 const ProbeWaveform& probe, double storage_time, double gamma_s);

double efficiency(const StorageResult& result, bool include_geometric, double overlap);

struct DecayScan {
  std::vector<double> storage_times;
  std::vector<double> retrieved_energies;
  std::vector<StorageResult> runs;
};

/// store_and_retrieve at each storage time; runs are independent and shared
/// among `threads` workers. Output order follows `storage_times`.
DecayScan scan_storage_times(const FieldGrid& grid, const core::LambdaSystem& sys, double od,
                             const ProbeWaveform& probe, const std::vector<double>& storage_times,
                             double gamma_s, int threads = 1);

}  // namespace mottlight::storage
