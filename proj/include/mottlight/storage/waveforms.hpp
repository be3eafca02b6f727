#pragma once

// Time-dependent drive fields for the storage solver. Times are in seconds,
// Rabi frequencies in rad/s.

#include <optional>
#include <vector>

namespace mottlight::storage {

/// Piecewise-linear coupling Rabi frequency. Jumps are instantaneous and the
/// waveform is right-continuous at a jump.
class ControlWaveform {
 public:
  struct Knot {
    double time;
    double value;
  };

  static ControlWaveform constant(double rabi);

  /// Instantaneous switch to `rabi` at `time` (>= every earlier knot).
  ControlWaveform& switch_to(double time, double rabi);
  /// Linear ramp from the current value at t_start to `rabi` at t_end.
  ControlWaveform& ramp_to(double t_start, double t_end, double rabi);

  double value(double t) const;
  double max_value() const;
  const std::vector<Knot>& knots() const { return knots_; }

  /// First time the field reaches zero from a positive value.
  std::optional<double> switch_off_time() const;
  /// Last time the field leaves zero.
  std::optional<double> switch_on_time() const;

 private:
  double initial_ = 0.0;
  std::vector<Knot> knots_;
};

/// Gaussian probe envelope with intensity FWHM `fwhm`, optionally cut to zero
/// from `truncation` on.
struct ProbeWaveform {
  double peak_rabi = 0.0;
  double fwhm = 2.8e-6;
  double peak_time = 0.0;
  std::optional<double> truncation;

  void validate() const;
  /// Field amplitude relative to the peak.
  double amplitude(double t) const;
  /// Gaussian amplitude ignoring the truncation.
  double envelope(double t) const;
  double start_time() const;  // where the incoming intensity is negligible
  double end_time() const;
  /// Integral of amplitude^2 over time, in seconds.
  double energy() const;
};

}  // namespace mottlight::storage
