#pragma once

// Differential ground-state light shift from a far-detuned Gaussian beam.
// Shifts are angular frequencies (the energy shift divided by hbar).

#include <vector>

#include "mottlight/cloud/cloud.hpp"
#include "mottlight/core/physics.hpp"
#include "mottlight/deflection/spin_wave.hpp"

namespace mottlight::deflection {

struct GradientBeam {
  /// detuning is measured from the |2> <-> |3> transition.
  cloud::BeamProfile beam;
  /// Differential shift per unit intensity, (rad/s) / (W/m^2).
  double shift_calibration = 0.0;

  void validate() const;
  double shift(double y, double z) const;
  /// Analytic d(shift)/dy.
  double gradient_y(double y, double z) const;

  /// Calibration chosen so that shift(0, 0) equals `shift_at_origin`.
  static GradientBeam calibrated(const cloud::BeamProfile& beam, double shift_at_origin);
};

/// Beam parameters of the imprinting laser used by the bundled scenarios:
/// 42 um waist, 20 um off the cloud centre along y, 2.3 W/cm^2 peak,
/// 20 GHz red of |2> <-> |3>, calibrated to 2 pi x 7.7 kHz at the cloud centre.
GradientBeam default_gradient_beam();

/// Differential shift per grid cell, row-major like SpinWaveMap.
std::vector<double> light_shift_profile(const GradientBeam& beam, const TransverseGrid& grid);

/// Scalar far-detuned estimate from the D1 line alone: each ground level
/// shifts by Gamma^2 I / (24 I_sat Delta_F), Delta_F measured from that
/// level's transition. Only good to a small factor: polarization and
/// excited-state hyperfine structure are ignored.
struct AbInitioShift {
  double level_1 = 0.0;
  double level_2 = 0.0;
  double differential = 0.0;  // level_1 - level_2
};
AbInitioShift ab_initio_light_shift(double intensity, double detuning_from_f2,
                                    const core::PhysicalConstants& constants = core::rb87_d1());

}  // namespace mottlight::deflection
