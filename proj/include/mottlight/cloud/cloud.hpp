#pragma once

// Unity-filled Mott-insulator sample: a hard-edged ellipsoid of uniform
// density, one atom per lattice cell. The probe propagates along x.

#include <array>

#include "mottlight/core/physics.hpp"

namespace mottlight::cloud {

struct AtomCloud {
  std::array<double, 3> radii{8.6e-6, 13.1e-6, 13.1e-6};
  std::array<double, 3> lattice_wavelengths{765e-9, 844e-9, 844e-9};
  double filling = 1.0;
  /// Resonant cross-section of the probe transition relative to
  /// 3 lambda^2 / 2 pi.
  double line_strength_factor = default_line_strength();

  static double default_line_strength();

  /// Atoms per unit volume, filling / prod(lambda_i / 2).
  double density() const;
  void validate() const;

  /// Same density, radii scaled uniformly so that the atom number equals
  /// `atom_number`.
  AtomCloud scaled_to_atom_number(double atom_number) const;
};

enum class Polarization { sigma_plus, sigma_minus, pi };

struct BeamProfile {
  double waist = 40e-6;  // 1/e^2 intensity radius
  double offset_y = 0.0;
  double offset_z = 0.0;
  double peak_intensity = 1.0;  // W/m^2
  double detuning = 0.0;
  Polarization polarization = Polarization::sigma_plus;

  void validate() const;
  double intensity(double y, double z) const;
  double total_power() const;
};

double atom_number(const AtomCloud& cloud);

/// Atoms per unit area along a chord parallel to x through (y, z).
double column_density(const AtomCloud& cloud, double y, double z);

/// Resonant intensity optical depth through the centre of the cloud.
double peak_optical_depth(const AtomCloud& cloud,
                          const core::PhysicalConstants& constants = core::rb87_d1());

/// Fraction of the beam power that crosses the transverse footprint of the cloud.
double geometric_overlap(const AtomCloud& cloud, const BeamProfile& beam);

}  // namespace mottlight::cloud
