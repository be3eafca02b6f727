#pragma once

// Transverse map of the stored spin wave, in the plane perpendicular to the
// probe axis.

#include <span>
#include <vector>

#include "mottlight/cloud/cloud.hpp"
#include "mottlight/core/physics.hpp"

namespace mottlight::deflection {

/// Square n x n grid centred on the cloud; index (iy, iz) sits at
/// ((iy - n/2) * spacing, (iz - n/2) * spacing).
struct TransverseGrid {
  int points = 512;
  double spacing = 2e-6;

  void validate() const;
  double coordinate(int i) const { return (i - points / 2) * spacing; }
  double extent() const { return points * spacing; }
  double cell_area() const { return spacing * spacing; }
};

struct SpinWaveMap {
  TransverseGrid grid;
  std::vector<core::Complex> amplitude;  // row-major, index iy * n + iz

  double energy() const;  // sum |amplitude|^2 * cell area
};

/// Probe field at the cloud times the fraction of the cloud chord it crosses:
/// exp(-rho^2 / w^2) * sqrt(1 - (y/ry)^2 - (z/rz)^2). Throws
/// std::invalid_argument when the grid spans fewer than 4 probe waists.
SpinWaveMap make_spin_wave(const cloud::AtomCloud& cloud, const cloud::BeamProfile& probe,
                           const TransverseGrid& grid);

/// Multiplies each cell by exp(i shift * t_int). Shifts in rad/s, one per cell.
SpinWaveMap phase_imprint(const SpinWaveMap& sw, std::span<const double> shifts, double t_int);

}  // namespace mottlight::deflection
