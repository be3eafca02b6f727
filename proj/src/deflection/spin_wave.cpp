#include "mottlight/deflection/spin_wave.hpp"

#include <cmath>
#include <stdexcept>

namespace mottlight::deflection {

void TransverseGrid::validate() const {
  if (points < 16 || points % 2 != 0) {
    throw std::invalid_argument("TransverseGrid: points must be even and >= 16");
  }
  if (!(spacing > 0)) throw std::invalid_argument("TransverseGrid: spacing must be > 0");
}

double SpinWaveMap::energy() const {
  double sum = 0.0;
  for (const auto& a : amplitude) sum += std::norm(a);
  return sum * grid.cell_area();
}

SpinWaveMap make_spin_wave(const cloud::AtomCloud& cloud, const cloud::BeamProfile& probe,
                           const TransverseGrid& grid) {
  grid.validate();
  cloud.validate();
  probe.validate();
  if (grid.extent() < 4.0 * probe.waist) {
    throw std::invalid_argument("make_spin_wave: grid must span at least 4 probe waists");
  }
  const int n = grid.points;
  SpinWaveMap sw{grid, std::vector<core::Complex>(static_cast<std::size_t>(n) * n)};
  const double ry = cloud.radii[1];
  const double rz = cloud.radii[2];
  const double w2 = probe.waist * probe.waist;
  for (int iy = 0; iy < n; ++iy) {
    const double y = grid.coordinate(iy);
    for (int iz = 0; iz < n; ++iz) {
      const double z = grid.coordinate(iz);
      const double inside = 1.0 - (y * y) / (ry * ry) - (z * z) / (rz * rz);
      if (inside <= 0) continue;
      const double dy = y - probe.offset_y;
      const double dz = z - probe.offset_z;
      sw.amplitude[static_cast<std::size_t>(iy) * n + iz] =
          std::exp(-(dy * dy + dz * dz) / w2) * std::sqrt(inside);
    }
  }
  return sw;
}

SpinWaveMap phase_imprint(const SpinWaveMap& sw, std::span<const double> shifts, double t_int) {
  if (!(t_int >= 0)) throw std::invalid_argument("phase_imprint: t_int must be >= 0");
  if (shifts.size() != sw.amplitude.size()) {
    throw std::invalid_argument("phase_imprint: shift map does not match the spin-wave grid");
  }
  SpinWaveMap out = sw;
  if (t_int == 0) return out;
  for (std::size_t i = 0; i < out.amplitude.size(); ++i) {
    out.amplitude[i] *= std::polar(1.0, shifts[i] * t_int);
  }
  return out;
}

}  // namespace mottlight::deflection
