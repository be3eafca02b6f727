#include "mottlight/deflection/light_shift.hpp"

#include <cmath>
#include <stdexcept>

namespace mottlight::deflection {

void GradientBeam::validate() const {
  beam.validate();
  if (beam.detuning == 0) throw std::invalid_argument("GradientBeam: detuning must be nonzero");
  if (!std::isfinite(shift_calibration)) {
    throw std::invalid_argument("GradientBeam: shift calibration must be finite");
  }
}

double GradientBeam::shift(double y, double z) const {
  return shift_calibration * beam.intensity(y, z);
}

double GradientBeam::gradient_y(double y, double z) const {
  const double w2 = beam.waist * beam.waist;
  return -4.0 * (y - beam.offset_y) / w2 * shift(y, z);
}

GradientBeam GradientBeam::calibrated(const cloud::BeamProfile& beam, double shift_at_origin) {
  GradientBeam g{beam, 0.0};
  const double i0 = beam.intensity(0.0, 0.0);
  if (!(i0 > 0)) throw std::invalid_argument("GradientBeam: no intensity at the origin to calibrate");
  g.shift_calibration = shift_at_origin / i0;
  g.validate();
  return g;
}

GradientBeam default_gradient_beam() {
  cloud::BeamProfile beam;
  beam.waist = 42e-6;
  beam.offset_y = 20e-6;
  beam.peak_intensity = 2.3e4;  // 2.3 W/cm^2
  beam.detuning = -core::kTwoPi * 20e9;
  beam.polarization = cloud::Polarization::sigma_plus;
  return GradientBeam::calibrated(beam, core::kTwoPi * 7.7e3);
}

std::vector<double> light_shift_profile(const GradientBeam& beam, const TransverseGrid& grid) {
  beam.validate();
  grid.validate();
  const int n = grid.points;
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy) {
    for (int iz = 0; iz < n; ++iz) {
      out[static_cast<std::size_t>(iy) * n + iz] =
          beam.shift(grid.coordinate(iy), grid.coordinate(iz));
    }
  }
  return out;
}

AbInitioShift ab_initio_light_shift(double intensity, double detuning_from_f2,
                                    const core::PhysicalConstants& constants) {
  if (!(intensity >= 0)) throw std::invalid_argument("intensity must be >= 0");
  if (detuning_from_f2 == 0) throw std::invalid_argument("detuning must be nonzero");
  const double gamma = constants.natural_linewidth();
  // The D1 line carries one third of the ground-state oscillator strength.
  const double scale = gamma * gamma * intensity / (24.0 * constants.saturation_intensity());
  const double detuning_from_f1 = detuning_from_f2 - constants.ground_splitting();
  AbInitioShift out;
  out.level_2 = scale / detuning_from_f2;
  out.level_1 = detuning_from_f1 != 0 ? scale / detuning_from_f1 : 0.0;
  out.differential = out.level_1 - out.level_2;
  return out;
}

}  // namespace mottlight::deflection
