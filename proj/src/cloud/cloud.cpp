#include "mottlight/cloud/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "mottlight/core/angular_momentum.hpp"

namespace mottlight::cloud {

double AtomCloud::default_line_strength() { return core::d1_probe_line_strength(); }

double AtomCloud::density() const {
  return filling / ((lattice_wavelengths[0] / 2) * (lattice_wavelengths[1] / 2) *
                    (lattice_wavelengths[2] / 2));
}

void AtomCloud::validate() const {
  for (double r : radii) {
    if (!(r > 0)) throw std::invalid_argument("AtomCloud: radii must be > 0");
  }
  for (double l : lattice_wavelengths) {
    if (!(l > 0)) throw std::invalid_argument("AtomCloud: lattice wavelengths must be > 0");
  }
  if (!(filling >= 0)) throw std::invalid_argument("AtomCloud: filling must be >= 0");
  if (!(line_strength_factor >= 0)) {
    throw std::invalid_argument("AtomCloud: line_strength_factor must be >= 0");
  }
}

AtomCloud AtomCloud::scaled_to_atom_number(double target) const {
  const double current = atom_number(*this);
  if (!(current > 0) || !(target > 0)) {
    throw std::invalid_argument("AtomCloud: cannot rescale to a non-positive atom number");
  }
  const double s = std::cbrt(target / current);
  AtomCloud out = *this;
  for (double& r : out.radii) r *= s;
  return out;
}

void BeamProfile::validate() const {
  if (!(waist > 0)) throw std::invalid_argument("BeamProfile: waist must be > 0");
  if (!(peak_intensity >= 0)) {
    throw std::invalid_argument("BeamProfile: intensity must be >= 0");
  }
}

double BeamProfile::intensity(double y, double z) const {
  const double dy = y - offset_y;
  const double dz = z - offset_z;
  return peak_intensity * std::exp(-2.0 * (dy * dy + dz * dz) / (waist * waist));
}

double BeamProfile::total_power() const {
  return std::numbers::pi * waist * waist / 2.0 * peak_intensity;
}

double atom_number(const AtomCloud& cloud) {
  cloud.validate();
  return cloud.density() * 4.0 / 3.0 * std::numbers::pi * cloud.radii[0] *
         cloud.radii[1] * cloud.radii[2];
}

double column_density(const AtomCloud& cloud, double y, double z) {
  const double u = y / cloud.radii[1];
  const double v = z / cloud.radii[2];
  const double inside = 1.0 - u * u - v * v;
  if (inside <= 0) return 0.0;
  return cloud.density() * 2.0 * cloud.radii[0] * std::sqrt(inside);
}

double peak_optical_depth(const AtomCloud& cloud, const core::PhysicalConstants& constants) {
  cloud.validate();
  return constants.resonant_cross_section() * cloud.line_strength_factor *
         column_density(cloud, 0.0, 0.0);
}

double geometric_overlap(const AtomCloud& cloud, const BeamProfile& beam) {
  cloud.validate();
  beam.validate();
  if (beam.peak_intensity == 0) return 0.0;
  // Along each ray from the beam centre the Gaussian radial integral is
  // closed-form; only the angular integral is numerical.
  const double ry = cloud.radii[1];
  const double rz = cloud.radii[2];
  const double two_over_w2 = 2.0 / (beam.waist * beam.waist);
  auto ray_fraction = [&](double theta) {
    const double uy = std::cos(theta);
    const double uz = std::sin(theta);
    const double a = uy * uy / (ry * ry) + uz * uz / (rz * rz);
    const double b = 2.0 * (beam.offset_y * uy / (ry * ry) + beam.offset_z * uz / (rz * rz));
    const double c = beam.offset_y * beam.offset_y / (ry * ry) +
                     beam.offset_z * beam.offset_z / (rz * rz) - 1.0;
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0) return 0.0;
    const double sq = std::sqrt(disc);
    const double lo = std::max(0.0, (-b - sq) / (2.0 * a));
    const double hi = (-b + sq) / (2.0 * a);
    if (hi <= lo) return 0.0;
    return std::exp(-two_over_w2 * lo * lo) - std::exp(-two_over_w2 * hi * hi);
  };
  using Workspace = std::unique_ptr<gsl_integration_workspace,
                                    decltype(&gsl_integration_workspace_free)>;
  gsl_set_error_handler_off();
  Workspace ws(gsl_integration_workspace_alloc(1000), &gsl_integration_workspace_free);
  gsl_function fn;
  fn.function = [](double theta, void* params) {
    return (*static_cast<decltype(ray_fraction)*>(params))(theta);
  };
  fn.params = &ray_fraction;
  double sum = 0.0;
  double abserr = 0.0;
  gsl_integration_qag(&fn, 0.0, core::kTwoPi, 1e-12, 1e-10, 1000, GSL_INTEG_GAUSS61,
                      ws.get(), &sum, &abserr);
  sum /= core::kTwoPi;
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace mottlight::cloud
