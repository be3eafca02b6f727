#include "mottlight/core/physics.hpp"

#include <cmath>
#include <string>

namespace mottlight::core {

PhysicalConstants::PhysicalConstants(double probe_wavelength,
                                     double natural_linewidth,
                                     double ground_splitting,
                                     double speed_of_light,
                                     double reduced_planck)
    : probe_wavelength_(probe_wavelength),
      natural_linewidth_(natural_linewidth),
      ground_splitting_(ground_splitting),
      speed_of_light_(speed_of_light),
      reduced_planck_(reduced_planck) {
  if (!(probe_wavelength > 0 && natural_linewidth > 0 && ground_splitting > 0 &&
        speed_of_light > 0 && reduced_planck > 0)) {
    throw std::invalid_argument("physical constants must be strictly positive");
  }
}

double PhysicalConstants::resonant_cross_section() const {
  return 3.0 * probe_wavelength_ * probe_wavelength_ / kTwoPi;
}

double PhysicalConstants::saturation_intensity() const {
  const double h = kTwoPi * reduced_planck_;
  return std::numbers::pi * h * speed_of_light_ * natural_linewidth_ /
         (3.0 * std::pow(probe_wavelength_, 3));
}

const PhysicalConstants& rb87_d1() {
  static const PhysicalConstants constants(794.98e-9, kTwoPi * 5.75e6,
                                           kTwoPi * 6.834e9, 299792458.0,
                                           1.054571817e-34);
  return constants;
}

void LambdaSystem::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("LambdaSystem: " + what);
  };
  if (!(omega_c >= 0)) fail("omega_c must be >= 0");
  if (!(omega_p >= 0)) fail("omega_p must be >= 0");
  if (!(omega_p_pi >= 0)) fail("omega_p_pi must be >= 0");
  if (omega_p_pi > omega_p) fail("omega_p_pi must not exceed omega_p");
  if (!(gamma_31 > 0)) fail("gamma_31 must be > 0");
  if (!(gamma_21 >= 0)) fail("gamma_21 must be >= 0");
  if (!std::isfinite(delta) || !std::isfinite(delta_1p)) fail("detunings must be finite");
}

DarkState dark_state(double omega_c, double omega_p, const Vec3& k_c,
                     const Vec3& k_p, std::span<const Vec3> positions) {
  if (omega_c == 0.0 && omega_p == 0.0) {
    throw DegenerateStateError("dark state undefined when both Rabi frequencies vanish");
  }
  const double norm = std::hypot(omega_c, omega_p);
  DarkState state;
  state.amp_1 = omega_c / norm;
  state.amp_2_field.reserve(positions.size());
  const Vec3 dk{k_c[0] - k_p[0], k_c[1] - k_p[1], k_c[2] - k_p[2]};
  for (const Vec3& r : positions) {
    const double phase = dk[0] * r[0] + dk[1] * r[1] + dk[2] * r[2];
    state.amp_2_field.push_back(-(omega_p / norm) * std::polar(1.0, phase));
  }
  return state;
}

Complex susceptibility_lineshape(const LambdaSystem& sys) {
  if (!(sys.gamma_31 > 0)) {
    throw std::invalid_argument("susceptibility_lineshape: gamma_31 must be > 0");
  }
  const Complex two_photon(sys.delta, sys.gamma_21);
  const Complex one_photon(sys.delta_1p, sys.gamma_31);
  // Without coupling the two-photon factor cancels; keep the two-level limit
  // finite when it is exactly zero.
  if (sys.omega_c == 0.0) return -sys.gamma_31 / one_photon;
  const Complex denom = two_photon * one_photon - 0.25 * sys.omega_c * sys.omega_c;
  return -sys.gamma_31 * two_photon / denom;
}

double saturation_parameter(double rabi, double natural_linewidth) {
  return 2.0 * rabi * rabi / (natural_linewidth * natural_linewidth);
}

double absorption_rate(double rabi, double gamma_31, double im_lineshape) {
  return rabi * rabi / (2.0 * gamma_31) * im_lineshape;
}

ScatteringRate scattering_rate(const LambdaSystem& sys, double saturation,
                               const PhysicalConstants& constants) {
  if (!(saturation >= 0)) {
    throw std::invalid_argument("scattering_rate: saturation parameter must be >= 0");
  }
  const double gamma = constants.natural_linewidth();
  const double im_l = susceptibility_lineshape(sys).imag();
  ScatteringRate out;
  out.rate = gamma * gamma * saturation / (4.0 * sys.gamma_31) * im_l;
  out.out_of_regime = saturation > 0.1;
  return out;
}

}  // namespace mottlight::core
