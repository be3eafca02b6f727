#pragma once

// Physical constants, Lambda-system parameterization, dark states and the
// EIT linear-response lineshape.
//
// Units throughout: SI, with every frequency-like quantity stored as an
// angular frequency in rad/s. Rabi frequencies follow the convention that the
// light-atom coupling term in the optical Bloch equations is Omega/2.

#include <array>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace mottlight::core {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;

/// Immutable set of physical constants for the probe transition.
class PhysicalConstants {
 public:
  PhysicalConstants(double probe_wavelength, double natural_linewidth,
                    double ground_splitting, double speed_of_light,
                    double reduced_planck);

  double probe_wavelength() const { return probe_wavelength_; }
  double natural_linewidth() const { return natural_linewidth_; }
  double ground_splitting() const { return ground_splitting_; }
  double speed_of_light() const { return speed_of_light_; }
  double reduced_planck() const { return reduced_planck_; }

  double probe_wavenumber() const { return kTwoPi / probe_wavelength_; }
  double probe_angular_frequency() const {
    return kTwoPi * speed_of_light_ / probe_wavelength_;
  }
  /// Resonant cross-section of a closed two-level transition, 3 lambda^2 / 2 pi.
  double resonant_cross_section() const;
  /// Two-level saturation intensity pi h c Gamma / (3 lambda^3), W/m^2.
  double saturation_intensity() const;

 private:
  double probe_wavelength_;
  double natural_linewidth_;
  double ground_splitting_;
  double speed_of_light_;
  double reduced_planck_;
};

/// Rb-87 D1 line.
const PhysicalConstants& rb87_d1();

struct LambdaSystem {
  double omega_c = 0.0;     // coupling Rabi frequency
  double omega_p = 0.0;     // probe Rabi frequency
  double omega_p_pi = 0.0;  // pi-polarized probe leakage Rabi frequency
  double delta = 0.0;       // two-photon detuning
  double delta_1p = 0.0;    // one-photon probe detuning
  double gamma_31 = rb87_d1().natural_linewidth() / 2.0;
  double gamma_21 = 0.0;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

struct DarkState {
  Complex amp_1;
  std::vector<Complex> amp_2_field;  // one entry per requested position
};

class DegenerateStateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dark superposition (Omega_c |1> - Omega_p e^{i(k_c - k_p).r} |2>) / norm,
/// evaluated at each position.
DarkState dark_state(double omega_c, double omega_p, const Vec3& k_c,
                     const Vec3& k_p, std::span<const Vec3> positions);

/// Dimensionless linear-response lineshape of the probe transition,
///   L = -gamma_31 (delta + i gamma_21) /
///       [(delta + i gamma_21)(delta_1p + i gamma_31) - Omega_c^2 / 4],
/// normalized so that Im L = 1 on the bare resonance (Omega_c = 0,
/// delta_1p = 0). Im L > 0 is absorption.
Complex susceptibility_lineshape(const LambdaSystem& sys);

/// s = 2 Omega^2 / Gamma^2 for a probe of Rabi frequency Omega.
double saturation_parameter(double rabi, double natural_linewidth);

/// Photon absorption rate of one atom for a probe of Rabi frequency `rabi`
/// given the lineshape value Im L: rabi^2 / (2 gamma_31) * Im L.
double absorption_rate(double rabi, double gamma_31, double im_lineshape);

struct ScatteringRate {
  double rate = 0.0;  // 1/s
  bool out_of_regime = false;
};

/// Weak-probe scattering rate Gamma^2 s / (4 gamma_31) * Im L. The result is
/// flagged when s exceeds 0.1. Throws std::invalid_argument for s < 0.
ScatteringRate scattering_rate(const LambdaSystem& sys, double saturation,
                               const PhysicalConstants& constants = rb87_d1());

}  // namespace mottlight::core
