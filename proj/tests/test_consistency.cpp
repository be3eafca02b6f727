// Cross-module checks of the shared conventions: Rabi frequencies enter as
// Omega/2 and detuning signs agree between the lineshape, the rate model and
// the Maxwell-Bloch solver.

#include <doctest.h>

#include <cmath>

#include "mottlight/core/physics.hpp"
#include "mottlight/eit/spectroscopy.hpp"
#include "mottlight/storage/solver.hpp"

using namespace mottlight;

namespace {

constexpr double kHz = core::kTwoPi;

// Long, spectrally narrow pulse through a driven medium: energy transmission
// should approach the steady-state Beer law exp(-od Im L).
double pulse_transmission(const core::LambdaSystem& sys, double od) {
  storage::ProbeWaveform probe;
  probe.peak_rabi = 1.0;
  probe.fwhm = 20e-6;
  storage::FieldGrid grid;
  grid.z_points = 64;
  grid.dt = 0.02;
  grid.read_duration = 2e-6;
  const storage::StorageResult r =
      storage::propagate(grid, storage::ControlWaveform::constant(sys.omega_c), probe, sys, od);
  return r.leaked_energy / r.input_energy;
}

}  // namespace

TEST_CASE("solver steady state matches the lineshape") {
  const double od = 2.0;
  core::LambdaSystem sys;
  sys.omega_c = kHz * 8e6;
  sys.gamma_21 = 0.0;

  struct Case {
    double delta_1p_mhz, delta_mhz;
  };
  for (const Case c : {Case{0.0, 0.0}, Case{0.0, 1.5}, Case{3.0, 0.5}, Case{-3.0, 0.5},
                       Case{3.0, -0.5}, Case{6.0, 4.0}}) {
    CAPTURE(c.delta_1p_mhz);
    CAPTURE(c.delta_mhz);
    sys.delta_1p = kHz * 1e6 * c.delta_1p_mhz;
    sys.delta = kHz * 1e6 * c.delta_mhz;
    const double im_l = core::susceptibility_lineshape(sys).imag();
    CHECK(pulse_transmission(sys, od) == doctest::Approx(std::exp(-od * im_l)).epsilon(0.01));
  }
}

TEST_CASE("the Omega/2 convention fixes the window width seen by the solver") {
  // At delta = Omega_c^2 / (4 Delta) the Raman line sits where the Omega
  // convention would put it a factor of four further out; transmissions of
  // the two readings differ strongly there.
  const double od = 3.0;
  core::LambdaSystem sys;
  sys.omega_c = kHz * 6e6;
  sys.delta_1p = kHz * 10e6;
  sys.delta = sys.omega_c * sys.omega_c / (4 * sys.delta_1p);
  const double quarter = std::exp(-od * core::susceptibility_lineshape(sys).imag());
  core::LambdaSystem other = sys;
  other.omega_c = 2 * sys.omega_c;
  const double full = std::exp(-od * core::susceptibility_lineshape(other).imag());
  REQUIRE(std::abs(quarter - full) > 0.2);
  CHECK(pulse_transmission(sys, od) == doctest::Approx(quarter).epsilon(0.02));

  // Same two-photon detuning on the other side of the one-photon resonance:
  // off the Raman line, so a sign error in the solver would show up here.
  core::LambdaSystem mirrored = sys;
  mirrored.delta_1p = -sys.delta_1p;
  const double off_raman = std::exp(-od * core::susceptibility_lineshape(mirrored).imag());
  REQUIRE(std::abs(off_raman - quarter) > 0.2);
  CHECK(pulse_transmission(mirrored, od) == doctest::Approx(off_raman).epsilon(0.02));
}

TEST_CASE("rate-model absorption equals the single-atom scattering rate") {
  core::LambdaSystem sys;
  sys.omega_c = kHz * 27e3;
  sys.omega_p = kHz * 3.9e3;
  sys.gamma_21 = kHz * 10;
  for (double hz : {0.0, 20.0, 80.0, 500.0}) {
    sys.delta = sys.delta_1p = kHz * hz;
    const double im_l = core::susceptibility_lineshape(sys).imag();
    const double s = core::saturation_parameter(sys.omega_p, core::rb87_d1().natural_linewidth());
    CHECK(core::absorption_rate(sys.omega_p, sys.gamma_31, im_l) ==
          doctest::Approx(core::scattering_rate(sys, s).rate).epsilon(1e-12));
  }
}

TEST_CASE("optically thin rate model follows the single-atom rate") {
  eit::SpectroscopyConfig c;
  c.sys.omega_c = kHz * 27e3;
  c.sys.omega_p = kHz * 3.9e3;
  c.sys.gamma_21 = kHz * 10;
  c.pi_leak_fraction = 0;
  c.peak_optical_depth = 0;
  c.probe_duration = 1e-3;
  c.probe.waist = 1.0;  // flat over the cloud
  c.transverse_cells = 16;
  core::LambdaSystem sys = c.sys;
  sys.delta = sys.delta_1p = kHz * 60;
  const double rate = core::absorption_rate(sys.omega_p, sys.gamma_31,
                                            core::susceptibility_lineshape(sys).imag());
  const double expected = -std::expm1(-core::d1_branching_to_f2() * rate * c.probe_duration);
  CHECK(eit::simulate_transfer(c, sys.delta).fraction == doctest::Approx(expected).epsilon(1e-6));
}
