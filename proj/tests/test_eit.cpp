#include <doctest.h>

#include <cmath>
#include <vector>

#include "mottlight/eit/spectroscopy.hpp"

using namespace mottlight;
using eit::SpectroscopyConfig;

namespace {

constexpr double kHz = core::kTwoPi;

SpectroscopyConfig window_config() {
  SpectroscopyConfig c;
  c.sys.omega_c = kHz * 27e3;
  c.sys.omega_p = kHz * 3.9e3;
  c.sys.gamma_21 = kHz * 10.0;
  c.pi_leak_fraction = 0.2;
  c.peak_optical_depth = 6.3;
  return c;
}

// Cell centres and weights of the transverse discretization, rebuilt here so
// the oracles below see the same columns as the model.
struct Cell {
  double weight;
  double intensity;
};
std::vector<Cell> cells(const SpectroscopyConfig& c) {
  std::vector<Cell> out;
  const int n = c.transverse_cells;
  const double ry = c.cloud.radii[1], rz = c.cloud.radii[2];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double y = -ry + (i + 0.5) * 2 * ry / n;
      const double z = -rz + (j + 0.5) * 2 * rz / n;
      const double rho2 = y * y / (ry * ry) + z * z / (rz * rz);
      if (rho2 >= 1) continue;
      out.push_back({std::sqrt(1 - rho2), std::exp(-2 * (y * y + z * z) / (c.probe.waist * c.probe.waist))});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("exact transparency without decoherence or leak") {
  SpectroscopyConfig c = window_config();
  c.sys.gamma_21 = 0;
  c.pi_leak_fraction = 0;
  const eit::TransferPoint p = eit::simulate_transfer(c, 0.0);
  CHECK(p.fraction < 1e-3);
  CHECK_FALSE(p.out_of_regime);
}

TEST_CASE("far off resonance only the pi leak pumps (bleaching oracle)") {
  SpectroscopyConfig c = window_config();
  c.transverse_cells = 32;
  c.propagation_slices = 32;
  const eit::TransferPoint p = eit::simulate_transfer(c, kHz * 10e9);

  // Frantz-Nodvik solution of one-way pumping with depletion feedback:
  // y = b * sigma * fluence obeys e^{y(L)} - 1 = (e^{y0} - 1) e^{-od}, and
  // the column loses (y0 - yL) / od of its |1> population.
  const double b = core::d1_branching_to_f2();
  const double r_pi = std::pow(0.2 * c.sys.omega_p, 2) / (2 * c.sys.gamma_31);
  double num = 0, den = 0;
  for (const Cell& cell : cells(c)) {
    const double od = 6.3 * cell.weight;
    const double y0 = b * r_pi * cell.intensity * c.probe_duration;
    const double yl = std::log1p(std::expm1(y0) * std::exp(-od));
    num += cell.weight * (y0 - yl) / od;
    den += cell.weight;
  }
  CHECK(p.fraction == doctest::Approx(num / den).epsilon(0.01));
  CHECK(p.fraction > 0.0);
}

TEST_CASE("vanishing optical depth reduces to independent atoms") {
  SpectroscopyConfig c = window_config();
  c.transverse_cells = 32;
  c.peak_optical_depth = 0.0;
  const double delta = kHz * 40.0;
  core::LambdaSystem sys = c.sys;
  sys.delta = sys.delta_1p = delta;
  const double im_l = core::susceptibility_lineshape(sys).imag();
  const double b = core::d1_branching_to_f2();
  const double r = (c.sys.omega_p * c.sys.omega_p * im_l + std::pow(0.2 * c.sys.omega_p, 2)) /
                   (2 * c.sys.gamma_31);
  double num = 0, den = 0;
  for (const Cell& cell : cells(c)) {
    num += cell.weight * -std::expm1(-b * r * cell.intensity * c.probe_duration);
    den += cell.weight;
  }
  CHECK(eit::simulate_transfer(c, delta).fraction == doctest::Approx(num / den).epsilon(1e-6));
}

TEST_CASE("population bookkeeping and monotonicity") {
  SpectroscopyConfig c = window_config();
  c.transverse_cells = 32;
  c.propagation_slices = 16;
  const double delta = kHz * 30.0;
  const eit::TransferPoint p = eit::simulate_transfer(c, delta);
  CHECK(p.max_population_drift < 1e-9);
  CHECK(p.accepted_steps > 0);

  SpectroscopyConfig shorter = c;
  shorter.probe_duration = 0.1;
  CHECK(eit::simulate_transfer(shorter, delta).fraction < p.fraction);
  SpectroscopyConfig weaker = c;
  weaker.sys.omega_p *= std::sqrt(0.5);
  CHECK(eit::simulate_transfer(weaker, delta).fraction < p.fraction);

  double prev = -1.0;
  for (double g21 : {0.0, 10.0, 100.0}) {
    SpectroscopyConfig g = c;
    g.sys.gamma_21 = kHz * g21;
    const double f = eit::simulate_transfer(g, 0.0).fraction;
    CHECK(f > prev);
    prev = f;
  }
}

TEST_CASE("scan symmetry, ordering and thread independence") {
  SpectroscopyConfig c = window_config();
  c.transverse_cells = 32;
  c.propagation_slices = 16;
  std::vector<double> d;
  for (double hz : {-150.0, -60.0, -20.0, 20.0, 60.0, 150.0}) d.push_back(kHz * hz);
  const eit::LineshapeScan one = eit::scan_lineshape(c, d, 1);
  const eit::LineshapeScan three = eit::scan_lineshape(c, d, 3);
  CHECK(one.transfer_fractions == three.transfer_fractions);
  CHECK(one.detunings == d);
  for (std::size_t i = 0; i < d.size() / 2; ++i) {
    CHECK(one.transfer_fractions[i] ==
          doctest::Approx(one.transfer_fractions[d.size() - 1 - i]).epsilon(0.02));
  }
  CHECK(eit::scan_lineshape(c, {}).transfer_fractions.empty());
}

TEST_CASE("grid convergence") {
  SpectroscopyConfig coarse = window_config();
  coarse.transverse_cells = 32;
  coarse.propagation_slices = 16;
  SpectroscopyConfig fine = coarse;
  fine.transverse_cells = 64;
  fine.propagation_slices = 32;
  for (double hz : {0.0, 40.0}) {
    const double a = eit::simulate_transfer(coarse, kHz * hz).fraction;
    const double b = eit::simulate_transfer(fine, kHz * hz).fraction;
    CHECK(a == doctest::Approx(b).epsilon(0.01));
  }
}

TEST_CASE("fwhm extraction") {
  SUBCASE("synthetic Lorentzian dip") {
    eit::LineshapeScan s;
    for (int i = -500; i <= 500; ++i) {
      const double x = i;
      s.detunings.push_back(kHz * x);
      s.transfer_fractions.push_back(0.6 - 0.4 / (1 + std::pow(x / 50.0, 2)));
    }
    CHECK(eit::extract_fwhm(s, eit::Feature::window) / kHz == doctest::Approx(100.0).epsilon(0.01));
  }
  SUBCASE("synthetic Lorentzian line") {
    eit::LineshapeScan s;
    for (int i = -500; i <= 500; ++i) {
      s.detunings.push_back(i);
      s.transfer_fractions.push_back(1.0 / (1 + std::pow(i / 80.0, 2)));
    }
    // Half height is measured from the lowest sample, not from zero.
    const double half = 0.5 * (1.0 + s.transfer_fractions.front());
    const double oracle = 2 * 80.0 * std::sqrt(1 / half - 1);
    CHECK(eit::extract_fwhm(s, eit::Feature::line) == doctest::Approx(oracle).epsilon(1e-3));
  }
  SUBCASE("flat scan") {
    eit::LineshapeScan s{{0, 1, 2, 3}, {0.5, 0.5, 0.5, 0.5}};
    CHECK_THROWS_AS(eit::extract_fwhm(s, eit::Feature::window), eit::NoFeatureError);
  }
  SUBCASE("unsorted detunings") {
    eit::LineshapeScan s{{0, 2, 1, 3}, {0.5, 0.1, 0.2, 0.5}};
    CHECK_THROWS_AS(eit::extract_fwhm(s, eit::Feature::window), std::invalid_argument);
  }
}

TEST_CASE("configuration checks") {
  SpectroscopyConfig c = window_config();
  c.pi_leak_fraction = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = window_config();
  c.transverse_cells = 4;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = window_config();
  c.peak_optical_depth.reset();
  CHECK(c.optical_depth() == doctest::Approx(cloud::peak_optical_depth(c.cloud)));
  c.sys.omega_p = kHz * 2e6;
  CHECK(eit::simulate_transfer(c, kHz * 1e9).out_of_regime);
}
