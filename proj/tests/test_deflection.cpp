#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mottlight/deflection/camera.hpp"
#include "mottlight/deflection/light_shift.hpp"
#include "mottlight/deflection/spin_wave.hpp"

using namespace mottlight;
using namespace mottlight::deflection;

namespace {

constexpr double kHz = core::kTwoPi;
const double kP = core::rb87_d1().probe_wavenumber();

SpinWaveMap default_spin_wave(int points = 256) {
  TransverseGrid grid;
  grid.points = points;
  return make_spin_wave(cloud::AtomCloud{}, cloud::BeamProfile{}, grid);
}

}  // namespace

TEST_CASE("gradient beam calibration") {
  const GradientBeam b = default_gradient_beam();
  CHECK(b.shift(0, 0) == doctest::Approx(kHz * 7.7e3).epsilon(1e-12));
  // d/dy of S0 exp(-2 (y - y0)^2 / w^2) at y = 0: S0 * 4 y0 / w^2.
  const double analytic = kHz * 7.7e3 * 4 * 20e-6 / (42e-6 * 42e-6);
  CHECK(b.gradient_y(0, 0) == doctest::Approx(analytic).epsilon(1e-12));
  CHECK(b.gradient_y(0, 0) / kHz * 1e-6 == doctest::Approx(349.2).epsilon(1e-3));

  TransverseGrid grid;
  grid.points = 256;
  grid.spacing = 0.25e-6;
  const std::vector<double> map = light_shift_profile(b, grid);
  const int c = grid.points / 2;
  const double fd = (map[(c + 1) * grid.points + c] - map[(c - 1) * grid.points + c]) / (2 * grid.spacing);
  CHECK(fd == doctest::Approx(b.gradient_y(0, 0)).epsilon(0.005));

  GradientBeam dark = b;
  dark.beam.peak_intensity = 0;
  for (double v : light_shift_profile(dark, grid)) CHECK(v == 0.0);

  GradientBeam bad = b;
  bad.beam.detuning = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("ab-initio light shift agrees with the calibration to a small factor") {
  const GradientBeam b = default_gradient_beam();
  const AbInitioShift s = ab_initio_light_shift(b.beam.intensity(0, 0), b.beam.detuning);
  CHECK(s.differential == doctest::Approx(s.level_1 - s.level_2));
  const double ratio = std::abs(s.differential) / b.shift(0, 0);
  CHECK(ratio > 1.0 / 3.0);
  CHECK(ratio < 3.0);
}

TEST_CASE("spin wave map") {
  const SpinWaveMap sw = default_spin_wave();
  const int n = sw.grid.points;
  CHECK(std::abs(sw.amplitude[(n / 2) * n + n / 2]) == doctest::Approx(1.0));
  CHECK(std::abs(sw.amplitude[0]) == 0.0);
  TransverseGrid small;
  small.points = 32;
  CHECK_THROWS_AS(make_spin_wave(cloud::AtomCloud{}, cloud::BeamProfile{}, small), std::invalid_argument);
}

TEST_CASE("phase imprint") {
  const SpinWaveMap sw = default_spin_wave();
  const std::vector<double> shifts = light_shift_profile(default_gradient_beam(), sw.grid);
  CHECK(phase_imprint(sw, shifts, 0.0).amplitude == sw.amplitude);
  const SpinWaveMap tilted = phase_imprint(sw, shifts, 50e-6);
  CHECK(tilted.energy() == doctest::Approx(sw.energy()).epsilon(1e-12));
  CHECK_THROWS_AS(phase_imprint(sw, std::vector<double>(3), 1e-6), std::invalid_argument);
}

TEST_CASE("camera propagation") {
  const SpinWaveMap sw = default_spin_wave();
  const int n = sw.grid.points;

  SUBCASE("no imprint stays centred and conserves energy") {
    const DeflectionResult r = propagate_to_camera(sw, kP, 1e-3);
    CHECK(std::abs(r.beta) < 1e-9);
    CHECK(r.image_energy == doctest::Approx(r.input_energy).epsilon(0.005));
    CHECK(r.fit.converged);
  }
  SUBCASE("uniform shift is a global phase") {
    const std::vector<double> flat(static_cast<std::size_t>(n) * n, kHz * 5e3);
    const DeflectionResult r = propagate_to_camera(phase_imprint(sw, flat, 80e-6), kP, 1e-3);
    CHECK(std::abs(r.beta) < 1e-9);
  }
  SUBCASE("linear phase deflects by dk / k_p") {
    const double dk = 2e4;  // rad/m
    SpinWaveMap tilted = sw;
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) {
        tilted.amplitude[iy * n + iz] *= std::polar(1.0, dk * sw.grid.coordinate(iy));
      }
    }
    const DeflectionResult r = propagate_to_camera(tilted, kP, 1e-3);
    CHECK(r.beta == doctest::Approx(dk / kP).epsilon(0.01));
  }
  SUBCASE("linear shift gradient, Fourier-shift theorem") {
    const double g = kHz * 300e3 / 1e-3;  // rad/s per m
    const double t_int = 20e-6;
    std::vector<double> shifts(static_cast<std::size_t>(n) * n);
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) shifts[iy * n + iz] = g * sw.grid.coordinate(iy);
    }
    const DeflectionResult r = propagate_to_camera(phase_imprint(sw, shifts, t_int), kP, 1e-3);
    CHECK(r.beta == doctest::Approx(g * t_int / kP).epsilon(0.01));
  }
  SUBCASE("sampling bound and edge guard") {
    CHECK_THROWS_AS(propagate_to_camera(sw, kP, 1.0), GridTooSmallError);
    TransverseGrid g;
    g.points = 64;
    g.spacing = 2.5e-6;  // 4 waists exactly; the unimprinted image still fits
    const SpinWaveMap tight = make_spin_wave(cloud::AtomCloud{}, cloud::BeamProfile{}, g);
    const double dk = 0.9 * M_PI / g.spacing;  // steers the image onto the grid edge
    SpinWaveMap steep = tight;
    for (int iy = 0; iy < 64; ++iy) {
      for (int iz = 0; iz < 64; ++iz) steep.amplitude[iy * 64 + iz] *= std::polar(1.0, dk * g.coordinate(iy));
    }
    CHECK_NOTHROW(propagate_to_camera(tight, kP, 4.9e-4));
    CHECK_THROWS_AS(propagate_to_camera(steep, kP, 4.9e-4), GridTooSmallError);
  }
}

TEST_CASE("analytic slope") {
  DeflectionParams p;
  p.grid.points = 256;
  p.convention = SlopeConvention::cloud_center;
  const double center = deflection_slope(p);
  CHECK(center == doctest::Approx(default_gradient_beam().gradient_y(0, 0) / kP));
  CHECK(center * 1.0 == doctest::Approx(277.6).epsilon(1e-3));  // rad/s = urad/us
  CHECK(std::abs(center - 232.0) <= 46.0);

  p.convention = SlopeConvention::spinwave_weighted;
  const double weighted = deflection_slope(p);
  CHECK(weighted < center);
  CHECK(std::abs(weighted - 232.0) <= 46.0);

  DeflectionParams doubled = p;
  doubled.gradient.shift_calibration *= 2;
  CHECK(deflection_slope(doubled) == doctest::Approx(2 * weighted));
  DeflectionParams off = p;
  off.gradient.shift_calibration = 0;
  CHECK(deflection_slope(off) == 0.0);
}

TEST_CASE("deflection scan") {
  DeflectionParams p;
  p.grid.points = 256;
  const std::vector<double> times{0, 10e-6, 20e-6, 30e-6, 40e-6, 50e-6};
  const DeflectionScan s = simulate_deflection_scan(p, times, 2);
  REQUIRE(s.fit);
  CHECK(std::abs(s.betas[0]) < 1e-9);
  CHECK(s.fit->slope == doctest::Approx(s.analytic_slope).epsilon(0.10));
  for (const auto& r : s.results) CHECK(r.image_energy == doctest::Approx(r.input_energy).epsilon(0.005));

  SUBCASE("linear in the interaction time") {
    double worst = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double line = s.fit->intercept + s.fit->slope * times[i];
      worst = std::max(worst, std::abs(s.betas[i] - line) / std::abs(line));
    }
    CHECK(worst < 0.03);
  }
  SUBCASE("mirrored beam offset flips the deflection") {
    DeflectionParams m = p;
    m.gradient.beam.offset_y = -p.gradient.beam.offset_y;
    const DeflectionScan mirrored = simulate_deflection_scan(m, {30e-6});
    CHECK(mirrored.betas[0] == doctest::Approx(-s.betas[3]).epsilon(0.01));
  }
  SUBCASE("thread count does not change the result") {
    CHECK(simulate_deflection_scan(p, times, 1).betas == s.betas);
  }
  SUBCASE("a single zero time") {
    const DeflectionScan z = simulate_deflection_scan(p, {0.0});
    CHECK(std::abs(z.betas[0]) < 1e-9);
    CHECK_FALSE(z.fit);
  }
  SUBCASE("long interaction: image centroid against the cloud-centre gradient") {
    const DeflectionScan l = simulate_deflection_scan(p, {100e-6});
    DeflectionParams c = p;
    c.convention = SlopeConvention::cloud_center;
    CHECK(l.betas[0] == doctest::Approx(deflection_slope(c) * 100e-6).epsilon(0.10));
  }
}

TEST_CASE("pgm output") {
  const auto path = std::filesystem::temp_directory_path() / "mottlight_test.pgm";
  std::vector<double> img(16 * 16, 0.0);
  img[5] = 2.0;
  img[7] = 1.0;
  write_pgm(path, img, 16);
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, max = 0;
  in >> magic >> w >> h >> max;
  CHECK(magic == "P5");
  CHECK(w == 16);
  CHECK(h == 16);
  CHECK(max == 65535);
  in.get();
  std::vector<unsigned char> data(2 * 16 * 16);
  in.read(reinterpret_cast<char*>(data.data()), data.size());
  CHECK(in.gcount() == static_cast<std::streamsize>(data.size()));
  CHECK(data[10] == 0xff);
  CHECK(data[11] == 0xff);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_pgm(path, img, 15), std::invalid_argument);
  CHECK_THROWS_AS(write_pgm("/nonexistent-dir/x.pgm", img, 16), std::ios_base::failure);
}
