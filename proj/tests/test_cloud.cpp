#include <doctest.h>

#include <cmath>

#include "mottlight/cloud/cloud.hpp"

using namespace mottlight;
using cloud::AtomCloud;
using cloud::BeamProfile;

namespace {

double lattice_density() { return 1.0 / (765e-9 / 2 * 844e-9 / 2 * 844e-9 / 2); }

}  // namespace

TEST_CASE("atom number") {
  AtomCloud c;
  const double oracle = lattice_density() * 4.0 / 3.0 * M_PI * 8.6e-6 * 13.1e-6 * 13.1e-6;
  CHECK(cloud::atom_number(c) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(cloud::atom_number(c) == doctest::Approx(9e4).epsilon(0.05));
  AtomCloud big = c;
  for (double& r : big.radii) r *= 2;
  CHECK(cloud::atom_number(big) == doctest::Approx(8 * cloud::atom_number(c)));
  c.filling = 0;
  CHECK(cloud::atom_number(c) == 0.0);
}

TEST_CASE("rescaling to an atom number keeps the density") {
  const AtomCloud c;
  const AtomCloud s = c.scaled_to_atom_number(2.5e5);
  CHECK(cloud::atom_number(s) == doctest::Approx(2.5e5).epsilon(1e-12));
  CHECK(s.density() == doctest::Approx(c.density()));
  CHECK(s.radii[0] / s.radii[1] == doctest::Approx(c.radii[0] / c.radii[1]));
  CHECK_THROWS_AS(c.scaled_to_atom_number(0.0), std::invalid_argument);
}

TEST_CASE("column density") {
  const AtomCloud c;
  const double n0 = lattice_density();
  CHECK(cloud::column_density(c, 0, 0) == doctest::Approx(n0 * 2 * 8.6e-6));
  CHECK(cloud::column_density(c, 13.1e-6, 0) == doctest::Approx(0.0));
  CHECK(cloud::column_density(c, 0.6 * 13.1e-6, 0.8 * 13.1e-6) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(cloud::column_density(c, 20e-6, 0) == 0.0);

  SUBCASE("even, non-negative, peaked at the centre") {
    const double peak = cloud::column_density(c, 0, 0);
    for (double y = -15e-6; y <= 15e-6; y += 1.3e-6) {
      for (double z = -15e-6; z <= 15e-6; z += 1.7e-6) {
        const double v = cloud::column_density(c, y, z);
        CHECK(v >= 0.0);
        CHECK(v <= peak);
        CHECK(v == doctest::Approx(cloud::column_density(c, -y, z)));
        CHECK(v == doctest::Approx(cloud::column_density(c, y, -z)));
      }
    }
  }
  SUBCASE("integrates to the atom number") {
    const int n = 256;
    const double h = 2 * 13.1e-6 / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        sum += cloud::column_density(c, -13.1e-6 + (i + 0.5) * h, -13.1e-6 + (j + 0.5) * h);
      }
    }
    CHECK(sum * h * h == doctest::Approx(cloud::atom_number(c)).epsilon(1e-3));
  }
}

TEST_CASE("peak optical depth") {
  AtomCloud c;
  const auto& k = core::rb87_d1();
  // sigma_0 / 12 * n0 * 2 r_x
  const double oracle = k.resonant_cross_section() / 12.0 * lattice_density() * 2 * 8.6e-6;
  CHECK(cloud::peak_optical_depth(c) == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(cloud::peak_optical_depth(c) == doctest::Approx(6.3).epsilon(0.15));
  AtomCloud thick = c;
  thick.radii[0] *= 1.7;
  CHECK(cloud::peak_optical_depth(thick) == doctest::Approx(1.7 * cloud::peak_optical_depth(c)));
  c.line_strength_factor = 0;
  CHECK(cloud::peak_optical_depth(c) == 0.0);
}

TEST_CASE("geometric overlap") {
  const AtomCloud c;
  BeamProfile b;
  b.waist = 40e-6;
  const double circular = 1.0 - std::exp(-2.0 * 13.1 * 13.1 / (40.0 * 40.0));
  CHECK(cloud::geometric_overlap(c, b) == doctest::Approx(circular).epsilon(1e-4));
  CHECK(cloud::geometric_overlap(c, b) == doctest::Approx(0.18).epsilon(0.02 / 0.18));
  b.waist = 1e-8;
  CHECK(cloud::geometric_overlap(c, b) == doctest::Approx(1.0).epsilon(1e-6));
  b.waist = 40e-6;
  b.offset_y = 500e-6;
  CHECK(cloud::geometric_overlap(c, b) < 1e-12);

  double prev = 1.0;
  for (double w = 5e-6; w < 200e-6; w *= 1.3) {
    BeamProfile beam;
    beam.waist = w;
    const double o = cloud::geometric_overlap(c, beam);
    CHECK(o >= 0.0);
    CHECK(o <= 1.0);
    CHECK(o < prev);
    prev = o;
  }
}

TEST_CASE("beam profile") {
  BeamProfile b;
  b.waist = 30e-6;
  b.peak_intensity = 2.0;
  CHECK(b.intensity(0, 0) == doctest::Approx(2.0));
  CHECK(b.intensity(30e-6, 0) == doctest::Approx(2.0 * std::exp(-2.0)));
  CHECK(b.total_power() == doctest::Approx(M_PI * 30e-6 * 30e-6 / 2.0 * 2.0));
  b.waist = 0;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
}

TEST_CASE("cloud validation") {
  AtomCloud c;
  c.radii[1] = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = AtomCloud{};
  c.filling = -0.1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
