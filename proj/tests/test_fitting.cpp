#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mottlight/fitting/fitting.hpp"

using namespace mottlight::fitting;

TEST_CASE("exponential fit") {
  std::vector<double> t, v;
  for (int i = 0; i < 10; ++i) {
    t.push_back(0.04 * i);
    v.push_back(3.0 * std::exp(-t.back() / 0.1));
  }
  SUBCASE("exact data") {
    const ExponentialFit f = fit_exponential(t, v);
    CHECK(f.tau == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(f.amplitude == doctest::Approx(3.0).epsilon(1e-6));
    CHECK_FALSE(f.infinite_tau);
  }
  SUBCASE("constant data flags an infinite decay time") {
    std::fill(v.begin(), v.end(), 2.0);
    const ExponentialFit f = fit_exponential(t, v);
    CHECK(f.infinite_tau);
    CHECK(f.tau == std::numeric_limits<double>::infinity());
  }
  SUBCASE("bad input") {
    v[3] = -1.0;
    CHECK_THROWS_AS(fit_exponential(t, v), std::domain_error);
    CHECK_THROWS(fit_exponential(std::vector<double>{0, 1}, std::vector<double>{1, 0.5}));
  }
}

TEST_CASE("exponential fit with 5% multiplicative noise") {
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> noise(0.0, 0.05);
  const double tau = 0.218;
  const int trials = 400;
  int good = 0;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> t, v;
    for (int i = 0; i < 20; ++i) {
      t.push_back(0.4 * i / 19.0);
      v.push_back(std::exp(-t.back() / tau) * (1.0 + noise(rng)));
    }
    const ExponentialFit f = fit_exponential(t, v);
    if (std::abs(f.tau / tau - 1.0) < 0.10) ++good;
  }
  CHECK(good >= 0.95 * trials);
}

TEST_CASE("gaussian fit") {
  std::vector<double> x, y;
  for (int i = 0; i < 101; ++i) {
    x.push_back(-50.0 + i);
    y.push_back(4.0 * std::exp(-std::pow(x.back() - 3.3, 2) / (2 * 7.5 * 7.5)) + 0.2);
  }
  SUBCASE("exact samples") {
    const GaussianFit f = fit_gaussian_1d(x, y);
    CHECK(f.converged);
    CHECK(f.center == doctest::Approx(3.3).epsilon(1e-8));
    CHECK(f.width == doctest::Approx(7.5).epsilon(1e-8));
    CHECK(f.amplitude == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(f.offset == doctest::Approx(0.2).epsilon(1e-8));
  }
  SUBCASE("5% noise: centre recovered within 2% of the width") {
    // Additive noise at 5% of the peak. The Cramer-Rao bound for the centre
    // with unit sample spacing is sigma_n / A * sqrt(2 w / sqrt(pi)), about
    // 1.9% of the width here, so the check is on the Monte-Carlo mean and on
    // the scatter matching that bound.
    std::mt19937_64 rng(99);
    std::normal_distribution<double> noise(0.0, 0.05 * 4.0);
    const double bound = 0.05 * std::sqrt(2.0 * 7.5 / std::sqrt(M_PI));
    const int trials = 300;
    double sum = 0.0, sum2 = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      std::vector<double> noisy = y;
      for (double& v : noisy) v += noise(rng);
      const GaussianFit f = fit_gaussian_1d(x, noisy);
      REQUIRE(f.converged);
      sum += f.center - 3.3;
      sum2 += std::pow(f.center - 3.3, 2);
    }
    const double mean = sum / trials;
    const double rms = std::sqrt(sum2 / trials);
    CHECK(std::abs(mean) < 0.02 * 7.5);
    CHECK(rms < 1.25 * bound);
    CHECK(rms > 0.8 * bound);
  }
  SUBCASE("flat data does not converge") {
    std::fill(y.begin(), y.end(), 1.0);
    CHECK_THROWS_AS(fit_gaussian_1d(x, y), FitError);
  }
  SUBCASE("too few points") {
    CHECK_THROWS(fit_gaussian_1d(std::vector<double>{0, 1, 2, 3}, std::vector<double>{0, 1, 1, 0}));
  }
}

TEST_CASE("line fit") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  const std::vector<double> y{1.0, 3.5, 6.0, 8.5, 11.0};
  const LinearFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.5));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_stderr == doctest::Approx(0.0).epsilon(1e-9));
}
