#pragma once

// Least-squares fits shared by the analysis code: exponential decay,
// 1D Gaussian profile, straight line.

#include <span>
#include <stdexcept>

namespace mottlight::fitting {

struct ExponentialFit {
  double amplitude = 0.0;
  double amplitude_stderr = 0.0;
  double tau = 0.0;  // +inf when the data do not decay
  double tau_stderr = 0.0;
  bool infinite_tau = false;
};

/// Fits A exp(-t / tau). Needs >= 3 points; throws std::domain_error for
/// non-positive values.
ExponentialFit fit_exponential(std::span<const double> times, std::span<const double> values);

struct GaussianFit {
  double center = 0.0;
  double width = 0.0;  // standard deviation
  double amplitude = 0.0;
  double offset = 0.0;
  double center_stderr = 0.0;
  double width_stderr = 0.0;
  double amplitude_stderr = 0.0;
  double offset_stderr = 0.0;
  bool converged = false;
  int iterations = 0;
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, const GaussianFit& last)
      : std::runtime_error(what), last_iterate(last) {}
  GaussianFit last_iterate;
};

/// Fits amplitude exp(-(x - center)^2 / (2 width^2)) + offset. Needs >= 5
/// points. Throws FitError carrying the last iterate when the fit does not
/// converge (flat data included).
GaussianFit fit_gaussian_1d(std::span<const double> xs, std::span<const double> ys);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_stderr = 0.0;
  double slope_stderr = 0.0;
};

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

}  // namespace mottlight::fitting
