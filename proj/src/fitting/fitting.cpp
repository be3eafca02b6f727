#include "mottlight/fitting/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_fit.h>
#include <gsl/gsl_matrix.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_vector.h>

namespace mottlight::fitting {

namespace {

// Residual r_i(p) and its Jacobian row, for GSL's trust-region solver.
struct Problem {
  std::size_t n;
  std::size_t p;
  std::function<void(const double* params, std::size_t i, double& residual, double* jac_row)> eval;
};

struct Solution {
  std::vector<double> params;
  std::vector<double> stderrs;
  int status = GSL_FAILURE;
  int iterations = 0;
};

int residual_cb(const gsl_vector* x, void* data, gsl_vector* f) {
  const auto* pr = static_cast<const Problem*>(data);
  std::vector<double> jac(pr->p);
  for (std::size_t i = 0; i < pr->n; ++i) {
    double r = 0.0;
    pr->eval(x->data, i, r, jac.data());
    gsl_vector_set(f, i, r);
  }
  return GSL_SUCCESS;
}

int jacobian_cb(const gsl_vector* x, void* data, gsl_matrix* J) {
  const auto* pr = static_cast<const Problem*>(data);
  std::vector<double> jac(pr->p);
  for (std::size_t i = 0; i < pr->n; ++i) {
    double r = 0.0;
    pr->eval(x->data, i, r, jac.data());
    for (std::size_t k = 0; k < pr->p; ++k) gsl_matrix_set(J, i, k, jac[k]);
  }
  return GSL_SUCCESS;
}

Solution solve(Problem problem, std::vector<double> start, std::size_t max_iter = 200) {
  gsl_set_error_handler_off();
  gsl_multifit_nlinear_parameters params = gsl_multifit_nlinear_default_parameters();
  std::unique_ptr<gsl_multifit_nlinear_workspace, decltype(&gsl_multifit_nlinear_free)> work(
      gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, problem.n, problem.p),
      &gsl_multifit_nlinear_free);
  gsl_multifit_nlinear_fdf fdf;
  fdf.f = residual_cb;
  fdf.df = jacobian_cb;
  fdf.fvv = nullptr;
  fdf.n = problem.n;
  fdf.p = problem.p;
  fdf.params = &problem;

  gsl_vector_view x0 = gsl_vector_view_array(start.data(), problem.p);
  Solution sol;
  if (gsl_multifit_nlinear_init(&x0.vector, &fdf, work.get()) != GSL_SUCCESS) return sol;
  int info = 0;
  sol.status = gsl_multifit_nlinear_driver(max_iter, 1e-14, 1e-14, 1e-14, nullptr, nullptr,
                                           &info, work.get());
  sol.iterations = static_cast<int>(gsl_multifit_nlinear_niter(work.get()));
  const gsl_vector* x = gsl_multifit_nlinear_position(work.get());
  sol.params.assign(x->data, x->data + problem.p);

  std::unique_ptr<gsl_matrix, decltype(&gsl_matrix_free)> covar(
      gsl_matrix_alloc(problem.p, problem.p), &gsl_matrix_free);
  gsl_multifit_nlinear_covar(gsl_multifit_nlinear_jac(work.get()), 0.0, covar.get());
  const double chi = gsl_blas_dnrm2(gsl_multifit_nlinear_residual(work.get()));
  const double dof = static_cast<double>(problem.n) - static_cast<double>(problem.p);
  const double variance = dof > 0 ? chi * chi / dof : 0.0;
  sol.stderrs.resize(problem.p);
  for (std::size_t k = 0; k < problem.p; ++k) {
    sol.stderrs[k] = std::sqrt(std::max(0.0, variance * gsl_matrix_get(covar.get(), k, k)));
  }
  return sol;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

ExponentialFit fit_exponential(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw std::invalid_argument("fit_exponential: size mismatch");
  if (times.size() < 3) throw std::invalid_argument("fit_exponential: need at least 3 points");
  for (double v : values) {
    if (!(v > 0)) throw std::domain_error("fit_exponential: values must be positive");
  }
  const std::size_t n = times.size();
  const double t_scale = std::max(max_abs(times), std::numeric_limits<double>::min());
  const double y_scale = max_abs(values);

  // Log-linear estimate seeds the nonlinear fit and detects flat data.
  std::vector<double> t(n);
  std::vector<double> logy(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = times[i] / t_scale;
    logy[i] = std::log(values[i] / y_scale);
  }
  double c0 = 0.0, c1 = 0.0, cov00 = 0.0, cov01 = 0.0, cov11 = 0.0, sumsq = 0.0;
  gsl_fit_linear(t.data(), 1, logy.data(), 1, n, &c0, &c1, &cov00, &cov01, &cov11, &sumsq);

  ExponentialFit out;
  if (!(-c1 > 1e-12)) {
    out.infinite_tau = true;
    out.tau = std::numeric_limits<double>::infinity();
    out.tau_stderr = std::numeric_limits<double>::infinity();
    out.amplitude = std::exp(c0) * y_scale;
    return out;
  }

  Problem problem{n, 2, [&](const double* p, std::size_t i, double& r, double* jac) {
                    const double e = std::exp(-p[1] * t[i]);
                    r = p[0] * e - values[i] / y_scale;
                    jac[0] = e;
                    jac[1] = -p[0] * t[i] * e;
                  }};
  const Solution sol = solve(problem, {std::exp(c0), -c1});
  if (sol.params.empty() || !(sol.params[1] > 0)) {
    out.infinite_tau = true;
    out.tau = std::numeric_limits<double>::infinity();
    out.tau_stderr = std::numeric_limits<double>::infinity();
    out.amplitude = std::exp(c0) * y_scale;
    return out;
  }
  const double rate = sol.params[1];
  out.amplitude = sol.params[0] * y_scale;
  out.amplitude_stderr = sol.stderrs[0] * y_scale;
  out.tau = t_scale / rate;
  out.tau_stderr = t_scale * sol.stderrs[1] / (rate * rate);
  return out;
}

GaussianFit fit_gaussian_1d(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_gaussian_1d: size mismatch");
  if (xs.size() < 5) throw std::invalid_argument("fit_gaussian_1d: need at least 5 points");
  const std::size_t n = xs.size();

  const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
  const double x_mid = 0.5 * (*xmin_it + *xmax_it);
  const double x_scale = 0.5 * (*xmax_it - *xmin_it);
  const double y_scale = max_abs(ys);

  GaussianFit guess;
  if (!(x_scale > 0) || !(y_scale > 0)) {
    throw FitError("fit_gaussian_1d: degenerate input", guess);
  }
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (xs[i] - x_mid) / x_scale;
    y[i] = ys[i] / y_scale;
  }
  const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  const double base = *ymin_it;
  const double height = *ymax_it - base;
  guess.offset = base * y_scale;
  guess.amplitude = height * y_scale;
  guess.center = xs[static_cast<std::size_t>(ymax_it - y.begin())];
  if (!(height > 1e-12)) throw FitError("fit_gaussian_1d: flat data, no peak to fit", guess);

  // Second moment of the baseline-subtracted profile for the initial width.
  double w0 = 0.0, w1 = 0.0, w2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = y[i] - base;
    w0 += v;
    w1 += v * x[i];
    w2 += v * x[i] * x[i];
  }
  const double mean = w1 / w0;
  const double sigma0 = std::sqrt(std::max(w2 / w0 - mean * mean, 1e-6));
  guess.width = sigma0 * x_scale;

  Problem problem{n, 4, [&](const double* p, std::size_t i, double& r, double* jac) {
                    const double u = (x[i] - p[1]) / p[2];
                    const double e = std::exp(-0.5 * u * u);
                    r = p[0] * e + p[3] - y[i];
                    jac[0] = e;
                    jac[1] = p[0] * e * u / p[2];
                    jac[2] = p[0] * e * u * u / p[2];
                    jac[3] = 1.0;
                  }};
  const Solution sol = solve(problem, {height, (guess.center - x_mid) / x_scale, sigma0, base});

  GaussianFit fit;
  if (!sol.params.empty()) {
    fit.amplitude = sol.params[0] * y_scale;
    fit.center = sol.params[1] * x_scale + x_mid;
    fit.width = std::abs(sol.params[2]) * x_scale;
    fit.offset = sol.params[3] * y_scale;
    fit.amplitude_stderr = sol.stderrs[0] * y_scale;
    fit.center_stderr = sol.stderrs[1] * x_scale;
    fit.width_stderr = sol.stderrs[2] * x_scale;
    fit.offset_stderr = sol.stderrs[3] * y_scale;
  }
  fit.iterations = sol.iterations;
  const bool finite = !sol.params.empty() &&
                      std::all_of(sol.params.begin(), sol.params.end(),
                                  [](double v) { return std::isfinite(v); });
  fit.converged = sol.status == GSL_SUCCESS && finite;
  if (!fit.converged) {
    throw FitError("fit_gaussian_1d: no convergence (" + std::string(gsl_strerror(sol.status)) + ")",
                   sol.params.empty() ? guess : fit);
  }
  return fit;
}

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (xs.size() < 2) throw std::invalid_argument("fit_line: need at least 2 points");
  double c0 = 0.0, c1 = 0.0, cov00 = 0.0, cov01 = 0.0, cov11 = 0.0, sumsq = 0.0;
  gsl_fit_linear(xs.data(), 1, ys.data(), 1, xs.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
  LinearFit out;
  out.intercept = c0;
  out.slope = c1;
  // gsl_fit_linear scales the covariance by the residual variance already.
  out.intercept_stderr = std::sqrt(std::max(0.0, cov00));
  out.slope_stderr = std::sqrt(std::max(0.0, cov11));
  return out;
}

}  // namespace mottlight::fitting
