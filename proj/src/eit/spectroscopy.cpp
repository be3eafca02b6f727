#include "mottlight/eit/spectroscopy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

namespace mottlight::eit {

void SpectroscopyConfig::validate() const {
  sys.validate();
  cloud.validate();
  probe.validate();
  if (!(probe_duration > 0)) throw std::invalid_argument("probe_duration must be > 0");
  if (transverse_cells < 8 || propagation_slices < 8) {
    throw std::invalid_argument("grid resolutions must be >= 8");
  }
  if (!(pi_leak_fraction >= 0 && pi_leak_fraction <= 1)) {
    throw std::invalid_argument("pi_leak_fraction must lie in [0, 1]");
  }
  if (peak_optical_depth && !(*peak_optical_depth >= 0)) {
    throw std::invalid_argument("peak_optical_depth must be >= 0");
  }
  for (double b : {branching_to_f2, pi_leak_branching_to_f2}) {
    if (!(b >= 0 && b <= 1)) throw std::invalid_argument("branching ratios must lie in [0, 1]");
  }
  if (!(pi_leak_strength_ratio >= 0)) {
    throw std::invalid_argument("pi_leak_strength_ratio must be >= 0");
  }
  if (!(relative_tolerance > 0) || !(absolute_tolerance > 0) || max_step_halvings < 1) {
    throw std::invalid_argument("invalid step-control settings");
  }
}

double SpectroscopyConfig::optical_depth() const {
  return peak_optical_depth ? *peak_optical_depth : cloud::peak_optical_depth(cloud);
}

namespace {

// Transverse column of the discretized cloud.
struct Column {
  double weight;      // atoms in the column (arbitrary common scale)
  double od;          // resonant optical depth of the full column
  double intensity;   // probe intensity at the entrance relative to beam peak
};

// One pumping channel: a probe polarization component.
struct Channel {
  double rate;          // absorption rate of an unattenuated atom at beam peak
  double od_scale;      // multiplies the column od (lineshape x strength)
  double branching;     // fraction of absorptions that end in F=2
};

class TransferModel {
 public:
  TransferModel(const SpectroscopyConfig& config, double delta) : slices_(config.propagation_slices) {
    core::LambdaSystem sys = config.sys;
    sys.delta = delta;
    if (config.one_photon_tracks_two_photon) sys.delta_1p = delta;
    const double im_l = std::max(0.0, core::susceptibility_lineshape(sys).imag());

    const double leak_rabi = config.pi_leak_fraction * sys.omega_p;
    // The rate is the bare resonant one; od_scale carries Im L into both the
    // attenuation and the local absorption.
    channels_[0] = {core::absorption_rate(sys.omega_p, sys.gamma_31, 1.0), im_l,
                    config.branching_to_f2};
    channels_[1] = {core::absorption_rate(leak_rabi, sys.gamma_31, 1.0),
                    config.pi_leak_strength_ratio, config.pi_leak_branching_to_f2};

    const int n = config.transverse_cells;
    const double ry = config.cloud.radii[1];
    const double rz = config.cloud.radii[2];
    const double central = cloud::column_density(config.cloud, 0.0, 0.0);
    const double peak_od = config.optical_depth();
    const double peak_intensity = config.probe.peak_intensity;
    for (int iy = 0; iy < n; ++iy) {
      const double y = -ry + (iy + 0.5) * 2.0 * ry / n;
      for (int iz = 0; iz < n; ++iz) {
        const double z = -rz + (iz + 0.5) * 2.0 * rz / n;
        const double col = cloud::column_density(config.cloud, y, z);
        if (col <= 0) continue;
        const double rel_col = central > 0 ? col / central : 0.0;
        const double rel_i = peak_intensity > 0 ? config.probe.intensity(y, z) / peak_intensity : 0.0;
        columns_.push_back({rel_col, peak_od * rel_col, rel_i});
        total_weight_ += rel_col;
      }
    }
    rates_.resize(columns_.size() * slices_);
  }

  std::size_t size() const { return columns_.size() * slices_; }

  // Pump rate out of |1> for every (column, slice) given the |1> populations.
  const std::vector<double>& pump_rates(const std::vector<double>& n1) {
    std::fill(rates_.begin(), rates_.end(), 0.0);
    for (const Channel& ch : channels_) {
      if (ch.rate == 0.0) continue;
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        const Column& col = columns_[c];
        const double slice_od = col.od * ch.od_scale / slices_;
        double intensity = col.intensity;
        const std::size_t base = c * slices_;
        for (int k = 0; k < slices_; ++k) {
          const double od = slice_od * n1[base + k];
          // Slice-averaged intensity, I_in (1 - e^{-od}) / od.
          const double transmitted = std::exp(-od);
          const double mean = od > 1e-8 ? intensity * (1.0 - transmitted) / od
                                        : intensity * (1.0 - 0.5 * od);
          rates_[base + k] += ch.branching * ch.rate * ch.od_scale * mean;
          intensity *= transmitted;
        }
      }
    }
    return rates_;
  }

  double transferred_fraction(const std::vector<double>& n2) const {
    double acc = 0.0;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      double col_sum = 0.0;
      for (int k = 0; k < slices_; ++k) col_sum += n2[c * slices_ + k];
      acc += columns_[c].weight * col_sum;
    }
    return total_weight_ > 0 ? acc / (total_weight_ * slices_) : 0.0;
  }

 private:
  int slices_;
  std::vector<Column> columns_;
  Channel channels_[2];
  double total_weight_ = 0.0;
  std::vector<double> rates_;
};

struct Populations {
  std::vector<double> n1;
  std::vector<double> n2;
};

// Exponential midpoint step: rates frozen at the half-step populations.
Populations midpoint_step(TransferModel& model, const Populations& p, double dt) {
  Populations half = p;
  const std::vector<double>& r0 = model.pump_rates(p.n1);
  for (std::size_t i = 0; i < half.n1.size(); ++i) half.n1[i] = p.n1[i] * std::exp(-r0[i] * 0.5 * dt);
  const std::vector<double>& rh = model.pump_rates(half.n1);
  Populations out = p;
  for (std::size_t i = 0; i < out.n1.size(); ++i) {
    const double moved = p.n1[i] * -std::expm1(-rh[i] * dt);
    out.n1[i] = p.n1[i] - moved;
    out.n2[i] = p.n2[i] + moved;
  }
  return out;
}

}  // namespace

TransferPoint simulate_transfer(const SpectroscopyConfig& config, double delta) {
  config.validate();
  TransferModel model(config, delta);

  TransferPoint point;
  point.delta = delta;
  point.out_of_regime =
      core::saturation_parameter(config.sys.omega_p, core::rb87_d1().natural_linewidth()) > 0.1;

  Populations state{std::vector<double>(model.size(), 1.0), std::vector<double>(model.size(), 0.0)};
  const double total = config.probe_duration;
  const double min_dt = total * std::ldexp(1.0, -config.max_step_halvings);
  double t = 0.0;
  double dt = total / 16.0;
  while (total - t > 1e-12 * total) {
    dt = std::min(dt, total - t);
    const Populations coarse = midpoint_step(model, state, dt);
    const Populations fine = midpoint_step(model, midpoint_step(model, state, 0.5 * dt), 0.5 * dt);
    const double f_coarse = model.transferred_fraction(coarse.n2);
    const double f_fine = model.transferred_fraction(fine.n2);
    const double err = std::abs(f_fine - f_coarse);
    const double tol = config.absolute_tolerance + config.relative_tolerance * std::abs(f_fine);
    if (err > tol || !std::isfinite(f_fine)) {
      ++point.rejected_steps;
      dt *= 0.5;
      if (dt < min_dt) {
        throw ConvergenceError("simulate_transfer: step size fell below the halving bound at t = " +
                               std::to_string(t) + " s");
      }
      continue;
    }
    state = fine;
    t += dt;
    ++point.accepted_steps;
    for (std::size_t i = 0; i < state.n1.size(); ++i) {
      point.max_population_drift =
          std::max(point.max_population_drift, std::abs(state.n1[i] + state.n2[i] - 1.0));
    }
    // Second-order scheme: local error ~ dt^3.
    const double grow = err > 0 ? 0.9 * std::cbrt(tol / err) : 2.0;
    dt *= std::clamp(grow, 0.5, 2.0);
  }
  point.fraction = model.transferred_fraction(state.n2);
  return point;
}

LineshapeScan scan_lineshape(const SpectroscopyConfig& config,
                             const std::vector<double>& detunings, int threads) {
  config.validate();
  LineshapeScan scan;
  scan.detunings = detunings;
  scan.transfer_fractions.assign(detunings.size(), 0.0);
  if (detunings.empty()) return scan;

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < detunings.size() && !failed; i = next++) {
      try {
        scan.transfer_fractions[i] = simulate_transfer(config, detunings[i]).fraction;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int n_workers = std::clamp<int>(threads, 1, static_cast<int>(detunings.size()));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return scan;
}

namespace {

double crossing(double x0, double y0, double x1, double y1, double level) {
  if (y1 == y0) return 0.5 * (x0 + x1);
  return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

void check_scan(const LineshapeScan& scan) {
  if (scan.detunings.size() != scan.transfer_fractions.size()) {
    throw std::invalid_argument("extract_fwhm: detunings and fractions differ in length");
  }
  if (scan.detunings.size() < 3) throw NoFeatureError("extract_fwhm: scan too short");
  if (!std::is_sorted(scan.detunings.begin(), scan.detunings.end())) {
    throw std::invalid_argument("extract_fwhm: detunings must be increasing");
  }
}

}  // namespace

WindowSummary summarize_window(const LineshapeScan& scan) {
  check_scan(scan);
  const auto& f = scan.transfer_fractions;
  const auto min_it = std::min_element(f.begin(), f.end());
  const auto max_it = std::max_element(f.begin(), f.end());
  WindowSummary s;
  s.center = scan.detunings[static_cast<std::size_t>(min_it - f.begin())];
  s.floor = *min_it;
  s.shoulder = *max_it;
  s.depth = *max_it - *min_it;
  return s;
}

double extract_fwhm(const LineshapeScan& scan, Feature feature) {
  check_scan(scan);
  const auto& x = scan.detunings;
  const auto& f = scan.transfer_fractions;
  const std::size_t n = f.size();
  const double hi = *std::max_element(f.begin(), f.end());
  const double lo = *std::min_element(f.begin(), f.end());
  const double scale = std::max(std::abs(hi), std::abs(lo));
  if (!(hi - lo > 1e-12 * scale)) {
    throw NoFeatureError("extract_fwhm: scan is flat");
  }
  const double half = 0.5 * (hi + lo);

  if (feature == Feature::window) {
    const std::size_t imin = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
    if (imin == 0 || imin == n - 1) throw NoFeatureError("extract_fwhm: dip minimum lies at the scan edge");
    std::size_t l = imin;
    while (l > 0 && f[l] < half) --l;
    std::size_t r = imin;
    while (r < n - 1 && f[r] < half) ++r;
    if (f[l] < half || f[r] < half) throw NoFeatureError("extract_fwhm: dip does not recover to half depth");
    return crossing(x[r - 1], f[r - 1], x[r], f[r], half) - crossing(x[l], f[l], x[l + 1], f[l + 1], half);
  }

  // Absorption envelope: outermost half-height crossings, so that any dip
  // inside the line is spanned.
  std::size_t l = 0;
  while (l < n && f[l] < half) ++l;
  std::size_t r = n - 1;
  while (r > 0 && f[r] < half) --r;
  if (l == 0 || r == n - 1) throw NoFeatureError("extract_fwhm: line is not contained in the scan");
  return crossing(x[r], f[r], x[r + 1], f[r + 1], half) - crossing(x[l - 1], f[l - 1], x[l], f[l], half);
}

}  // namespace mottlight::eit
