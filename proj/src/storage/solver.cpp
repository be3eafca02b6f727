#include "mottlight/storage/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

namespace mottlight::storage {

using core::Complex;

namespace {

constexpr Complex kI{0.0, 1.0};

// Once the control is off and no probe arrives, the optical polarization has
// nothing left to do after this many 1/gamma_31: it is below e^-40.
constexpr double kSettleDecays = 40.0;

struct Rates {
  double g;         // gamma_31
  double detuning;  // one-photon
  double delta;     // two-photon
  double gamma_s;   // spin coherence, while the control is on
  double gamma_dark;
  double d;         // amplitude optical depth, od / 2
};

Rates normalized_rates(const FieldGrid& grid, const core::LambdaSystem& sys, double od,
                       double gamma_dark) {
  const double u = grid.rate_unit;
  return {sys.gamma_31 / u, sys.delta_1p / u, sys.delta / u, sys.gamma_21 / u, gamma_dark / u,
          od / 2.0};
}

void check_inputs(const FieldGrid& grid, const core::LambdaSystem& sys, double od) {
  grid.validate();
  if (!(od >= 0) || !std::isfinite(od)) throw std::invalid_argument("optical depth must be >= 0");
  if (!(sys.gamma_31 >= 0) || !(sys.gamma_21 >= 0)) {
    throw std::invalid_argument("decay rates must be >= 0");
  }
  if (!std::isfinite(sys.delta) || !std::isfinite(sys.delta_1p)) {
    throw std::invalid_argument("detunings must be finite");
  }
  if (grid.integrator == Integrator::adiabatic && !(sys.gamma_31 > 0)) {
    throw std::invalid_argument("adiabatic integrator needs gamma_31 > 0");
  }
}

// Field at the cell faces from the polarization, E_{j+1} = E_j + i sqrt(d) dz P_j.
// Writes the cell-centre average into ebar and returns the exit field.
Complex sweep_field(const Complex* p, Complex e0, double sqrt_d, double dz, int nz, Complex* ebar) {
  Complex e = e0;
  const Complex step = kI * sqrt_d * dz;
  for (int j = 0; j < nz; ++j) {
    const Complex next = e + step * p[j];
    ebar[j] = 0.5 * (e + next);
    e = next;
  }
  return e;
}

// P slaved to (E, S) with dP/dt = 0, solved cell by cell along z. Returns the
// exit field.
Complex slaved_polarization(const Complex* s, Complex e0, const Rates& r, double omega, double dz,
                            int nz, Complex* p) {
  const double sqrt_d = std::sqrt(r.d);
  const Complex denom = Complex(r.g + 0.5 * r.d * dz, -r.detuning);
  Complex e = e0;
  for (int j = 0; j < nz; ++j) {
    p[j] = (kI * sqrt_d * e + kI * (0.5 * omega) * s[j]) / denom;
    e += kI * sqrt_d * dz * p[j];
  }
  return e;
}

struct Fluxes {
  double in;
  double out;
};

// Drive fields over one segment [a, b] of the control (times in 1/rate_unit).
struct SegmentDrive {
  double a;
  double b;
  double omega_a;  // post-jump value at a
  double omega_b;  // value approaching b from the left
  bool probe_on;
  bool dark;
  double omega(double t) const {
    if (b == a) return omega_a;
    return omega_a + (omega_b - omega_a) * (t - a) / (b - a);
  }
};

class Propagator {
 public:
  Propagator(const FieldGrid& grid, const ProbeWaveform& probe, const Rates& rates)
      : grid_(grid),
        probe_(probe),
        r_(rates),
        nz_(grid.z_points),
        dz_(grid.dz()),
        sqrt_d_(std::sqrt(rates.d)),
        adiabatic_(grid.integrator == Integrator::adiabatic),
        p_(nz_),
        ebar_(nz_) {
    const std::size_t n = adiabatic_ ? nz_ : 2 * nz_;
    y_.assign(n, Complex{});
    for (auto* k : {&k1_, &k2_, &k3_, &k4_, &tmp_}) k->assign(n, Complex{});
  }

  double w_in = 0.0;
  double w_out = 0.0;

  Complex entrance(const SegmentDrive& seg, double t) const {
    return seg.probe_on ? Complex(probe_.envelope(t / grid_.rate_unit), 0.0) : Complex{};
  }

  void step(const SegmentDrive& seg, double t, double h) {
    const std::size_t n = y_.size();
    const Fluxes f1 = deriv(seg, t, y_, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + 0.5 * h * k1_[i];
    const Fluxes f2 = deriv(seg, t + 0.5 * h, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + 0.5 * h * k2_[i];
    const Fluxes f3 = deriv(seg, t + 0.5 * h, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + h * k3_[i];
    const Fluxes f4 = deriv(seg, t + h, tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) {
      y_[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
    w_in += h / 6.0 * (f1.in + 2.0 * f2.in + 2.0 * f3.in + f4.in);
    w_out += h / 6.0 * (f1.out + 2.0 * f2.out + 2.0 * f3.out + f4.out);
  }

  // Exit intensity and P for the current state at time t.
  double exit_intensity(const SegmentDrive& seg, double t) {
    const Complex e0 = entrance(seg, t);
    Complex e_out;
    if (adiabatic_) {
      e_out = slaved_polarization(y_.data(), e0, r_, seg.omega(t), dz_, nz_, p_.data());
    } else {
      e_out = sweep_field(y_.data(), e0, sqrt_d_, dz_, nz_, ebar_.data());
    }
    return std::norm(e_out);
  }

  double excitation(const SegmentDrive& seg, double t) {
    double sum = 0.0;
    if (adiabatic_) {
      slaved_polarization(y_.data(), entrance(seg, t), r_, seg.omega(t), dz_, nz_, p_.data());
      for (int j = 0; j < nz_; ++j) sum += std::norm(p_[j]) + std::norm(y_[j]);
    } else {
      for (const Complex& v : y_) sum += std::norm(v);
    }
    return sum * dz_;
  }

  std::vector<Complex> spin_wave() const {
    const std::size_t offset = adiabatic_ ? 0 : nz_;
    return {y_.begin() + offset, y_.begin() + offset + nz_};
  }

  // Applies the dark-time factor to S and discards whatever P remains.
  void skip_dark(double duration) {
    const Complex factor = std::exp(-Complex(r_.gamma_dark, -r_.delta) * duration);
    if (adiabatic_) {
      for (Complex& v : y_) v *= factor;
    } else {
      std::fill(y_.begin(), y_.begin() + nz_, Complex{});
      for (int j = 0; j < nz_; ++j) y_[nz_ + j] *= factor;
    }
  }

 private:
  Fluxes deriv(const SegmentDrive& seg, double t, const std::vector<Complex>& y,
               std::vector<Complex>& dy) {
    const double omega = seg.omega(t);
    const Complex e0 = entrance(seg, t);
    const double gamma_s = seg.dark ? r_.gamma_dark : r_.gamma_s;
    const Complex spin_decay(gamma_s, -r_.delta);
    const Complex half_omega = kI * (0.5 * omega);
    if (adiabatic_) {
      const Complex e_out = slaved_polarization(y.data(), e0, r_, omega, dz_, nz_, p_.data());
      for (int j = 0; j < nz_; ++j) dy[j] = -spin_decay * y[j] + half_omega * p_[j];
      return {std::norm(e0), std::norm(e_out)};
    }
    const Complex* p = y.data();
    const Complex* s = y.data() + nz_;
    const Complex e_out = sweep_field(p, e0, sqrt_d_, dz_, nz_, ebar_.data());
    const Complex optical_decay(r_.g, -r_.detuning);
    const Complex coupling = kI * sqrt_d_;
    for (int j = 0; j < nz_; ++j) {
      dy[j] = -optical_decay * p[j] + coupling * ebar_[j] + half_omega * s[j];
      dy[nz_ + j] = -spin_decay * s[j] + half_omega * p[j];
    }
    return {std::norm(e0), std::norm(e_out)};
  }

  const FieldGrid& grid_;
  const ProbeWaveform& probe_;
  Rates r_;
  int nz_;
  double dz_;
  double sqrt_d_;
  bool adiabatic_;
  std::vector<Complex> y_;
  std::vector<Complex> k1_, k2_, k3_, k4_, tmp_;
  std::vector<Complex> p_, ebar_;
};

double limit_for(const FieldGrid& grid, const Rates& r, double max_control_norm) {
  const double half_omega = 0.5 * max_control_norm;
  const double spin = std::max(r.gamma_s, r.gamma_dark) + std::abs(r.delta);
  if (grid.integrator == Integrator::adiabatic) {
    const double mag = std::hypot(r.g, r.detuning);
    return 2.5 / (spin + half_omega * half_omega / mag * (1.0 + r.d / mag) + 1e-300);
  }
  return 2.5 / (r.g + std::abs(r.detuning) + half_omega + r.d + spin + 1e-300);
}

StorageResult run(const FieldGrid& grid, const ControlWaveform& control, const ProbeWaveform& probe,
                  const core::LambdaSystem& sys, double od, double gamma_dark) {
  check_inputs(grid, sys, od);
  probe.validate();
  if (!(gamma_dark >= 0)) throw std::invalid_argument("dark-time decay rate must be >= 0");
  const double u = grid.rate_unit;
  const Rates rates = normalized_rates(grid, sys, od, gamma_dark);

  StorageResult result;
  result.stability_limit = limit_for(grid, rates, control.max_value() / u);
  if (grid.dt > result.stability_limit) {
    throw std::invalid_argument("time step " + std::to_string(grid.dt) +
                                " exceeds the stability limit " +
                                std::to_string(result.stability_limit) + " (units of 1/rate_unit)");
  }

  // Segment boundaries in internal time units.
  const double t_begin = probe.start_time();
  double t_last = probe.end_time();
  for (const auto& k : control.knots()) t_last = std::max(t_last, k.time);
  const double t_end = t_last + grid.read_duration;
  std::vector<double> marks{t_begin, t_end};
  for (const auto& k : control.knots()) {
    if (k.time > t_begin && k.time < t_end) marks.push_back(k.time);
  }
  if (probe.truncation && *probe.truncation > t_begin && *probe.truncation < t_end) {
    marks.push_back(*probe.truncation);
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  const auto read_start = control.switch_on_time();
  const auto switch_off = control.switch_off_time();

  Propagator prop(grid, probe, rates);
  const int nz = grid.z_points;
  result.z.resize(nz);
  for (int j = 0; j < nz; ++j) result.z[j] = (j + 0.5) * grid.dz();

  // The slaved polarization of the adiabatic path is not an energy reservoir,
  // so its bookkeeping only holds to the accuracy of the elimination.
  const double growth_margin = grid.integrator == Integrator::adiabatic ? 0.25 : 1e-3;
  double next_trace = t_begin * u;
  bool snapped = false;
  auto record = [&](const SegmentDrive& seg, double t) {
    if (t + 1e-12 < next_trace) return;
    const Complex e0 = prop.entrance(seg, t);
    result.output_trace.push_back({t / u, std::norm(e0), prop.exit_intensity(seg, t)});
    next_trace = t + grid.trace_interval;
  };

  for (std::size_t m = 0; m + 1 < marks.size(); ++m) {
    const double a_s = marks[m];
    const double b_s = marks[m + 1];
    SegmentDrive seg;
    seg.a = a_s * u;
    seg.b = b_s * u;
    seg.omega_a = control.value(a_s) / u;
    const double omega_mid = control.value(0.5 * (a_s + b_s)) / u;
    seg.omega_b = 2.0 * omega_mid - seg.omega_a;
    seg.probe_on = !probe.truncation || a_s < *probe.truncation;
    seg.dark = seg.omega_a == 0 && omega_mid == 0;

    double span = seg.b - seg.a;
    double skipped = 0.0;
    const bool quiet = seg.dark && !seg.probe_on && rates.g > 0;
    if (quiet && span > kSettleDecays / rates.g) {
      skipped = span - kSettleDecays / rates.g;
      span -= skipped;
    }
    const double w_out_before = prop.w_out;
    const long n = std::max(1L, static_cast<long>(std::ceil(span / grid.dt - 1e-9)));
    const double h = span / n;
    double t = seg.a;
    record(seg, t);
    for (long i = 0; i < n; ++i) {
      prop.step(seg, t, h);
      t = seg.a + (i + 1) * h;
      ++result.steps;
      const double ex = prop.excitation(seg, t);
      if (!std::isfinite(ex) || ex + prop.w_out > prop.w_in * (1.0 + growth_margin) + 1e-12) {
        throw InstabilityError("energy growth at t = " + std::to_string(t / u) +
                               " s: stored " + std::to_string(ex) + " + emitted " +
                               std::to_string(prop.w_out) + " exceeds input " +
                               std::to_string(prop.w_in) + " (dt = " +
                               std::to_string(grid.dt) + ", limit " +
                               std::to_string(result.stability_limit) + ")");
      }
      record(seg, t);
    }
    if (skipped > 0) {
      prop.skip_dark(skipped);
      next_trace = seg.b;
    }

    const double emitted = prop.w_out - w_out_before;
    if (read_start && a_s >= *read_start) {
      result.retrieved_energy += emitted;
    } else {
      result.leaked_energy += emitted;
    }
    if (!snapped && switch_off && b_s >= *switch_off) {
      snapped = true;
      result.stored_spinwave = prop.spin_wave();
      result.stored_excitation = prop.excitation(seg, seg.b);
    }
  }
  if (!snapped) result.stored_spinwave = prop.spin_wave();

  SegmentDrive last{t_end * u, t_end * u, control.value(t_end) / u, control.value(t_end) / u,
                    false, false};
  result.input_energy = prop.w_in;
  result.final_excitation = prop.excitation(last, last.b);
  result.excitation_drift =
      prop.w_in > 0 ? std::abs(prop.w_in - prop.w_out - result.final_excitation) / prop.w_in : 0.0;
  result.efficiency_internal =
      result.input_energy > 0 ? std::clamp(result.retrieved_energy / result.input_energy, 0.0, 1.0)
                              : 0.0;
  result.efficiency_total = result.efficiency_internal;
  return result;
}

}  // namespace

void FieldGrid::validate() const {
  if (z_points < 32) throw std::invalid_argument("FieldGrid: z_points must be >= 32");
  if (!(dt > 0)) throw std::invalid_argument("FieldGrid: dt must be > 0");
  if (!(read_duration >= 0)) throw std::invalid_argument("FieldGrid: read_duration must be >= 0");
  if (!(trace_interval > 0)) throw std::invalid_argument("FieldGrid: trace_interval must be > 0");
  if (!(rate_unit > 0)) throw std::invalid_argument("FieldGrid: rate_unit must be > 0");
}

double stability_limit(const FieldGrid& grid, const core::LambdaSystem& sys, double od,
                       double max_control) {
  check_inputs(grid, sys, od);
  return limit_for(grid, normalized_rates(grid, sys, od, sys.gamma_21), max_control / grid.rate_unit);
}

StorageResult propagate(const FieldGrid& grid, const ControlWaveform& control,
                        const ProbeWaveform& probe_in, const core::LambdaSystem& sys, double od) {
  return run(grid, control, probe_in, sys, od, sys.gamma_21);
}

StorageResult store_and_retrieve(const FieldGrid& grid, const core::LambdaSystem& sys, double od,
                                 const ProbeWaveform& probe, double storage_time, double gamma_s) {
  if (!(storage_time >= 0)) throw std::invalid_argument("storage time must be >= 0");
  ProbeWaveform cut = probe;
  if (!cut.truncation) cut.truncation = cut.peak_time;
  const double off = *cut.truncation;
  ControlWaveform control = ControlWaveform::constant(sys.omega_c);
  control.switch_to(off, 0.0).switch_to(off + storage_time, sys.omega_c);
  return run(grid, control, cut, sys, od, gamma_s);
}

double efficiency(const StorageResult& result, bool include_geometric, double overlap) {
  if (!(result.input_energy > 0) || !(result.retrieved_energy > 0)) return 0.0;
  const double internal = std::clamp(result.retrieved_energy / result.input_energy, 0.0, 1.0);
  if (!include_geometric) return internal;
  if (!(overlap >= 0 && overlap <= 1)) throw std::invalid_argument("overlap must lie in [0, 1]");
  return internal * overlap;
}

DecayScan scan_storage_times(const FieldGrid& grid, const core::LambdaSystem& sys, double od,
                             const ProbeWaveform& probe, const std::vector<double>& storage_times,
                             double gamma_s, int threads) {
  DecayScan scan;
  scan.storage_times = storage_times;
  scan.runs.resize(storage_times.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < storage_times.size(); i = next++) {
      try {
        scan.runs[i] = store_and_retrieve(grid, sys, od, probe, storage_times[i], gamma_s);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = storage_times.size();
      }
    }
  };
  const int n_workers =
      std::clamp<int>(threads, 1, std::max<int>(1, static_cast<int>(storage_times.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  for (const auto& r : scan.runs) scan.retrieved_energies.push_back(r.retrieved_energy);
  return scan;
}

}  // namespace mottlight::storage
