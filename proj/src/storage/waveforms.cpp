#include "mottlight/storage/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mottlight::storage {

ControlWaveform ControlWaveform::constant(double rabi) {
  if (!(rabi >= 0)) throw std::invalid_argument("ControlWaveform: Rabi frequency must be >= 0");
  ControlWaveform w;
  w.initial_ = rabi;
  return w;
}

ControlWaveform& ControlWaveform::switch_to(double time, double rabi) {
  if (!(rabi >= 0)) throw std::invalid_argument("ControlWaveform: Rabi frequency must be >= 0");
  if (!knots_.empty() && time < knots_.back().time) {
    throw std::invalid_argument("ControlWaveform: knots must be added in time order");
  }
  knots_.push_back({time, value(time)});
  knots_.push_back({time, rabi});
  return *this;
}

ControlWaveform& ControlWaveform::ramp_to(double t_start, double t_end, double rabi) {
  if (!(rabi >= 0)) throw std::invalid_argument("ControlWaveform: Rabi frequency must be >= 0");
  if (!(t_end > t_start)) throw std::invalid_argument("ControlWaveform: empty ramp");
  if (!knots_.empty() && t_start < knots_.back().time) {
    throw std::invalid_argument("ControlWaveform: knots must be added in time order");
  }
  knots_.push_back({t_start, value(t_start)});
  knots_.push_back({t_end, rabi});
  return *this;
}

double ControlWaveform::value(double t) const {
  if (knots_.empty() || t < knots_.front().time) return initial_;
  // Last knot at or before t; for a jump this picks the post-jump value.
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double x, const Knot& k) { return x < k.time; });
  const Knot& a = *(it - 1);
  if (it == knots_.end()) return a.value;
  const Knot& b = *it;
  const double f = (t - a.time) / (b.time - a.time);
  return a.value + f * (b.value - a.value);
}

double ControlWaveform::max_value() const {
  double m = initial_;
  for (const Knot& k : knots_) m = std::max(m, k.value);
  return m;
}

std::optional<double> ControlWaveform::switch_off_time() const {
  double prev = initial_;
  for (const Knot& k : knots_) {
    if (prev > 0 && k.value == 0) return k.time;
    prev = k.value;
  }
  return std::nullopt;
}

std::optional<double> ControlWaveform::switch_on_time() const {
  std::optional<double> out;
  double prev = initial_;
  double prev_time = 0.0;
  bool have_prev = false;
  for (const Knot& k : knots_) {
    if (prev == 0 && k.value > 0) out = have_prev ? prev_time : k.time;
    prev = k.value;
    prev_time = k.time;
    have_prev = true;
  }
  return out;
}

void ProbeWaveform::validate() const {
  if (!(fwhm > 0)) throw std::invalid_argument("ProbeWaveform: fwhm must be > 0");
  if (!(peak_rabi >= 0)) throw std::invalid_argument("ProbeWaveform: peak Rabi frequency must be >= 0");
}

double ProbeWaveform::envelope(double t) const {
  const double u = (t - peak_time) / fwhm;
  return std::exp(-2.0 * std::numbers::ln2 * u * u);
}

double ProbeWaveform::amplitude(double t) const {
  if (truncation && t >= *truncation) return 0.0;
  return envelope(t);
}

double ProbeWaveform::start_time() const { return peak_time - 4.0 * fwhm; }

double ProbeWaveform::end_time() const {
  const double natural = peak_time + 4.0 * fwhm;
  return truncation ? std::min(*truncation, natural) : natural;
}

double ProbeWaveform::energy() const {
  // Intensity exp(-4 ln2 u^2): integral over the whole line is
  // fwhm * sqrt(pi / (4 ln2)); a cut at time T keeps the erf fraction.
  const double full = fwhm * std::sqrt(std::numbers::pi / (4.0 * std::numbers::ln2));
  if (!truncation) return full;
  const double x = 2.0 * std::sqrt(std::numbers::ln2) * (*truncation - peak_time) / fwhm;
  return full * 0.5 * (1.0 + std::erf(x));
}

}  // namespace mottlight::storage
