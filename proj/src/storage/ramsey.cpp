#include "mottlight/storage/ramsey.hpp"

#include <cmath>
#include <stdexcept>

namespace mottlight::storage {

std::vector<double> simulate_ramsey(double gamma_amplitude, const std::vector<double>& dark_times) {
  if (!(gamma_amplitude >= 0)) throw std::invalid_argument("simulate_ramsey: gamma must be >= 0");
  std::vector<double> out;
  out.reserve(dark_times.size());
  for (double t : dark_times) {
    if (!(t >= 0)) throw std::invalid_argument("simulate_ramsey: dark times must be >= 0");
    out.push_back(std::exp(-gamma_amplitude * t));
  }
  return out;
}

DecayComparison compare_decays(const DecayScan& scan, const std::vector<double>& dark_times,
                               const std::vector<double>& visibilities) {
  DecayComparison out;
  out.energy = fit_exponential(scan.storage_times, scan.retrieved_energies);
  out.visibility = fit_exponential(dark_times, visibilities);
  out.ratio = out.energy.tau / out.visibility.tau;
  return out;
}

}  // namespace mottlight::storage
