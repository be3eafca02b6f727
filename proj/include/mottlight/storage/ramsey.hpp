#pragma once

// Ground-state coherence decay seen by a Ramsey sequence, and the decay
// analysis of stored-light energies.

#include <vector>

#include "mottlight/fitting/fitting.hpp"
#include "mottlight/storage/solver.hpp"

namespace mottlight::storage {

using fitting::ExponentialFit;
using fitting::fit_exponential;

/// Fringe visibility exp(-gamma_amplitude * T) for each dark time T.
std::vector<double> simulate_ramsey(double gamma_amplitude, const std::vector<double>& dark_times);

struct DecayComparison {
  ExponentialFit energy;      // retrieved energy vs storage time
  ExponentialFit visibility;  // Ramsey visibility vs dark time
  /// energy.tau / visibility.tau; 1/2 when both come from one amplitude decay.
  double ratio = 0.0;
};

DecayComparison compare_decays(const DecayScan& scan, const std::vector<double>& dark_times,
                               const std::vector<double>& visibilities);

}  // namespace mottlight::storage
