#include "mottlight/core/angular_momentum.hpp"

#include <gsl/gsl_sf_coupling.h>

namespace mottlight::core {

double hyperfine_branching(const FineStructure& fs, int two_f_excited,
                           int two_f_ground) {
  const double six_j = gsl_sf_coupling_6j(fs.two_j_ground, fs.two_j_excited, 2,
                                          two_f_excited, two_f_ground,
                                          fs.two_nuclear_spin);
  return (fs.two_j_excited + 1) * (two_f_ground + 1) * six_j * six_j;
}

double sublevel_branching(const FineStructure& fs, int two_f_excited,
                          int two_m_excited, int two_f_ground,
                          int two_m_ground) {
  const int two_q = two_m_excited - two_m_ground;
  if (two_q < -2 || two_q > 2) return 0.0;
  const double three_j = gsl_sf_coupling_3j(two_f_ground, 2, two_f_excited,
                                            two_m_ground, two_q, -two_m_excited);
  return hyperfine_branching(fs, two_f_excited, two_f_ground) *
         (two_f_excited + 1) * three_j * three_j;
}

double d1_probe_line_strength() {
  return sublevel_branching(kRb87D1, 2, 0, 2, -2);
}

double d1_pi_leak_line_strength() {
  return sublevel_branching(kRb87D1, 2, -2, 2, -2);
}

double d1_branching_to_f2() { return hyperfine_branching(kRb87D1, 2, 4); }

}  // namespace mottlight::core
