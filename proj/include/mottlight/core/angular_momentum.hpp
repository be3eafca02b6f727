#pragma once

// Dipole-transition strengths between hyperfine Zeeman sublevels.
//
// Angular momenta are passed as doubled integers (2J, 2F, ...) so half-integer
// values are exact.

namespace mottlight::core {

struct FineStructure {
  int two_j_ground;
  int two_j_excited;
  int two_nuclear_spin;
};

/// Rb-87 5S_1/2 -> 5P_1/2.
inline constexpr FineStructure kRb87D1{1, 1, 3};

/// Fraction of spontaneous decays from any sublevel of excited hyperfine level
/// F' that end in ground hyperfine level F.
double hyperfine_branching(const FineStructure& fs, int two_f_excited,
                           int two_f_ground);

/// Fraction of decays from |F', m'> into the single sublevel |F, m>. This is
/// also the resonant cross-section of |F, m> -> |F', m'> relative to
/// 3 lambda^2 / 2 pi for matched polarization.
double sublevel_branching(const FineStructure& fs, int two_f_excited,
                          int two_m_excited, int two_f_ground,
                          int two_m_ground);

/// |F=1, m=-1> -> |F'=1, m'=0> on the D1 line (sigma+ probe).
double d1_probe_line_strength();

/// |F=1, m=-1> -> |F'=1, m'=-1> on the D1 line (pi leak).
double d1_pi_leak_line_strength();

/// Fraction of decays of F'=1 on the D1 line that land in F=2.
double d1_branching_to_f2();

}  // namespace mottlight::core
