#pragma once

// Retrieval of the imprinted spin wave, free-space propagation to a defocused
// camera plane and extraction of the deflection angle.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mottlight/deflection/light_shift.hpp"
#include "mottlight/deflection/spin_wave.hpp"
#include "mottlight/fitting/fitting.hpp"

namespace mottlight::deflection {

class GridTooSmallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeflectionResult {
  TransverseGrid grid;
  std::vector<double> image;     // |E|^2, row-major like SpinWaveMap
  std::vector<double> row_sums;  // image summed over z, one value per y
  fitting::GaussianFit fit;      // 1D Gaussian fitted to row_sums
  double centroid_shift = 0.0;   // fitted centre, m
  double intensity_centroid = 0.0;  // first moment of row_sums, m
  double defocus = 0.0;
  double beta = 0.0;             // centroid_shift / defocus
  double input_energy = 0.0;
  double image_energy = 0.0;
};

/// The retrieved field takes the transverse profile of the spin wave; it is
/// propagated over `defocus` with the paraxial angular-spectrum kernel
/// exp(-i (ky^2 + kz^2) defocus / (2 k_p)). Throws GridTooSmallError when the
/// defocus breaks the sampling bound extent * spacing * k_p / 2 pi, or when
/// more than 1% of the image energy lands within extent/16 of the grid edge.
DeflectionResult propagate_to_camera(const SpinWaveMap& sw, double k_p, double defocus);

enum class SlopeConvention {
  cloud_center,       // gradient evaluated at the cloud centre
  spinwave_weighted,  // gradient averaged with weight |spin wave|^2
};

struct DeflectionParams {
  GradientBeam gradient = default_gradient_beam();
  cloud::AtomCloud cloud;
  cloud::BeamProfile probe;
  TransverseGrid grid;
  double probe_wavenumber = core::rb87_d1().probe_wavenumber();
  double defocus = 1e-3;
  SlopeConvention convention = SlopeConvention::spinwave_weighted;
};

/// d beta / d t_int in rad/s (numerically equal to urad/us).
double deflection_slope(const DeflectionParams& params);

struct DeflectionScan {
  std::vector<double> interaction_times;
  std::vector<double> betas;
  std::vector<DeflectionResult> results;
  /// Least-squares line beta(t_int); empty with fewer than two distinct times.
  std::optional<fitting::LinearFit> fit;
  double analytic_slope = 0.0;
};

DeflectionScan simulate_deflection_scan(const DeflectionParams& params,
                                        const std::vector<double>& interaction_times,
                                        int threads = 1);

/// Binary 16-bit PGM, scaled so the brightest pixel is 65535. Rows follow y.
void write_pgm(const std::filesystem::path& path, const std::vector<double>& image, int n);

}  // namespace mottlight::deflection
