#include "mottlight/deflection/camera.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include <fftw3.h>

namespace mottlight::deflection {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

struct PlanDeleter {
  void operator()(fftw_plan p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

double frequency(int i, int n, double spacing) {
  const int k = i < n / 2 ? i : i - n;
  return core::kTwoPi * k / (n * spacing);
}

}  // namespace

DeflectionResult propagate_to_camera(const SpinWaveMap& sw, double k_p, double defocus) {
  const TransverseGrid& grid = sw.grid;
  grid.validate();
  const int n = grid.points;
  const std::size_t total = static_cast<std::size_t>(n) * n;
  if (sw.amplitude.size() != total) throw std::invalid_argument("propagate_to_camera: bad map size");
  if (!(k_p > 0)) throw std::invalid_argument("propagate_to_camera: k_p must be > 0");
  if (!(defocus > 0)) throw std::invalid_argument("propagate_to_camera: defocus must be > 0");
  const double bound = grid.extent() * grid.spacing * k_p / core::kTwoPi;
  if (defocus > bound) {
    throw GridTooSmallError("defocus " + std::to_string(defocus) +
                            " m exceeds the angular-spectrum sampling bound " +
                            std::to_string(bound) + " m");
  }

  std::unique_ptr<fftw_complex[], FftwDeleter> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total)));
  Plan forward, backward;
  {
    std::lock_guard lock(planner_mutex());
    forward.reset(fftw_plan_dft_2d(n, n, buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE));
    backward.reset(fftw_plan_dft_2d(n, n, buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
  }
  for (std::size_t i = 0; i < total; ++i) {
    buf[i][0] = sw.amplitude[i].real();
    buf[i][1] = sw.amplitude[i].imag();
  }
  fftw_execute(forward.get());
  const double norm = 1.0 / static_cast<double>(total);
  for (int iy = 0; iy < n; ++iy) {
    const double ky = frequency(iy, n, grid.spacing);
    for (int iz = 0; iz < n; ++iz) {
      const double kz = frequency(iz, n, grid.spacing);
      const core::Complex h = std::polar(norm, -(ky * ky + kz * kz) * defocus / (2.0 * k_p));
      fftw_complex& c = buf[static_cast<std::size_t>(iy) * n + iz];
      const core::Complex v = core::Complex(c[0], c[1]) * h;
      c[0] = v.real();
      c[1] = v.imag();
    }
  }
  fftw_execute(backward.get());

  DeflectionResult out;
  out.grid = grid;
  out.defocus = defocus;
  out.input_energy = sw.energy();
  out.image.resize(total);
  out.row_sums.assign(n, 0.0);
  const int band = n / 16;
  double edge = 0.0;
  double sum = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int iz = 0; iz < n; ++iz) {
      const std::size_t i = static_cast<std::size_t>(iy) * n + iz;
      const double v = buf[i][0] * buf[i][0] + buf[i][1] * buf[i][1];
      out.image[i] = v;
      out.row_sums[iy] += v * grid.spacing;
      sum += v;
      if (iy < band || iy >= n - band || iz < band || iz >= n - band) edge += v;
    }
  }
  out.image_energy = sum * grid.cell_area();
  if (sum > 0 && edge > 0.01 * sum) {
    throw GridTooSmallError("image reaches the grid edge (" + std::to_string(100.0 * edge / sum) +
                            "% of the energy); enlarge the grid or shorten the defocus");
  }

  std::vector<double> ys(n);
  double m0 = 0.0, m1 = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    ys[iy] = grid.coordinate(iy);
    m0 += out.row_sums[iy];
    m1 += out.row_sums[iy] * ys[iy];
  }
  out.intensity_centroid = m0 > 0 ? m1 / m0 : 0.0;
  out.fit = fitting::fit_gaussian_1d(ys, out.row_sums);
  out.centroid_shift = out.fit.center;
  out.beta = out.centroid_shift / defocus;
  return out;
}

double deflection_slope(const DeflectionParams& params) {
  params.gradient.validate();
  if (!(params.probe_wavenumber > 0)) throw std::invalid_argument("probe wavenumber must be > 0");
  if (params.convention == SlopeConvention::cloud_center) {
    return params.gradient.gradient_y(0.0, 0.0) / params.probe_wavenumber;
  }
  const SpinWaveMap sw = make_spin_wave(params.cloud, params.probe, params.grid);
  const int n = params.grid.points;
  double weight = 0.0;
  double acc = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const double y = params.grid.coordinate(iy);
    for (int iz = 0; iz < n; ++iz) {
      const double w = std::norm(sw.amplitude[static_cast<std::size_t>(iy) * n + iz]);
      if (w == 0) continue;
      weight += w;
      acc += w * params.gradient.gradient_y(y, params.grid.coordinate(iz));
    }
  }
  return weight > 0 ? acc / weight / params.probe_wavenumber : 0.0;
}

DeflectionScan simulate_deflection_scan(const DeflectionParams& params,
                                        const std::vector<double>& interaction_times,
                                        int threads) {
  for (double t : interaction_times) {
    if (!(t >= 0)) throw std::invalid_argument("interaction times must be >= 0");
  }
  const SpinWaveMap sw = make_spin_wave(params.cloud, params.probe, params.grid);
  const std::vector<double> shifts = light_shift_profile(params.gradient, params.grid);

  DeflectionScan scan;
  scan.interaction_times = interaction_times;
  scan.results.resize(interaction_times.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < interaction_times.size(); i = next++) {
      try {
        scan.results[i] = propagate_to_camera(phase_imprint(sw, shifts, interaction_times[i]),
                                              params.probe_wavenumber, params.defocus);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = interaction_times.size();
      }
    }
  };
  const int n_workers =
      std::clamp<int>(threads, 1, std::max<int>(1, static_cast<int>(interaction_times.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& r : scan.results) scan.betas.push_back(r.beta);
  const std::set<double> distinct(interaction_times.begin(), interaction_times.end());
  if (distinct.size() >= 2) scan.fit = fitting::fit_line(interaction_times, scan.betas);
  scan.analytic_slope = deflection_slope(params);
  return scan;
}

void write_pgm(const std::filesystem::path& path, const std::vector<double>& image, int n) {
  if (n <= 0 || image.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("write_pgm: image is not n x n");
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open " + path.string());
  const double peak = *std::max_element(image.begin(), image.end());
  f << "P5\n" << n << " " << n << "\n65535\n";
  for (double v : image) {
    const double scaled = peak > 0 ? std::clamp(v / peak, 0.0, 1.0) * 65535.0 : 0.0;
    const auto px = static_cast<unsigned>(std::lround(scaled));
    const char bytes[2] = {static_cast<char>(px >> 8), static_cast<char>(px & 0xff)};
    f.write(bytes, 2);
  }
  if (!f) throw std::ios_base::failure("write failed: " + path.string());
}

}  // namespace mottlight::deflection
