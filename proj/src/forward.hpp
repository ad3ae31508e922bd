#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rng.hpp"

namespace bkmcmc {

// 2D linear problem: G = [[1, 1/2], [0, 1]], sigma = 1/2, exact data y0 = G (3/2, 1/2).
struct Linear2d {
  static constexpr double g[2][2] = {{1.0, 0.5}, {0.0, 1.0}};
  static constexpr double noise_std = 0.5;
  static constexpr double truth[2] = {1.5, 0.5};
  static constexpr double data[2] = {1.5 + 0.25, 0.5};
};

/// Phi(u) = |G u - y0|^2 / (2 sigma^2).
double linear2d_potential(std::span<const double> u);

// Denoising: y = u0 + N(0, sigma^2 I) with sigma = 1/4.
constexpr double kDenoiseNoiseStd = 0.25;

/// (0, 0, 1, 0, 0, 1, ...): every third entry is one.
std::vector<double> denoising_truth(std::size_t n);

/// |u - y|^2 / (2 sigma^2) with sigma = 1/4.
double denoising_potential(std::span<const double> u, std::span<const double> y);

/// truth + N(0, 1/16) noise.
std::vector<double> make_denoising_data(std::size_t n, RngHandle& rng);

struct DeconvSetup {
  double eps = 1.0 / 16.0;
  std::size_t solver_grid = 128;
  std::size_t data_grid = 256;
  std::size_t n_obs = 20;
  double obs_lo = 0.01;
  double obs_hi = 0.99;
  double noise_std = 0.05;
};

/// Throws ConfigError for eps outside (0, 1/4], non-dyadic grids or noise <= 0.
void validate(const DeconvSetup& setup);

/// n_obs points from obs_lo to obs_hi inclusive.
std::vector<double> observation_points(const DeconvSetup& setup);

/// kappa_eps(d) = (1/eps) max(0, 1 - |d|/eps).
double triangle_kernel(double d, double eps);

double circle_distance(double a, double b);

/// h * sum_j kappa_eps(d(t_i, s_j)) u_j on the midpoint grid of u.
std::vector<double> convolve_circle(std::span<const double> u, double eps);

/// Periodic linear interpolation of a midpoint grid function.
std::vector<double> observe_points(std::span<const double> g, std::span<const double> pts);

/// Indicator of [1/4, 3/4] at the midpoints of an n-cell grid.
std::vector<double> deconv_truth_grid(std::size_t n);

struct DeconvData {
  std::vector<double> points;
  std::vector<double> clean;  // noiseless observations on the data mesh
  std::vector<double> y;      // clean + noise
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Truth on the data mesh, convolved, observed, plus Gaussian noise.
DeconvData make_synthetic_data(const DeconvSetup& setup, RngHandle& rng);

/// Linear map from N scaled Haar coefficients to the M observations on the
/// solver grid, stored as a dense M x N matrix.
class DeconvForward {
 public:
  DeconvForward(const DeconvSetup& setup, std::size_t n_coeffs);

  std::size_t n_coeffs() const { return n_coeffs_; }
  std::size_t n_obs() const { return n_obs_; }
  const std::vector<double>& matrix() const { return a_; }

  /// A c via the precomputed matrix.
  std::vector<double> apply(std::span<const double> coeffs) const;

  /// Same map evaluated by synthesis, convolution and interpolation.
  std::vector<double> apply_direct(std::span<const double> coeffs) const;

  /// |A c - y|^2 / (2 sigma^2).
  double potential(std::span<const double> coeffs, std::span<const double> y) const;

  /// A^T (A c - y) / sigma^2.
  std::vector<double> gradient(std::span<const double> coeffs, std::span<const double> y) const;

 private:
  DeconvSetup setup_;
  std::size_t n_coeffs_;
  std::size_t n_obs_;
  std::vector<double> points_;
  std::vector<double> a_;  // row-major n_obs x n_coeffs
};

}  // namespace bkmcmc
