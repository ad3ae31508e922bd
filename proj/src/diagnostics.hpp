#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mh.hpp"

namespace bkmcmc {

/// Biased sample autocorrelation rho(0..max_lag), computed by FFT.
/// Throws NumericError for a constant series.
std::vector<double> acf(std::span<const double> series, std::size_t max_lag);

struct IacfEss {
  double iacf = 1.0;
  double ess_per_10k = 1e4;
  std::size_t cutoff = 0;  // last lag included in the sum
};

/// tau = 1 + 2 sum_{k=1}^{K} rho(k) with K the first lag where rho(k) <= 0 (inclusive);
/// ESS per 1e4 steps = 1e4 / max(tau, 1).
IacfEss iacf_ess(std::span<const double> series);

struct ComponentSummary {
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // population standard deviation
};

std::vector<ComponentSummary> summarize(const ChainRecord& chain);
ComponentSummary summarize_series(std::span<const double> series);

struct DiagnosticsReport {
  std::vector<std::vector<double>> acf;  // per component
  std::vector<double> iacf;
  std::vector<double> ess_per_10k;
  double min_ess = 0.0;
  double mean_ess = 0.0;
  double max_ess = 0.0;
  double max_iacf = 0.0;
  std::optional<double> acceptance_rate;
  std::size_t n_samples = 0;
  std::int64_t thin = 1;
};

/// Per-component ACF/IACF/ESS of the stored samples. For thinned chains ESS
/// is still expressed per 1e4 chain steps.
DiagnosticsReport diagnose(const ChainRecord& chain, std::size_t max_lag);

/// Same statistics for a series matrix given column-wise.
DiagnosticsReport diagnose_columns(const std::vector<std::vector<double>>& columns,
                                   std::size_t max_lag);

struct Histogram1d {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::int64_t> counts;
  std::int64_t underflow = 0;
  std::int64_t overflow = 0;
  std::int64_t total() const;
};

struct Histogram2d {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  std::size_t nx = 0, ny = 0;
  std::vector<std::int64_t> counts;  // row-major [ix * ny + iy]
  std::int64_t outside = 0;
  std::int64_t total() const;
};

/// Bins [lo, hi) of equal width; x == hi goes into the last bin.
Histogram1d hist1d(std::span<const double> x, std::size_t bins, double lo, double hi);
Histogram2d hist2d(std::span<const double> x, std::span<const double> y, std::size_t nx,
                   std::size_t ny, double x_lo, double x_hi, double y_lo, double y_hi);

struct GridSpec2d {
  double lo = -2.0;
  double hi = 4.0;
  std::size_t n = 401;  // points per axis, placed at cell centres
};

struct GridPosterior2D {
  std::vector<double> axis;     // shared by both coordinates
  std::vector<double> weights;  // trapezoid weights on the axis
  std::vector<double> log_density;  // unnormalized, row-major [i * n + j]
  std::vector<double> density;      // normalized
  double mean[2] = {0.0, 0.0};
  double cov[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

std::vector<double> cell_centre_axis(const GridSpec2d& grid);

/// exp(-Phi) * BK(p,1)(u1) BK(p,1)(u2) on the grid, trapezoid-normalized.
/// With include_likelihood = false only the prior is tabulated.
GridPosterior2D analytic_posterior_2d(double shape, const GridSpec2d& grid = {},
                                      bool include_likelihood = true);

/// Trapezoid integral of a row-major grid function.
double trapezoid_2d(const GridPosterior2D& post, std::span<const double> values);

}  // namespace bkmcmc
