#include "diagnostics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>

#include "bessel_k.hpp"
#include "error.hpp"
#include "forward.hpp"

namespace bkmcmc {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n <= max_lag) {
    throw ShapeError("series of length " + std::to_string(n) + " is too short for lag " +
                     std::to_string(max_lag));
  }
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double x : series) var += (x - mean) * (x - mean);
  if (!(var > 0.0)) throw NumericError("autocorrelation of a constant series is undefined");

  const std::size_t m = next_pow2(2 * n);
  const std::size_t nc = m / 2 + 1;
  double* in = fftw_alloc_real(m);
  fftw_complex* spec = fftw_alloc_complex(nc);
  fftw_plan fwd;
  fftw_plan inv;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), in, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec, in, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) in[i] = series[i] - mean;
  std::fill(in + n, in + m, 0.0);
  fftw_execute(fwd);
  for (std::size_t k = 0; k < nc; ++k) {
    const double re = spec[k][0];
    const double im = spec[k][1];
    spec[k][0] = re * re + im * im;
    spec[k][1] = 0.0;
  }
  fftw_execute(inv);
  std::vector<double> rho(max_lag + 1);
  const double c0 = in[0];
  for (std::size_t k = 0; k <= max_lag; ++k) rho[k] = in[k] / c0;
  rho[0] = 1.0;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(in);
  fftw_free(spec);
  return rho;
}

IacfEss iacf_ess(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) throw ShapeError("IACF needs at least two samples");
  const std::vector<double> rho = acf(series, n - 1);
  IacfEss out;
  double tau = 1.0;
  std::size_t k = 1;
  for (; k < n; ++k) {
    tau += 2.0 * rho[k];
    if (rho[k] <= 0.0) break;
  }
  out.cutoff = std::min(k, n - 1);
  out.iacf = tau;
  out.ess_per_10k = 1e4 / std::max(tau, 1.0);
  return out;
}

ComponentSummary summarize_series(std::span<const double> series) {
  if (series.empty()) throw ShapeError("cannot summarize an empty chain");
  ComponentSummary s;
  const double n = static_cast<double>(series.size());
  s.mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : series) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / n);
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

std::vector<ComponentSummary> summarize(const ChainRecord& chain) {
  if (chain.n_samples() == 0) throw ShapeError("cannot summarize an empty chain");
  std::vector<ComponentSummary> out;
  out.reserve(chain.dim);
  for (std::size_t k = 0; k < chain.dim; ++k) out.push_back(summarize_series(chain.component(k)));
  return out;
}

DiagnosticsReport diagnose_columns(const std::vector<std::vector<double>>& columns,
                                   std::size_t max_lag) {
  DiagnosticsReport report;
  if (columns.empty()) return report;
  report.n_samples = columns.front().size();
  const std::size_t lag = std::min(max_lag, report.n_samples > 0 ? report.n_samples - 1 : 0);
  double ess_sum = 0.0;
  report.min_ess = std::numeric_limits<double>::infinity();
  for (const auto& col : columns) {
    std::vector<double> rho;
    IacfEss ie;
    try {
      rho = acf(col, lag);
      ie = iacf_ess(col);
    } catch (const NumericError&) {
      // A component that never moved has no meaningful correlation time.
      rho.assign(lag + 1, std::nan(""));
      rho[0] = 1.0;
      ie.iacf = std::numeric_limits<double>::infinity();
      ie.ess_per_10k = 0.0;
    }
    report.acf.push_back(std::move(rho));
    report.iacf.push_back(ie.iacf);
    report.ess_per_10k.push_back(ie.ess_per_10k);
    ess_sum += ie.ess_per_10k;
    report.min_ess = std::min(report.min_ess, ie.ess_per_10k);
    report.max_ess = std::max(report.max_ess, ie.ess_per_10k);
    report.max_iacf = std::max(report.max_iacf, ie.iacf);
  }
  report.mean_ess = ess_sum / static_cast<double>(columns.size());
  return report;
}

DiagnosticsReport diagnose(const ChainRecord& chain, std::size_t max_lag) {
  std::vector<std::vector<double>> cols;
  cols.reserve(chain.dim);
  for (std::size_t k = 0; k < chain.dim; ++k) cols.push_back(chain.component(k));
  DiagnosticsReport report = diagnose_columns(cols, max_lag);
  report.acceptance_rate = chain.acceptance_rate();
  report.thin = chain.config.thin;
  if (report.thin > 1) {
    // Stored rows are `thin` steps apart; report ESS per 1e4 chain steps.
    const double t = static_cast<double>(report.thin);
    for (double& e : report.ess_per_10k) e /= t;
    report.min_ess /= t;
    report.mean_ess /= t;
    report.max_ess /= t;
  }
  return report;
}

std::int64_t Histogram1d::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) + underflow + overflow;
}

std::int64_t Histogram2d::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) + outside;
}

namespace {

void check_range(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("histogram range must satisfy lo < hi");
  }
}

// Bin index, or -1 below and `bins` above the range.
std::ptrdiff_t bin_of(double x, std::size_t bins, double lo, double hi) {
  if (x < lo || std::isnan(x)) return -1;
  if (x > hi) return static_cast<std::ptrdiff_t>(bins);
  auto i = static_cast<std::ptrdiff_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
  return std::min(i, static_cast<std::ptrdiff_t>(bins) - 1);
}

}  // namespace

Histogram1d hist1d(std::span<const double> x, std::size_t bins, double lo, double hi) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  check_range(lo, hi);
  Histogram1d h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  for (double v : x) {
    const std::ptrdiff_t i = bin_of(v, bins, lo, hi);
    if (i < 0) {
      ++h.underflow;
    } else if (i >= static_cast<std::ptrdiff_t>(bins)) {
      ++h.overflow;
    } else {
      ++h.counts[static_cast<std::size_t>(i)];
    }
  }
  return h;
}

Histogram2d hist2d(std::span<const double> x, std::span<const double> y, std::size_t nx,
                   std::size_t ny, double x_lo, double x_hi, double y_lo, double y_hi) {
  if (x.size() != y.size()) throw ShapeError("2D histogram needs paired samples");
  if (nx < 1 || ny < 1) throw ConfigError("histogram needs at least one bin per axis");
  check_range(x_lo, x_hi);
  check_range(y_lo, y_hi);
  Histogram2d h;
  h.x_lo = x_lo;
  h.x_hi = x_hi;
  h.y_lo = y_lo;
  h.y_hi = y_hi;
  h.nx = nx;
  h.ny = ny;
  h.counts.assign(nx * ny, 0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const std::ptrdiff_t i = bin_of(x[k], nx, x_lo, x_hi);
    const std::ptrdiff_t j = bin_of(y[k], ny, y_lo, y_hi);
    if (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(nx) ||
        j >= static_cast<std::ptrdiff_t>(ny)) {
      ++h.outside;
    } else {
      ++h.counts[static_cast<std::size_t>(i) * ny + static_cast<std::size_t>(j)];
    }
  }
  return h;
}

std::vector<double> cell_centre_axis(const GridSpec2d& grid) {
  if (grid.n < 2 || !(grid.lo < grid.hi)) throw ConfigError("invalid posterior grid");
  const double h = (grid.hi - grid.lo) / static_cast<double>(grid.n);
  std::vector<double> axis(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) axis[i] = grid.lo + (static_cast<double>(i) + 0.5) * h;
  return axis;
}

double trapezoid_2d(const GridPosterior2D& post, std::span<const double> values) {
  const std::size_t n = post.axis.size();
  if (values.size() != n * n) throw ShapeError("grid function has the wrong size");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sum += post.weights[i] * post.weights[j] * values[i * n + j];
  }
  return sum;
}

GridPosterior2D analytic_posterior_2d(double shape, const GridSpec2d& grid,
                                      bool include_likelihood) {
  const BKParams prior(shape, 1.0);
  GridPosterior2D post;
  post.axis = cell_centre_axis(grid);
  const std::size_t n = post.axis.size();
  if (shape <= 0.5) {
    for (double t : post.axis) {
      if (t == 0.0) {
        throw ConfigError("posterior grid touches the prior singularity at 0 for p <= 1/2");
      }
    }
  }
  const double h = post.axis[1] - post.axis[0];
  post.weights.assign(n, h);
  post.weights.front() = post.weights.back() = 0.5 * h;

  std::vector<double> log_prior(n);
  for (std::size_t i = 0; i < n; ++i) log_prior[i] = std::log(bk_density(prior, post.axis[i]));
  post.log_density.resize(n * n);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double u[2] = {post.axis[i], post.axis[j]};
      const double phi = include_likelihood ? linear2d_potential(u) : 0.0;
      const double v = log_prior[i] + log_prior[j] - phi;
      post.log_density[i * n + j] = v;
      max_log = std::max(max_log, v);
    }
  }
  post.density.resize(n * n);
  for (std::size_t k = 0; k < n * n; ++k) post.density[k] = std::exp(post.log_density[k] - max_log);
  const double z = trapezoid_2d(post, post.density);
  for (double& d : post.density) d /= z;

  std::vector<double> f(n * n);
  for (int a = 0; a < 2; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) f[i * n + j] = (a == 0 ? post.axis[i] : post.axis[j]) * post.density[i * n + j];
    }
    post.mean[a] = trapezoid_2d(post, f);
  }
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double x[2] = {post.axis[i] - post.mean[0], post.axis[j] - post.mean[1]};
          f[i * n + j] = x[a] * x[b] * post.density[i * n + j];
        }
      }
      post.cov[a][b] = trapezoid_2d(post, f);
    }
  }
  return post;
}

}  // namespace bkmcmc
