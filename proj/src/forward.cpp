#include "forward.hpp"

#include <cmath>
#include <string>

#include "error.hpp"
#include "priors.hpp"

namespace bkmcmc {

double linear2d_potential(std::span<const double> u) {
  if (u.size() != 2) throw ShapeError("the 2D linear problem expects a 2-vector");
  const double r0 = Linear2d::g[0][0] * u[0] + Linear2d::g[0][1] * u[1] - Linear2d::data[0];
  const double r1 = Linear2d::g[1][0] * u[0] + Linear2d::g[1][1] * u[1] - Linear2d::data[1];
  const double s2 = Linear2d::noise_std * Linear2d::noise_std;
  return (r0 * r0 + r1 * r1) / (2.0 * s2);
}

std::vector<double> denoising_truth(std::size_t n) {
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 2; i < n; i += 3) u[i] = 1.0;
  return u;
}

double denoising_potential(std::span<const double> u, std::span<const double> y) {
  if (u.size() != y.size()) {
    throw ShapeError("denoising potential: state has " + std::to_string(u.size()) +
                     " entries, data has " + std::to_string(y.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = u[i] - y[i];
    sum += r * r;
  }
  return sum / (2.0 * kDenoiseNoiseStd * kDenoiseNoiseStd);
}

std::vector<double> make_denoising_data(std::size_t n, RngHandle& rng) {
  std::vector<double> y = denoising_truth(n);
  for (double& v : y) v += kDenoiseNoiseStd * rng.normal();
  return y;
}

void validate(const DeconvSetup& setup) {
  if (!(setup.eps > 0.0 && setup.eps <= 0.25)) {
    throw ConfigError("kernel width eps must lie in (0, 1/4], got " + std::to_string(setup.eps));
  }
  if (!is_dyadic(setup.solver_grid) || !is_dyadic(setup.data_grid)) {
    throw ConfigError("deconvolution grids must have a power-of-two number of cells");
  }
  if (setup.n_obs < 1) throw ConfigError("need at least one observation point");
  if (!(setup.obs_lo >= 0.0 && setup.obs_hi < 1.0 && setup.obs_lo <= setup.obs_hi)) {
    throw ConfigError("observation points must lie in [0, 1)");
  }
  if (!(setup.noise_std > 0.0)) throw ConfigError("noise standard deviation must be positive");
}

std::vector<double> observation_points(const DeconvSetup& setup) {
  std::vector<double> pts(setup.n_obs);
  if (setup.n_obs == 1) {
    pts[0] = setup.obs_lo;
    return pts;
  }
  const double step = (setup.obs_hi - setup.obs_lo) / static_cast<double>(setup.n_obs - 1);
  for (std::size_t i = 0; i < setup.n_obs; ++i) pts[i] = setup.obs_lo + step * static_cast<double>(i);
  pts.back() = setup.obs_hi;
  return pts;
}

double triangle_kernel(double d, double eps) {
  const double x = std::fabs(d) / eps;
  return x >= 1.0 ? 0.0 : (1.0 - x) / eps;
}

double circle_distance(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

std::vector<double> convolve_circle(std::span<const double> u, double eps) {
  const std::size_t n = u.size();
  if (n == 0) throw ShapeError("cannot convolve an empty grid function");
  const double h = 1.0 / static_cast<double>(n);
  // On a uniform periodic grid the kernel weights depend only on the index offset.
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = h * triangle_kernel(circle_distance(0.0, static_cast<double>(k) * h), eps);
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i >= j ? i - j : i + n - j;
      if (w[k] != 0.0) sum += w[k] * u[j];
    }
    out[i] = sum;
  }
  return out;
}

std::vector<double> observe_points(std::span<const double> g, std::span<const double> pts) {
  const std::size_t n = g.size();
  if (n == 0) throw ShapeError("cannot observe an empty grid function");
  std::vector<double> out(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double t = pts[k];
    if (!(t >= 0.0 && t < 1.0)) throw DomainError("observation point outside [0,1)");
    const double x = t * static_cast<double>(n) - 0.5;
    const double base = std::floor(x);
    const double frac = x - base;
    const auto i0 = static_cast<std::ptrdiff_t>(base);
    const auto sn = static_cast<std::ptrdiff_t>(n);
    const std::size_t lo = static_cast<std::size_t>(((i0 % sn) + sn) % sn);
    const std::size_t hi = (lo + 1) % n;
    out[k] = (1.0 - frac) * g[lo] + frac * g[hi];
  }
  return out;
}

std::vector<double> deconv_truth_grid(std::size_t n) {
  std::vector<double> t = midpoint_grid(n);
  for (double& x : t) x = (x >= 0.25 && x <= 0.75) ? 1.0 : 0.0;
  return t;
}

DeconvData make_synthetic_data(const DeconvSetup& setup, RngHandle& rng) {
  validate(setup);
  DeconvData data;
  data.points = observation_points(setup);
  const std::vector<double> truth = deconv_truth_grid(setup.data_grid);
  data.clean = observe_points(convolve_circle(truth, setup.eps), data.points);
  data.y = data.clean;
  for (double& v : data.y) v += setup.noise_std * rng.normal();
  data.seed = rng.seed();
  data.stream_id = rng.stream_id();
  return data;
}

DeconvForward::DeconvForward(const DeconvSetup& setup, std::size_t n_coeffs)
    : setup_(setup), n_coeffs_(n_coeffs), n_obs_(setup.n_obs) {
  validate(setup);
  if (n_coeffs == 0 || n_coeffs > setup.solver_grid) {
    throw ShapeError("number of Haar modes must lie in [1, " + std::to_string(setup.solver_grid) +
                     "], got " + std::to_string(n_coeffs));
  }
  points_ = observation_points(setup);
  a_.assign(n_obs_ * n_coeffs_, 0.0);
  std::vector<double> unit(n_coeffs_, 0.0);
  for (std::size_t k = 0; k < n_coeffs_; ++k) {
    unit[k] = 1.0;
    const std::vector<double> col = apply_direct(unit);
    unit[k] = 0.0;
    for (std::size_t i = 0; i < n_obs_; ++i) a_[i * n_coeffs_ + k] = col[i];
  }
}

std::vector<double> DeconvForward::apply_direct(std::span<const double> coeffs) const {
  if (coeffs.size() != n_coeffs_) throw ShapeError("coefficient vector has the wrong length");
  const std::vector<double> grid = haar_synthesize(coeffs, setup_.solver_grid);
  return observe_points(convolve_circle(grid, setup_.eps), points_);
}

std::vector<double> DeconvForward::apply(std::span<const double> coeffs) const {
  if (coeffs.size() != n_coeffs_) throw ShapeError("coefficient vector has the wrong length");
  std::vector<double> out(n_obs_, 0.0);
  for (std::size_t i = 0; i < n_obs_; ++i) {
    const double* row = a_.data() + i * n_coeffs_;
    double s = 0.0;
    for (std::size_t k = 0; k < n_coeffs_; ++k) s += row[k] * coeffs[k];
    out[i] = s;
  }
  return out;
}

double DeconvForward::potential(std::span<const double> coeffs, std::span<const double> y) const {
  if (y.size() != n_obs_) throw ShapeError("data vector has the wrong length");
  if (coeffs.size() != n_coeffs_) throw ShapeError("coefficient vector has the wrong length");
  double sum = 0.0;
  for (std::size_t i = 0; i < n_obs_; ++i) {
    const double* row = a_.data() + i * n_coeffs_;
    double s = -y[i];
    for (std::size_t k = 0; k < n_coeffs_; ++k) s += row[k] * coeffs[k];
    sum += s * s;
  }
  return sum / (2.0 * setup_.noise_std * setup_.noise_std);
}

std::vector<double> DeconvForward::gradient(std::span<const double> coeffs,
                                            std::span<const double> y) const {
  if (y.size() != n_obs_) throw ShapeError("data vector has the wrong length");
  std::vector<double> r = apply(coeffs);
  for (std::size_t i = 0; i < n_obs_; ++i) r[i] -= y[i];
  const double s2 = setup_.noise_std * setup_.noise_std;
  std::vector<double> g(n_coeffs_, 0.0);
  for (std::size_t i = 0; i < n_obs_; ++i) {
    for (std::size_t k = 0; k < n_coeffs_; ++k) g[k] += a_[i * n_coeffs_ + k] * r[i] / s2;
  }
  return g;
}

}  // namespace bkmcmc
