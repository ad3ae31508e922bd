#include "priors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "bessel_k.hpp"
#include "error.hpp"

namespace bkmcmc {

namespace {

double mother(double x) {
  if (x < 0.0 || x >= 1.0) return 0.0;
  return x <= 0.5 ? 1.0 : -1.0;
}

}  // namespace

bool is_dyadic(std::size_t n) { return n > 0 && std::has_single_bit(n); }

double haar_eval(std::size_t k, double t) {
  if (!(t >= 0.0 && t < 1.0)) {
    throw DomainError("Haar functions are evaluated on [0,1), got t = " + std::to_string(t));
  }
  if (k == 0) return 1.0;
  const int j = std::bit_width(k) - 1;
  const double m = static_cast<double>(k - (std::size_t{1} << j));
  const double scale = std::ldexp(1.0, j);
  return std::sqrt(scale) * mother(scale * t - m);
}

std::vector<double> deconv_gamma_sequence(std::size_t n) {
  if (n < 2) throw ConfigError("the deconvolution scale sequence needs N >= 2");
  std::vector<double> gamma(n);
  gamma[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const int j = std::bit_width(k) - 1;
    gamma[k] = std::ldexp(1.0, -2 * j);
  }
  return gamma;
}

std::vector<double> midpoint_grid(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return t;
}

std::vector<double> haar_analyze(std::span<const double> grid_values) {
  const std::size_t n = grid_values.size();
  if (!is_dyadic(n)) throw ShapeError("Haar analysis needs a dyadic grid, got " + std::to_string(n));
  const double root_h = std::sqrt(1.0 / static_cast<double>(n));
  std::vector<double> a(grid_values.begin(), grid_values.end());
  for (double& x : a) x *= root_h;
  std::vector<double> out(n);
  std::vector<double> s;
  // Level j has 2^j details stored at [2^j, 2^{j+1}); the finest level goes first.
  for (std::size_t len = n; len > 1; len /= 2) {
    const std::size_t half = len / 2;
    s.assign(half, 0.0);
    for (std::size_t m = 0; m < half; ++m) {
      s[m] = (a[2 * m] + a[2 * m + 1]) * std::numbers::sqrt2 / 2.0;
      out[half + m] = (a[2 * m] - a[2 * m + 1]) * std::numbers::sqrt2 / 2.0;
    }
    a.swap(s);
  }
  out[0] = a[0];
  return out;
}

std::vector<double> haar_synthesize(std::span<const double> coeffs, std::size_t grid_size) {
  if (!is_dyadic(grid_size)) {
    throw ShapeError("Haar synthesis needs a dyadic grid, got " + std::to_string(grid_size));
  }
  if (coeffs.size() > grid_size) {
    throw ShapeError("cannot resolve " + std::to_string(coeffs.size()) + " Haar modes on " +
                     std::to_string(grid_size) + " cells");
  }
  std::vector<double> c(grid_size, 0.0);
  std::copy(coeffs.begin(), coeffs.end(), c.begin());
  std::vector<double> a{c[0]};
  std::vector<double> next;
  for (std::size_t half = 1; half < grid_size; half *= 2) {
    next.assign(2 * half, 0.0);
    for (std::size_t m = 0; m < half; ++m) {
      const double d = c[half + m];
      next[2 * m] = (a[m] + d) * std::numbers::sqrt2 / 2.0;
      next[2 * m + 1] = (a[m] - d) * std::numbers::sqrt2 / 2.0;
    }
    a.swap(next);
  }
  const double inv_root_h = std::sqrt(static_cast<double>(grid_size));
  for (double& x : a) x *= inv_root_h;
  return a;
}

std::vector<double> scale_coefficients(const PriorSpec& prior, std::span<const double> eta) {
  if (eta.size() != prior.gamma.size()) {
    throw ShapeError("expected " + std::to_string(prior.gamma.size()) + " coefficients, got " +
                     std::to_string(eta.size()));
  }
  std::vector<double> c(eta.size());
  for (std::size_t k = 0; k < eta.size(); ++k) c[k] = prior.lambda * prior.gamma[k] * eta[k];
  return c;
}

std::vector<double> synthesize(const PriorSpec& prior, std::span<const double> eta,
                               std::size_t grid_size) {
  return haar_synthesize(scale_coefficients(prior, eta), grid_size);
}

PriorDraw sample_prior(const PriorSpec& prior, RngHandle& rng, std::size_t grid_size) {
  validate(prior);
  PriorDraw draw;
  draw.eta.resize(prior.gamma.size());
  if (prior.kind == PriorKind::BesselK) {
    const BKParams unit(prior.shape, 1.0);
    for (double& x : draw.eta) x = sample_bk(unit, rng);
  } else {
    for (double& x : draw.eta) x = sample_gamma(prior.shape, 1.0, rng);
  }
  draw.coeffs = scale_coefficients(prior, draw.eta);
  if (grid_size > 0) draw.grid = haar_synthesize(draw.coeffs, grid_size);
  return draw;
}

}  // namespace bkmcmc
